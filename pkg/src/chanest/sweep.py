"""Seeded Monte Carlo trials and parameter sweeps."""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import baselines, vi
from .config import METHODS, Hyperparams, SweepSpec, SystemConfig
from .geometry import (AngularChannel, ArrayGeometry, angular_expand,
                       build_dictionary, sample_geometric_channel)
from .interference import (ImpulseConfig, NoiseConfig, dbm_to_watt,
                           sample_awgn, sample_impulsive)
from .sensing import SensingProblem, generate_pilots, observe

_VARIABLE_FIELDS = {"T": "t", "P_dbm": "p_dbm", "c2": "c2", "eta": "eta"}


@dataclass(frozen=True)
class SweepRow:
    method: str
    variable: str
    value: float
    trial: int
    nmse_linear: float
    nmse_db: float
    iterations: int
    converged: bool
    wall_ms: float


def nmse(truth: np.ndarray, estimate: np.ndarray) -> float:
    """Squared Frobenius error normalized by the truth's squared norm."""
    if truth.shape != estimate.shape:
        raise ValueError("truth and estimate must have the same shape")
    denom = float(np.linalg.norm(truth) ** 2)
    if denom == 0.0:
        raise ValueError("truth matrix must be nonzero")
    return float(np.linalg.norm(truth - estimate) ** 2) / denom


def derive_trial_seed(base_seed: int,
                      trial: int) -> np.random.SeedSequence:
    """Deterministic, pairwise-independent per-trial seed stream.

    The stream depends only on (seed, trial), not on the method or the
    sweep point, so all methods and sweep points score paired realizations.
    """
    return np.random.SeedSequence((base_seed, trial))


def build_problem(config: SystemConfig,
                  rng: np.random.Generator) -> tuple[SensingProblem, object]:
    """Sample one scenario realization; returns (problem, pilots)."""
    dict_rx = build_dictionary(ArrayGeometry(config.n_r), config.d_u)
    dict_tx = build_dictionary(ArrayGeometry(config.n_t), config.d_b)
    channel = sample_geometric_channel(rng, config)
    pilots = generate_pilots(rng, config.n_t, config.t,
                             dbm_to_watt(config.p_dbm))
    if config.noise_variance_override is not None:
        sigma2 = config.noise_variance_override
    else:
        sigma2 = NoiseConfig(config.psd_dbm_per_hz, config.bandwidth_hz).variance_watt
    if config.c2 > 0 and sigma2 > 0:
        icfg = ImpulseConfig(config.c2, config.eta, sigma2)
        impulses = sample_impulsive(rng, config.n_r, config.t, icfg)
    else:
        impulses = np.zeros((config.n_r, config.t), dtype=complex)
    if sigma2 > 0:
        noise = sample_awgn(rng, config.n_r, config.t, sigma2)
    else:
        noise = np.zeros((config.n_r, config.t), dtype=complex)
    problem = observe(channel, pilots, impulses, noise, dict_rx, dict_tx,
                      sigma2, on_grid=config.on_grid)
    return problem, pilots


def _estimate(method: str, config: SystemConfig, hp: Hyperparams,
              problem: SensingProblem, pilots) -> tuple[np.ndarray, int, bool]:
    """Dispatch one estimator; returns (dense estimate, iterations, converged)."""
    if method == "proposed":
        result = vi.run(problem, hp)
        return result.dense_channel_estimate, result.iterations, result.converged
    if method == "sie":
        result = baselines.sie_estimate(problem, hp)
        return result.dense_channel_estimate, result.iterations, result.converged
    if method == "omp":
        cfg = baselines.OmpConfig(sparsity_k=min(2 * config.l,
                                                 config.d_u * config.d_b))
        coef = baselines.omp_estimate(problem.y, problem.phi, cfg)
        dense = angular_expand(
            AngularChannel(coef.reshape((config.d_u, config.d_b), order="F")),
            problem.dict_rx, problem.dict_tx)
        return dense, cfg.sparsity_k, True
    if method == "ls":
        y_mat = problem.y.reshape((config.n_r, config.t), order="F")
        dense = baselines.ls_estimate(y_mat, pilots.matrix)
        return dense, 0, True
    raise ValueError(f"unknown method {method!r}")


def run_trial(config: SystemConfig, hp: Hyperparams, method: str, trial_seed,
              trial: int = 0, variable: str = "", value: float = 0.0) -> SweepRow:
    """One seeded trial: sample a scenario, estimate, score NMSE.

    Estimator failures are recorded as a NaN-scored row rather than raised.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    rng = np.random.default_rng(trial_seed)
    problem, pilots = build_problem(config, rng)
    start = time.perf_counter()
    try:
        dense, iterations, converged = _estimate(method, config, hp, problem,
                                                 pilots)
        error = nmse(problem.truth_dense, dense)
    except (vi.EstimationError, np.linalg.LinAlgError, ValueError):
        wall = (time.perf_counter() - start) * 1e3
        return SweepRow(method, variable, value, trial, math.nan, math.nan, 0,
                        False, wall if config.record_timing else 0.0)
    wall = (time.perf_counter() - start) * 1e3
    return SweepRow(
        method=method,
        variable=variable,
        value=value,
        trial=trial,
        nmse_linear=error,
        nmse_db=10.0 * math.log10(error) if error > 0 else -math.inf,
        iterations=iterations,
        converged=converged,
        wall_ms=wall if config.record_timing else 0.0,
    )


def _apply_point(config: SystemConfig, variable: str,
                 value: float) -> SystemConfig:
    name = _VARIABLE_FIELDS[variable]
    if name == "t":
        return replace(config, t=int(round(value)))
    return replace(config, **{name: value})


def _trial_task(args) -> SweepRow:
    config, hp, method, seed_parts, trial, variable, value = args
    return run_trial(config, hp, method, np.random.SeedSequence(seed_parts),
                     trial=trial, variable=variable, value=value)


def run_sweep(config: SystemConfig, hp: Hyperparams, spec: SweepSpec,
              jobs: int = 1) -> list[SweepRow]:
    """Run |values| x |methods| x trials seeded trials, in declared order.

    Output ordering and content are independent of the worker count.
    """
    tasks = []
    for value in spec.values:
        point_config = _apply_point(config, spec.variable, value)
        for method in spec.methods:
            for trial in range(config.trials):
                seed_parts = (config.seed, trial)
                tasks.append((point_config, hp, method, seed_parts, trial,
                              spec.variable, float(value)))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_trial_task, tasks, chunksize=4))
    return [_trial_task(task) for task in tasks]


def summarize(rows: list[SweepRow]) -> dict[tuple[str, float], tuple[float, float, int]]:
    """Per-(method, value) mean/std of NMSE in dB, NaN rows excluded."""
    groups: dict[tuple[str, float], list[float]] = {}
    for row in rows:
        if math.isnan(row.nmse_db):
            continue
        groups.setdefault((row.method, row.value), []).append(row.nmse_db)
    out = {}
    for key, values in groups.items():
        arr = np.asarray(values)
        out[key] = (float(arr.mean()), float(arr.std(ddof=1)) if arr.size > 1
                    else 0.0, arr.size)
    return out
