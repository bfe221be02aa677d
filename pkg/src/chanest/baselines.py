"""Reference estimators: least squares, OMP, and the Student-t variant."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Hyperparams
from .sensing import SensingProblem
from .vi import EstimateResult, _run


@dataclass(frozen=True)
class OmpConfig:
    """Greedy stopping rule: exactly one of atom count or residual threshold."""
    sparsity_k: int | None = None
    residual_threshold: float | None = None

    def __post_init__(self):
        if (self.sparsity_k is None) == (self.residual_threshold is None):
            raise ValueError(
                "exactly one of sparsity_k and residual_threshold must be set")
        if self.sparsity_k is not None and self.sparsity_k < 0:
            raise ValueError("sparsity_k must be non-negative")
        if self.residual_threshold is not None and self.residual_threshold <= 0:
            raise ValueError("residual_threshold must be positive")


def ls_estimate(y_mat: np.ndarray, pilots_matrix: np.ndarray) -> np.ndarray:
    """Least-squares dense channel estimate Y S^H (S S^H)^-1."""
    n_t, t = pilots_matrix.shape
    if t < n_t:
        raise ValueError("LS needs at least as many slots as transmit antennas")
    gram = pilots_matrix @ pilots_matrix.conj().T
    if np.linalg.matrix_rank(gram) < n_t:
        raise ValueError("pilot Gram matrix S S^H is rank deficient")
    return y_mat @ pilots_matrix.conj().T @ np.linalg.inv(gram)


def omp_estimate(y: np.ndarray, phi: np.ndarray, cfg: OmpConfig) -> np.ndarray:
    """Greedy sparse recovery; returns the angular coefficient vector.

    Atom selection maximizes |phi^H residual| (ties to the lowest index);
    coefficients are re-fit by least squares on the selected support.
    """
    m = phi.shape[1]
    coef = np.zeros(m, dtype=complex)
    k_max = cfg.sparsity_k if cfg.sparsity_k is not None else m
    if k_max == 0:
        return coef
    residual = y.astype(complex).copy()
    support: list[int] = []
    available = np.ones(m, dtype=bool)
    solution = np.zeros(0, dtype=complex)
    while len(support) < k_max:
        if (cfg.residual_threshold is not None
                and np.linalg.norm(residual) < cfg.residual_threshold):
            break
        corr = np.abs(phi.conj().T @ residual)
        corr[~available] = -1.0
        atom = int(np.argmax(corr))
        support.append(atom)
        available[atom] = False
        solution, *_ = np.linalg.lstsq(phi[:, support], y, rcond=None)
        residual = y - phi[:, support] @ solution
    coef[support] = solution
    return coef


def sie_estimate(problem: SensingProblem, hp: Hyperparams) -> EstimateResult:
    """Student-t interference estimator.

    Same coordinate-ascent machinery as the proposed estimator, but the
    interference carries the Gaussian-gamma precision hierarchy used for the
    channel instead of the two-layer Laplace construction.
    """
    return _run(problem, hp, "student_t")
