"""Service-level operations shared by the HTTP endpoints and the local CLI."""
from __future__ import annotations

import math

from .. import vi
from ..sweep import derive_trial_seed, build_problem, nmse, run_sweep, run_trial
from .schemas import (SweepRequest, SweepResponse, SweepRowModel, TraceEntry,
                      TraceRequest, TraceResponse, TrialRequest, TrialResponse)


def execute_trial(request: TrialRequest) -> TrialResponse:
    config = request.system.to_config()
    hp = request.hyper.to_hyperparams()
    seed = derive_trial_seed(config.seed, request.trial)
    row = run_trial(config, hp, request.method, seed, trial=request.trial)
    return TrialResponse(row=SweepRowModel.from_row(row))


def execute_sweep(request: SweepRequest) -> SweepResponse:
    config = request.system.to_config()
    hp = request.hyper.to_hyperparams()
    spec = request.sweep.to_spec()
    rows = run_sweep(config, hp, spec, jobs=request.jobs)
    return SweepResponse(rows=[SweepRowModel.from_row(r) for r in rows])


def execute_trace(request: TraceRequest) -> TraceResponse:
    import numpy as np

    config = request.system.to_config()
    hp = request.hyper.to_hyperparams()
    seed = derive_trial_seed(config.seed, request.trial)
    rng = np.random.default_rng(seed)
    problem, _pilots = build_problem(config, rng)
    result = vi.run(problem, hp, collect_trace=True)
    error = nmse(problem.truth_dense, result.dense_channel_estimate)
    entries = [
        TraceEntry(iteration=t["iteration"], delta_mu_h=t["delta_mu_h"],
                   delta_mu_e=t["delta_mu_e"], beta_mean=t["beta_mean"],
                   elbo=None if math.isnan(t["elbo"]) else t["elbo"])
        for t in (result.trace or [])
    ]
    return TraceResponse(
        nmse_linear=error,
        nmse_db=10.0 * math.log10(error) if error > 0 else None,
        iterations=result.iterations,
        converged=result.converged,
        entries=entries,
    )
