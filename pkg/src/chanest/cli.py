"""Command-line client for the estimation service.

Requests are executed in process by default; pass --server-url to target a
running service instead (start one with `chanest serve`).
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .config import (ConfigError, Hyperparams, SweepSpec, SystemConfig,
                     desk_preset, parse_config, METHODS)
from .output import write_csv, write_svg_plot
from .service import ops
from .service.schemas import (HyperparamsModel, SweepRequest, SweepResponse,
                              SweepSpecModel, SystemConfigModel, TraceRequest,
                              TraceResponse, TrialRequest, TrialResponse)
from .sweep import summarize
from .vi import write_trace_csv


class Client:
    """Thin request dispatcher: in-process by default, HTTP when given a URL."""

    def __init__(self, server_url: str | None = None):
        self.server_url = server_url
        self._http = None
        if server_url is not None:
            import httpx
            self._http = httpx.Client(base_url=server_url, timeout=None)

    def _post(self, path: str, request, response_type):
        if self._http is None:
            return {
                "/trial": ops.execute_trial,
                "/sweep": ops.execute_sweep,
                "/trace": ops.execute_trace,
            }[path](request)
        reply = self._http.post(path, json=request.model_dump())
        reply.raise_for_status()
        return response_type.model_validate(reply.json())

    def trial(self, request: TrialRequest) -> TrialResponse:
        return self._post("/trial", request, TrialResponse)

    def sweep(self, request: SweepRequest) -> SweepResponse:
        return self._post("/sweep", request, SweepResponse)

    def trace(self, request: TraceRequest) -> TraceResponse:
        return self._post("/trace", request, TraceResponse)


def _load_setup(args) -> tuple[SystemConfig, Hyperparams, SweepSpec | None]:
    if args.config:
        config, hp, spec = parse_config(args.config)
    else:
        config, hp, spec = SystemConfig(), Hyperparams(), None
    if args.preset == "desk":
        config = desk_preset(config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.on_grid:
        updates["on_grid"] = True
    if getattr(args, "trials", None) is not None:
        updates["trials"] = args.trials
    if updates:
        from dataclasses import replace
        config = replace(config, **updates)
    if getattr(args, "methods", None):
        methods = tuple(m.strip() for m in args.methods.split(","))
        if spec is not None:
            from dataclasses import replace
            spec = replace(spec, methods=methods)
        args.methods_tuple = methods
    else:
        args.methods_tuple = spec.methods if spec else METHODS
    return config, hp, spec


def _cmd_run(args) -> int:
    config, hp, _spec = _load_setup(args)
    client = Client(args.server_url)
    print(f"{'method':<10} {'nmse_db':>10} {'iterations':>10} {'converged':>10}")
    failed = False
    for method in args.methods_tuple:
        request = TrialRequest(system=SystemConfigModel.from_config(config),
                               hyper=HyperparamsModel.from_hyperparams(hp),
                               method=method, trial=args.trial)
        row = client.trial(request).row
        if row.nmse_db is None:
            failed = True
            print(f"{method:<10} {'failed':>10} {row.iterations:>10} "
                  f"{str(row.converged).lower():>10}")
        else:
            print(f"{method:<10} {row.nmse_db:>10.2f} {row.iterations:>10} "
                  f"{str(row.converged).lower():>10}")
    return 1 if (failed and args.strict) else 0


def _cmd_sweep(args) -> int:
    config, hp, spec = _load_setup(args)
    if spec is None:
        print("error: sweep requires a config file with a [sweep] section",
              file=sys.stderr)
        return 2
    client = Client(args.server_url)
    request = SweepRequest(
        system=SystemConfigModel.from_config(config),
        hyper=HyperparamsModel.from_hyperparams(hp),
        sweep=SweepSpecModel(variable=spec.variable,
                             values=list(spec.values),
                             methods=list(args.methods_tuple)),
        jobs=args.jobs)
    rows = [m.to_row() for m in client.sweep(request).rows]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"sweep_{spec.variable}.csv"
    svg_path = out_dir / f"sweep_{spec.variable}.svg"
    write_csv(rows, csv_path)
    write_svg_plot(rows, svg_path)
    for (method, value), (mean, std, n) in sorted(summarize(rows).items()):
        print(f"{method:<10} {spec.variable}={value:<12g} "
              f"mean {mean:8.2f} dB  std {std:6.2f}  n={n}")
    print(f"wrote {csv_path} and {svg_path}")
    failed = any(math.isnan(r.nmse_linear) for r in rows)
    return 1 if (failed and args.strict) else 0


def _cmd_trace(args) -> int:
    config, hp, _spec = _load_setup(args)
    client = Client(args.server_url)
    request = TraceRequest(system=SystemConfigModel.from_config(config),
                           hyper=HyperparamsModel.from_hyperparams(hp),
                           trial=args.trial)
    response = client.trace(request)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace_path = out_dir / "trace.csv"
    write_trace_csv([
        {"iteration": e.iteration, "delta_mu_h": e.delta_mu_h,
         "delta_mu_e": e.delta_mu_e, "beta_mean": e.beta_mean,
         "elbo": math.nan if e.elbo is None else e.elbo}
        for e in response.entries], trace_path)
    nmse_db = "n/a" if response.nmse_db is None else f"{response.nmse_db:.2f} dB"
    print(f"iterations={response.iterations} "
          f"converged={str(response.converged).lower()} nmse={nmse_db}")
    print(f"wrote {trace_path}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _add_common(parser: argparse.ArgumentParser, with_trials: bool = True):
    parser.add_argument("--config", help="config file path")
    parser.add_argument("--preset", choices=("default", "desk"),
                        default="default")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--on-grid", action="store_true",
                        help="snap true angles to the dictionary grids")
    parser.add_argument("--methods", default=None,
                        help="comma-separated subset of proposed,sie,omp,ls")
    parser.add_argument("--out-dir", default=".")
    parser.add_argument("--server-url", default=None,
                        help="run against a remote service instead of in-process")
    parser.add_argument("--strict", action="store_true",
                        help="exit nonzero if any trial fails")
    if with_trials:
        parser.add_argument("--trials", type=int, default=None)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chanest",
        description="mmWave channel estimation under impulsive interference")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single trial, prints an NMSE table")
    _add_common(p_run)
    p_run.add_argument("--trial", type=int, default=0)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="config-driven parameter sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_trace = sub.add_parser("trace",
                             help="single VI run with per-iteration trace")
    _add_common(p_trace)
    p_trace.add_argument("--trial", type=int, default=0)
    p_trace.set_defaults(func=_cmd_trace)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
