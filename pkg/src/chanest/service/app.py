"""FastAPI wrapper around the estimator and sweep harness."""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..config import ConfigError
from ..vi import EstimationError
from . import ops
from .schemas import (SweepRequest, SweepResponse, TraceRequest, TraceResponse,
                      TrialRequest, TrialResponse)


def create_app() -> FastAPI:
    app = FastAPI(title="chanest",
                  description="mmWave channel estimation under impulsive "
                              "interference: trials, sweeps, and VI traces")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/trial", response_model=TrialResponse)
    def trial(request: TrialRequest) -> TrialResponse:
        try:
            return ops.execute_trial(request)
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(request: SweepRequest) -> SweepResponse:
        try:
            return ops.execute_sweep(request)
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.post("/trace", response_model=TraceResponse)
    def trace(request: TraceRequest) -> TraceResponse:
        try:
            return ops.execute_trace(request)
        except (ConfigError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except EstimationError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc

    return app


app = create_app()
