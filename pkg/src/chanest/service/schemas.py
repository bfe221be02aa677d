"""Pydantic request/response models mirroring the core dataclasses."""
from __future__ import annotations

import math

from pydantic import BaseModel, Field

from ..config import Hyperparams, SweepSpec, SystemConfig
from ..sweep import SweepRow


class SystemConfigModel(BaseModel):
    n_t: int = 16
    n_r: int = 4
    d_u: int = 8
    d_b: int = 32
    t: int = 200
    l: int = 3
    fc_hz: float = 28e9
    bandwidth_hz: float = 1e8
    distance_m: float = 50.0
    psd_dbm_per_hz: float = -174.0
    p_dbm: float = 30.0
    c2: float = Field(default=0.1, ge=0.0, lt=1.0)
    eta: float = Field(default=1e5, gt=0.0)
    on_grid: bool = False
    seed: int = 0
    trials: int = Field(default=100, ge=1)
    record_timing: bool = True
    noise_variance_override: float | None = None

    def to_config(self) -> SystemConfig:
        return SystemConfig(**self.model_dump())

    @classmethod
    def from_config(cls, config: SystemConfig) -> "SystemConfigModel":
        return cls(**config.__dict__)


class HyperparamsModel(BaseModel):
    a: float = 1e-6
    b: float = 1e-6
    eps_h: float = 1e-3
    eps_e: float = 1e-3
    max_iters: int = 200

    def to_hyperparams(self) -> Hyperparams:
        return Hyperparams(**self.model_dump())

    @classmethod
    def from_hyperparams(cls, hp: Hyperparams) -> "HyperparamsModel":
        return cls(**hp.__dict__)


class SweepSpecModel(BaseModel):
    variable: str
    values: list[float]
    methods: list[str] = ["proposed", "sie", "omp", "ls"]

    def to_spec(self) -> SweepSpec:
        return SweepSpec(variable=self.variable, values=tuple(self.values),
                         methods=tuple(self.methods))


class SweepRowModel(BaseModel):
    method: str
    variable: str
    value: float
    trial: int
    # None encodes a failed trial (NaN is not representable in JSON).
    nmse_linear: float | None
    nmse_db: float | None
    iterations: int
    converged: bool
    wall_ms: float

    @classmethod
    def from_row(cls, row: SweepRow) -> "SweepRowModel":
        def opt(x: float) -> float | None:
            return None if math.isnan(x) else x
        return cls(method=row.method, variable=row.variable, value=row.value,
                   trial=row.trial, nmse_linear=opt(row.nmse_linear),
                   nmse_db=opt(row.nmse_db), iterations=row.iterations,
                   converged=row.converged, wall_ms=row.wall_ms)

    def to_row(self) -> SweepRow:
        def plain(x: float | None) -> float:
            return math.nan if x is None else x
        return SweepRow(method=self.method, variable=self.variable,
                        value=self.value, trial=self.trial,
                        nmse_linear=plain(self.nmse_linear),
                        nmse_db=plain(self.nmse_db),
                        iterations=self.iterations, converged=self.converged,
                        wall_ms=self.wall_ms)


class TrialRequest(BaseModel):
    system: SystemConfigModel = SystemConfigModel()
    hyper: HyperparamsModel = HyperparamsModel()
    method: str = "proposed"
    trial: int = 0


class TrialResponse(BaseModel):
    row: SweepRowModel


class SweepRequest(BaseModel):
    system: SystemConfigModel = SystemConfigModel()
    hyper: HyperparamsModel = HyperparamsModel()
    sweep: SweepSpecModel
    jobs: int = Field(default=1, ge=1)


class SweepResponse(BaseModel):
    rows: list[SweepRowModel]


class TraceEntry(BaseModel):
    iteration: int
    delta_mu_h: float
    delta_mu_e: float
    beta_mean: float
    elbo: float | None


class TraceRequest(BaseModel):
    system: SystemConfigModel = SystemConfigModel()
    hyper: HyperparamsModel = HyperparamsModel()
    trial: int = 0


class TraceResponse(BaseModel):
    nmse_linear: float | None
    nmse_db: float | None
    iterations: int
    converged: bool
    entries: list[TraceEntry]
