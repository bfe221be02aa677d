"""Scenario configuration, estimator hyperparameters, and sweep definitions.

The config file format is a minimal INI dialect: ``[system]``, ``[hyper]``
and ``[sweep]`` sections with one ``key = value`` pair per line.  Unset keys
fall back to the defaults below (16x4 array, 28 GHz, -174 dBm/Hz over
100 MHz, P = 30 dBm, T = 200, c2 = 0.1, eta = 1e5).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

SWEEP_VARIABLES = ("T", "P_dbm", "c2", "eta")
METHODS = ("proposed", "sie", "omp", "ls")


class ConfigError(ValueError):
    """Invalid configuration file or parameter set."""


@dataclass(frozen=True)
class SystemConfig:
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
    c2: float = 0.1
    eta: float = 1e5
    on_grid: bool = False
    seed: int = 0
    trials: int = 100
    record_timing: bool = True
    # Overrides the PSD-derived noise variance; 0 disables AWGN entirely.
    noise_variance_override: float | None = None

    def __post_init__(self):
        for name in ("n_t", "n_r", "d_u", "d_b", "t", "l", "trials"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        for name in ("fc_hz", "bandwidth_hz", "distance_m", "eta"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.d_u < self.n_r:
            raise ConfigError("d_u must be >= n_r")
        if self.d_b < self.n_t:
            raise ConfigError("d_b must be >= n_t")
        if not 0.0 <= self.c2 < 1.0:
            raise ConfigError("c2 must be in [0, 1)")
        if self.noise_variance_override is not None and self.noise_variance_override < 0:
            raise ConfigError("noise_variance_override must be >= 0")


@dataclass(frozen=True)
class Hyperparams:
    a: float = 1e-6
    b: float = 1e-6
    eps_h: float = 1e-3
    eps_e: float = 1e-3
    max_iters: int = 200

    def __post_init__(self):
        for name in ("a", "b", "eps_h", "eps_e"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple[float, ...]
    methods: tuple[str, ...] = METHODS

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep variable must be one of {SWEEP_VARIABLES}")
        if not self.values:
            raise ConfigError("sweep values must be non-empty")
        diffs = [b - a for a, b in zip(self.values, self.values[1:])]
        if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            if len(self.values) > 1:
                raise ConfigError("sweep values must be strictly monotone")
        if not self.methods:
            raise ConfigError("sweep methods must be non-empty")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}; expected one of {METHODS}")


def desk_preset(config: SystemConfig | None = None) -> SystemConfig:
    """Small-scale preset used for fast experiment and acceptance runs."""
    base = config if config is not None else SystemConfig()
    return replace(base, n_t=8, n_r=2, d_u=4, d_b=16, t=50, trials=50)


# key -> (target section object name, attribute, parser)
def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_SYSTEM_KEYS = {
    "n_t": int, "n_r": int, "d_u": int, "d_b": int, "t": int, "l": int,
    "fc_hz": float, "bandwidth_hz": float, "distance_m": float,
    "psd_dbm_per_hz": float, "p_dbm": float, "c2": float, "eta": float,
    "on_grid": _parse_bool, "seed": int, "trials": int,
    "record_timing": _parse_bool, "noise_variance_override": float,
}
_HYPER_KEYS = {"a": float, "b": float, "eps_h": float, "eps_e": float,
               "max_iters": int}
_SWEEP_KEYS = {"variable": str, "values": None, "methods": None}


def parse_config(path) -> tuple[SystemConfig, Hyperparams, SweepSpec | None]:
    """Parse a config file; unset keys take the default scenario values.

    Raises ConfigError naming the offending key and line on unknown keys,
    type mismatches, or invariant violations.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()

    section = None
    system_kv: dict = {}
    hyper_kv: dict = {}
    sweep_kv: dict = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("system", "hyper", "sweep"):
                raise ConfigError(
                    f"{path}:{lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if section is None:
            raise ConfigError(
                f"{path}:{lineno}: key outside of a [section] header")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        table = {"system": _SYSTEM_KEYS, "hyper": _HYPER_KEYS,
                 "sweep": _SWEEP_KEYS}[section]
        if key not in table:
            raise ConfigError(
                f"{path}:{lineno}: unknown key {key!r} in [{section}]")
        target = {"system": system_kv, "hyper": hyper_kv,
                  "sweep": sweep_kv}[section]
        try:
            target[key] = _convert(section, key, value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: key {key!r}: {exc}") from exc

    try:
        system = SystemConfig(**system_kv)
        hyper = Hyperparams(**hyper_kv)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    sweep = None
    if sweep_kv:
        if "variable" not in sweep_kv or "values" not in sweep_kv:
            raise ConfigError(
                f"{path}: [sweep] requires both 'variable' and 'values'")
        try:
            sweep = SweepSpec(**sweep_kv)
        except ConfigError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return system, hyper, sweep


def _convert(section: str, key: str, value: str):
    if section == "sweep":
        if key == "values":
            return tuple(float(v.strip()) for v in value.split(",") if v.strip())
        if key == "methods":
            return tuple(m.strip() for m in value.split(",") if m.strip())
        return value
    parser = {"system": _SYSTEM_KEYS, "hyper": _HYPER_KEYS}[section][key]
    return parser(value)
