"""AWGN and sporadic impulsive interference (two-component Gaussian mixture)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def dbm_to_watt(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class NoiseConfig:
    psd_dbm_per_hz: float
    bandwidth_hz: float

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")

    @property
    def variance_watt(self) -> float:
        return dbm_to_watt(self.psd_dbm_per_hz
                           + 10.0 * np.log10(self.bandwidth_hz))


@dataclass(frozen=True)
class ImpulseConfig:
    """Spike process: each entry is nonzero w.p. c2, with variance eta*sigma1^2."""
    occurrence_prob: float
    power_ratio: float
    base_variance_watt: float

    def __post_init__(self):
        if not 0.0 <= self.occurrence_prob <= 1.0:
            raise ValueError("occurrence_prob must be in [0, 1]")
        if self.power_ratio <= 0:
            raise ValueError("power_ratio must be positive")
        if self.base_variance_watt <= 0:
            raise ValueError("base_variance_watt must be positive")

    @property
    def spike_variance_watt(self) -> float:
        return self.power_ratio * self.base_variance_watt


def sample_awgn(rng: np.random.Generator, rows: int, cols: int,
                variance_watt: float) -> np.ndarray:
    """Circularly-symmetric complex Gaussian matrix with E|n|^2 = variance."""
    if variance_watt <= 0:
        raise ValueError("variance_watt must be positive")
    scale = np.sqrt(variance_watt / 2.0)
    return scale * (rng.standard_normal((rows, cols))
                    + 1j * rng.standard_normal((rows, cols)))


def sample_impulsive(rng: np.random.Generator, rows: int, cols: int,
                     cfg: ImpulseConfig) -> np.ndarray:
    """Sparse spike matrix: i.i.d. per-entry occupancy, Gaussian spike values.

    The full Gaussian field is drawn before masking so the realization is a
    deterministic function of the RNG state regardless of c2.
    """
    mask = rng.random((rows, cols)) < cfg.occurrence_prob
    scale = np.sqrt(cfg.spike_variance_watt / 2.0)
    values = scale * (rng.standard_normal((rows, cols))
                      + 1j * rng.standard_normal((rows, cols)))
    return np.where(mask, values, 0.0 + 0.0j)
