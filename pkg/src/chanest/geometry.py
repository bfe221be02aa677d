"""ULA steering vectors, angular dictionaries, and geometric channels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig

SPEED_OF_LIGHT = 2.99792458e8


@dataclass(frozen=True)
class ArrayGeometry:
    num_elements: int
    spacing_over_wavelength: float = 0.5

    def __post_init__(self):
        if self.num_elements < 1:
            raise ValueError("num_elements must be >= 1")
        if self.spacing_over_wavelength <= 0:
            raise ValueError("spacing_over_wavelength must be positive")


def steering_vector(geometry: ArrayGeometry, direction_cosine: float) -> np.ndarray:
    """Unit-norm ULA response for a plane wave with the given direction cosine.

    Element k carries phase 2*pi*(d/lambda)*k*cos(theta).
    """
    if abs(direction_cosine) > 1:
        raise ValueError("direction cosine must satisfy |cos| <= 1")
    n = geometry.num_elements
    k = np.arange(n)
    phase = 2.0 * np.pi * geometry.spacing_over_wavelength * k * direction_cosine
    return np.exp(1j * phase) / np.sqrt(n)


@dataclass(frozen=True)
class Dictionary:
    """Overcomplete grid of steering vectors (columns are unit norm)."""
    geometry: ArrayGeometry
    grid_cosines: np.ndarray
    matrix: np.ndarray

    @property
    def size(self) -> int:
        return self.matrix.shape[1]


def build_dictionary(geometry: ArrayGeometry, grid_size: int) -> Dictionary:
    """Dictionary on a uniform direction-cosine grid, -1 + 2*i/D.

    Uniform cosine spacing makes the square half-wavelength case a unitary
    DFT matrix.
    """
    if grid_size < geometry.num_elements:
        raise ValueError("grid_size must be >= num_elements")
    grid = -1.0 + 2.0 * np.arange(grid_size) / grid_size
    cols = [steering_vector(geometry, c) for c in grid]
    return Dictionary(geometry=geometry, grid_cosines=grid,
                      matrix=np.stack(cols, axis=1))


def snap_to_grid(cosines: np.ndarray, grid_size: int) -> np.ndarray:
    """Round direction cosines to the nearest uniform-grid point."""
    idx = np.round((np.asarray(cosines) + 1.0) * grid_size / 2.0).astype(int)
    idx %= grid_size
    return -1.0 + 2.0 * idx / grid_size


@dataclass(frozen=True)
class GeometricChannel:
    """Path-level ground truth plus the assembled dense N_r x N_t matrix."""
    num_paths: int
    gains: np.ndarray
    aoa_cosines: np.ndarray
    aod_cosines: np.ndarray
    dense: np.ndarray


@dataclass(frozen=True)
class AngularChannel:
    matrix: np.ndarray


def assemble_dense(rx: ArrayGeometry, tx: ArrayGeometry, gains, aoa_cosines,
                   aod_cosines) -> np.ndarray:
    gains = np.asarray(gains)
    num_paths = gains.size
    scale = np.sqrt(rx.num_elements * tx.num_elements / num_paths)
    dense = np.zeros((rx.num_elements, tx.num_elements), dtype=complex)
    for g, ca, cd in zip(gains, aoa_cosines, aod_cosines):
        a_r = steering_vector(rx, ca)
        a_t = steering_vector(tx, cd)
        dense += g * np.outer(a_r, a_t.conj())
    return scale * dense


def free_space_path_gain(fc_hz: float, distance_m: float) -> float:
    """Linear free-space amplitude 10^(-FSPL_dB/20) at carrier fc and range d."""
    if fc_hz <= 0 or distance_m <= 0:
        raise ValueError("fc_hz and distance_m must be positive")
    fspl_db = 20.0 * np.log10(4.0 * np.pi * distance_m * fc_hz / SPEED_OF_LIGHT)
    return float(10.0 ** (-fspl_db / 20.0))


def sample_geometric_channel(rng: np.random.Generator, config: SystemConfig, *,
                             gains=None, aoa_cosines=None,
                             aod_cosines=None) -> GeometricChannel:
    """Draw a multipath channel with uniform-in-cosine angles.

    Angles are continuous (off-grid) unless config.on_grid snaps them to the
    dictionary grids.  Path gains are complex Gaussian scaled by the
    free-space amplitude; pass explicit gains/cosines to pin a realization.
    """
    rx = ArrayGeometry(config.n_r)
    tx = ArrayGeometry(config.n_t)
    num_paths = config.l
    if aoa_cosines is None:
        aoa_cosines = rng.uniform(-1.0, 1.0, num_paths)
    if aod_cosines is None:
        aod_cosines = rng.uniform(-1.0, 1.0, num_paths)
    aoa_cosines = np.asarray(aoa_cosines, dtype=float)
    aod_cosines = np.asarray(aod_cosines, dtype=float)
    if config.on_grid:
        aoa_cosines = snap_to_grid(aoa_cosines, config.d_u)
        aod_cosines = snap_to_grid(aod_cosines, config.d_b)
    if gains is None:
        rho = free_space_path_gain(config.fc_hz, config.distance_m)
        gains = rho * (rng.standard_normal(num_paths)
                       + 1j * rng.standard_normal(num_paths)) / np.sqrt(2.0)
    gains = np.asarray(gains, dtype=complex)
    dense = assemble_dense(rx, tx, gains, aoa_cosines, aod_cosines)
    return GeometricChannel(num_paths=num_paths, gains=gains,
                            aoa_cosines=aoa_cosines, aod_cosines=aod_cosines,
                            dense=dense)


def angular_expand(h_ang: AngularChannel | np.ndarray, dict_rx: Dictionary,
                   dict_tx: Dictionary) -> np.ndarray:
    """Map an angular-domain channel back to the dense antenna domain."""
    matrix = h_ang.matrix if isinstance(h_ang, AngularChannel) else np.asarray(h_ang)
    if matrix.shape != (dict_rx.size, dict_tx.size):
        raise ValueError(
            f"angular channel shape {matrix.shape} does not match "
            f"dictionaries ({dict_rx.size}, {dict_tx.size})")
    return dict_rx.matrix @ matrix @ dict_tx.matrix.conj().T
