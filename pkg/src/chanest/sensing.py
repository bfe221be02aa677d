"""Pilots, stacked observations, and the Kronecker-structured sensing matrix.

Vectorization is column-major throughout: vec(Y)[(t)*N_r + r] = Y[r, t].
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .geometry import ArrayGeometry, Dictionary, GeometricChannel

_QPSK = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)


@dataclass(frozen=True)
class PilotMatrix:
    """QPSK pilot block S (N_t x T); every symbol has |s|^2 = P exactly."""
    matrix: np.ndarray
    per_symbol_power_watt: float

    def __post_init__(self):
        power = np.abs(self.matrix) ** 2
        if not np.allclose(power, self.per_symbol_power_watt, rtol=1e-12):
            raise ValueError("pilot symbols must all have |s|^2 = P")


def generate_pilots(rng: np.random.Generator, n_t: int, t: int,
                    p_watt: float) -> PilotMatrix:
    if p_watt <= 0:
        raise ValueError("p_watt must be positive")
    symbols = _QPSK[rng.integers(0, 4, size=(n_t, t))]
    return PilotMatrix(matrix=np.sqrt(p_watt) * symbols,
                       per_symbol_power_watt=p_watt)


def build_sensing_matrix(pilots: PilotMatrix, dict_tx: Dictionary,
                         dict_rx: Dictionary) -> np.ndarray:
    """(S^T conj(A_B)) kron A_U, mapping vec(H) to the noise-free vec(Y)."""
    s = pilots.matrix
    if s.shape[0] != dict_tx.geometry.num_elements:
        raise ValueError("pilot rows must match the transmit array size")
    return np.kron(s.T @ dict_tx.matrix.conj(), dict_rx.matrix)


@dataclass
class SensingProblem:
    """Vectorized observation plus ground truth for scoring.

    truth_h is the sparse angular coefficient vector in on-grid mode and
    zero-filled otherwise.
    """
    y: np.ndarray
    phi: np.ndarray
    truth_h: np.ndarray
    truth_dense: np.ndarray
    truth_e: np.ndarray
    noise_variance: float
    dict_rx: Dictionary
    dict_tx: Dictionary
    _gram: np.ndarray | None = field(default=None, repr=False)

    @property
    def gram(self) -> np.ndarray:
        """Phi^H Phi, computed once and cached."""
        if self._gram is None:
            self._gram = self.phi.conj().T @ self.phi
        return self._gram

    @property
    def num_measurements(self) -> int:
        return self.y.size

    @property
    def num_coefficients(self) -> int:
        return self.phi.shape[1]


def observe(channel: GeometricChannel, pilots: PilotMatrix,
            impulse_matrix: np.ndarray, noise_matrix: np.ndarray,
            dict_rx: Dictionary, dict_tx: Dictionary, noise_variance: float,
            on_grid: bool = False) -> SensingProblem:
    """Stack Y = H_bar S + E + N and vectorize into a SensingProblem."""
    n_r, n_t = channel.dense.shape
    t = pilots.matrix.shape[1]
    if pilots.matrix.shape[0] != n_t:
        raise ValueError("pilot rows must match the channel's transmit size")
    for name, mat in (("impulse", impulse_matrix), ("noise", noise_matrix)):
        if mat.shape != (n_r, t):
            raise ValueError(f"{name} matrix must be N_r x T, got {mat.shape}")

    y_mat = channel.dense @ pilots.matrix + impulse_matrix + noise_matrix
    phi = build_sensing_matrix(pilots, dict_tx, dict_rx)
    m = dict_rx.size * dict_tx.size
    truth_h = np.zeros(m, dtype=complex)
    if on_grid:
        scale = np.sqrt(n_r * n_t / channel.num_paths)
        for gain, ca, cd in zip(channel.gains, channel.aoa_cosines,
                                channel.aod_cosines):
            i = int(np.argmin(np.abs(dict_rx.grid_cosines - ca)))
            k = int(np.argmin(np.abs(dict_tx.grid_cosines - cd)))
            truth_h[i + k * dict_rx.size] += scale * gain
    return SensingProblem(
        y=y_mat.flatten(order="F"),
        phi=phi,
        truth_h=truth_h,
        truth_dense=channel.dense.copy(),
        truth_e=impulse_matrix.flatten(order="F"),
        noise_variance=float(noise_variance),
        dict_rx=dict_rx,
        dict_tx=dict_tx,
    )


_MAGIC = b"SNSP"
_VERSION = 1


def _write_complex(fh, arr: np.ndarray):
    flat = np.ascontiguousarray(arr).reshape(-1)
    pairs = np.empty(2 * flat.size, dtype="<f8")
    pairs[0::2] = flat.real
    pairs[1::2] = flat.imag
    fh.write(pairs.tobytes())


def _read_complex(fh, shape) -> np.ndarray:
    count = 2 * int(np.prod(shape))
    pairs = np.frombuffer(fh.read(8 * count), dtype="<f8")
    return (pairs[0::2] + 1j * pairs[1::2]).reshape(shape)


def dump_problem(problem: SensingProblem, path) -> None:
    """Binary debug dump: dims header then row-major complex-pair payload.

    Layout (little-endian): magic 'SNSP', u32 version, six i64 dims
    (Q, M, N_r, N_t, D_U, D_B), f64 noise variance, two f64 array spacings,
    then real/imag-interleaved f64 arrays: y, phi, truth_h, truth_dense,
    truth_e, the two grid-cosine vectors, and the two dictionary matrices.
    """
    q = problem.num_measurements
    m = problem.num_coefficients
    n_r, n_t = problem.truth_dense.shape
    d_u, d_b = problem.dict_rx.size, problem.dict_tx.size
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fh.write(struct.pack("<6q", q, m, n_r, n_t, d_u, d_b))
        fh.write(struct.pack("<3d", problem.noise_variance,
                             problem.dict_rx.geometry.spacing_over_wavelength,
                             problem.dict_tx.geometry.spacing_over_wavelength))
        _write_complex(fh, problem.y)
        _write_complex(fh, problem.phi)
        _write_complex(fh, problem.truth_h)
        _write_complex(fh, problem.truth_dense)
        _write_complex(fh, problem.truth_e)
        fh.write(np.ascontiguousarray(problem.dict_rx.grid_cosines,
                                      dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(problem.dict_tx.grid_cosines,
                                      dtype="<f8").tobytes())
        _write_complex(fh, problem.dict_rx.matrix)
        _write_complex(fh, problem.dict_tx.matrix)


def load_problem(path) -> SensingProblem:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a sensing-problem dump")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported dump version {version}")
        q, m, n_r, n_t, d_u, d_b = struct.unpack("<6q", fh.read(48))
        noise_variance, rx_spacing, tx_spacing = struct.unpack("<3d", fh.read(24))
        y = _read_complex(fh, (q,))
        phi = _read_complex(fh, (q, m))
        truth_h = _read_complex(fh, (m,))
        truth_dense = _read_complex(fh, (n_r, n_t))
        truth_e = _read_complex(fh, (q,))
        rx_grid = np.frombuffer(fh.read(8 * d_u), dtype="<f8").copy()
        tx_grid = np.frombuffer(fh.read(8 * d_b), dtype="<f8").copy()
        rx_mat = _read_complex(fh, (n_r, d_u))
        tx_mat = _read_complex(fh, (n_t, d_b))
    dict_rx = Dictionary(ArrayGeometry(n_r, rx_spacing), rx_grid, rx_mat)
    dict_tx = Dictionary(ArrayGeometry(n_t, tx_spacing), tx_grid, tx_mat)
    return SensingProblem(y=y, phi=phi, truth_h=truth_h,
                          truth_dense=truth_dense, truth_e=truth_e,
                          noise_variance=noise_variance,
                          dict_rx=dict_rx, dict_tx=dict_tx)
