"""Pure-state amplitudes in the z-product basis and the kernels acting on them."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lattice import magnetization_table

INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass
class StateVector:
    N: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        self.amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.N,):
            raise ValueError(
                f"expected {1 << self.N} amplitudes for N={self.N}, got shape {self.amps.shape}"
            )

    @classmethod
    def basis(cls, N: int, index: int) -> StateVector:
        amps = np.zeros(1 << N, dtype=np.complex128)
        amps[index] = 1.0
        return cls(N, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return self.amps.real**2 + self.amps.imag**2

    def copy(self) -> StateVector:
        return StateVector(self.N, self.amps.copy())


def ground_state(N: int, omega: float) -> StateVector:
    """Ground state of ``omega * sum_j sigma^z_j``: every spin at eigenvalue -1."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if omega <= 0:
        raise ValueError(f"omega must be > 0 for a well-defined ground state, got {omega}")
    return StateVector.basis(N, (1 << N) - 1)


def fwht_inplace(psi: StateVector) -> StateVector:
    """Apply the normalised Hadamard transform on every qubit, in place.

    Iterative butterflies over strides 1, 2, 4, ...; each stage is scaled by
    1/sqrt(2) so magnitudes stay O(1). Self-inverse.
    """
    a = psi.amps
    n = a.size
    h = 1
    while h < n:
        view = a.reshape(-1, 2, h)
        lo = view[:, 0, :]
        hi = view[:, 1, :]
        lo += hi  # lo' = lo + hi
        hi *= -2.0
        hi += lo  # hi' = lo - hi
        a *= INV_SQRT2
        h *= 2
    return psi


def apply_diagonal_phase(psi: StateVector, phase: np.ndarray) -> StateVector:
    """``amps[b] *= exp(-1j * phase[b])`` in place."""
    phase = np.asarray(phase, dtype=np.float64)
    if phase.shape != psi.amps.shape:
        raise ValueError(f"phase table has shape {phase.shape}, state has {psi.amps.shape}")
    psi.amps *= np.exp(-1j * phase)
    return psi


def apply_diagonal_factors(psi: StateVector, factors: np.ndarray) -> StateVector:
    """Multiply by precomputed unit-modulus factors; the hot path of a kick."""
    np.multiply(psi.amps, factors, out=psi.amps)
    return psi


def energy_expectation_z(psi: StateVector, omega: float) -> float:
    """``<psi| omega * sum_j sigma^z_j |psi>``."""
    return float(omega * (psi.probabilities() @ magnetization_table(psi.N)))


def dump_amplitudes(psi: StateVector, path: str | Path) -> None:
    """Debug dump: little-endian int32 N, then interleaved re/im float64."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<i", psi.N))
        fh.write(psi.amps.astype("<c16").tobytes())


def load_amplitudes(path: str | Path) -> StateVector:
    raw = Path(path).read_bytes()
    (N,) = struct.unpack("<i", raw[:4])
    amps = np.frombuffer(raw[4:], dtype="<c16").astype(np.complex128)
    return StateVector(N, amps)
