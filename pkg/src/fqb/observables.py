"""Stored energy, charging power, bipartite entanglement and series statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .statevector import StateVector, energy_expectation_z

MAX_SUBSYSTEM_SITES = 12
# Above this matrix size the pure-Python sweep cost dominates; hand over to LAPACK.
JACOBI_MAX_DIM = 32
EIGENVALUE_FLOOR = 1e-14


@dataclass(frozen=True)
class BipartitionSpec:
    sites: frozenset[int]
    log_base: str = "e"

    def __post_init__(self) -> None:
        object.__setattr__(self, "sites", frozenset(int(s) for s in self.sites))
        if self.log_base not in ("e", "2"):
            raise ValueError(f"log_base must be 'e' or '2', got {self.log_base!r}")

    def check(self, N: int) -> None:
        k = len(self.sites)
        if not 1 <= k <= N - 1:
            raise ValueError(f"subsystem size must lie in [1, {N - 1}], got {k}")
        if k > MAX_SUBSYSTEM_SITES:
            raise ValueError(f"subsystem size {k} exceeds the dense cap {MAX_SUBSYSTEM_SITES}")
        bad = [s for s in self.sites if not 0 <= s < N]
        if bad:
            raise ValueError(f"sites {sorted(bad)} outside 0..{N - 1}")

    def complement(self, N: int) -> BipartitionSpec:
        return BipartitionSpec(frozenset(range(N)) - self.sites, self.log_base)


class EnergyPeak(NamedTuple):
    delta_e_max: float
    n_star: int


def stored_energy(psi: StateVector, omega: float, N: int) -> float:
    """Battery energy above the analytic ground value ``-omega * N``."""
    return energy_expectation_z(psi, omega) + omega * N


def charging_power(delta_e: float, n: int, tau0: float, tau1: float) -> float:
    if n < 0:
        raise ValueError(f"kick count must be >= 0, got {n}")
    if n == 0:
        return 0.0
    T = tau0 + tau1
    if T == 0:
        raise ValueError("zero driving period: no time elapses, power undefined")
    return delta_e / (n * T)


def reduced_density_matrix(psi: StateVector, spec: BipartitionSpec) -> np.ndarray:
    """Partial trace over the complement of ``spec.sites``.

    Row/column index of the result packs the kept sites in ascending order,
    lowest site in the least significant bit (same convention as the state).
    """
    N = psi.N
    spec.check(N)
    kept = sorted(spec.sites)
    traced = sorted(set(range(N)) - spec.sites)
    # C-order reshape puts site N-1 on axis 0; most significant kept site first
    axes = [N - 1 - s for s in reversed(kept)] + [N - 1 - s for s in reversed(traced)]
    A = psi.amps.reshape((2,) * N).transpose(axes).reshape(1 << len(kept), -1)
    return A @ A.conj().T


def jacobi_eigvalsh(
    a: np.ndarray, tol: float = 1e-13, max_sweeps: int = 100
) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.

    Stops when the off-diagonal Frobenius norm drops to ``tol * max(1, |A|_F)``
    or after ``max_sweeps`` sweeps. For a density matrix the bound is just
    ``tol``. Returns eigenvalues sorted ascending.
    """
    A = np.array(a, dtype=np.complex128, copy=True)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    stop = tol * max(1.0, float(np.linalg.norm(A)))
    for _ in range(max_sweeps):
        off = math.sqrt(max(float(np.sum(np.abs(A) ** 2) - np.sum(np.abs(np.diag(A)) ** 2)), 0.0))
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                app = A[p, p].real
                aqq = A[q, q].real
                if mag <= 1e-300 or mag < 1e-18 * (abs(app) + abs(aqq)):
                    A[p, q] = A[q, p] = 0.0
                    continue
                phase = apq / mag
                theta = (aqq - app) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # unitary on (p, q): phase-align a_pq to the real axis, then rotate
                M = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                cols = A[:, [p, q]] @ M
                A[:, p], A[:, q] = cols[:, 0], cols[:, 1]
                rows = M.conj().T @ A[[p, q], :]
                A[p, :], A[q, :] = rows[0], rows[1]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = app - t * mag
                A[q, q] = aqq + t * mag
    return np.sort(np.diag(A).real)


def density_eigenvalues(rho: np.ndarray) -> np.ndarray:
    """Spectrum of a reduced density matrix (closed form for a single qubit)."""
    n = rho.shape[0]
    if n == 2:
        a, d = rho[0, 0].real, rho[1, 1].real
        mid = 0.5 * (a + d)
        r = math.hypot(0.5 * (a - d), abs(rho[0, 1]))
        return np.array([mid - r, mid + r])
    if n <= JACOBI_MAX_DIM:
        return jacobi_eigvalsh(rho)
    return np.linalg.eigvalsh(rho)


def entropy_from_eigenvalues(lam: np.ndarray, log_base: str = "e") -> float:
    lam = np.clip(np.asarray(lam, dtype=np.float64), 0.0, 1.0)
    lam = lam[lam > EIGENVALUE_FLOOR]
    s = float(-np.sum(lam * np.log(lam)))
    if log_base == "2":
        s /= math.log(2.0)
    return max(s, 0.0)


def entanglement_entropy(psi: StateVector, spec: BipartitionSpec) -> float:
    """Von Neumann entropy of the reduced state on ``spec.sites``."""
    rho = reduced_density_matrix(psi, spec)
    return entropy_from_eigenvalues(density_eigenvalues(rho), spec.log_base)


def _delta_e(series) -> np.ndarray:
    if hasattr(series, "delta_e"):
        return np.asarray(series.delta_e, dtype=np.float64)
    return np.asarray(series, dtype=np.float64)


def max_stored_energy(series, tol: float = 1e-9) -> EnergyPeak:
    """Largest stored energy and the first kick reaching it.

    Kicks within ``tol`` of the maximum count as ties, so rounding drift
    late in a long run cannot displace an earlier exact peak.
    """
    e = _delta_e(series)
    if e.size == 0:
        raise ValueError("empty series")
    top = float(e.max())
    n_star = int(np.flatnonzero(e >= top - tol)[0])
    return EnergyPeak(top, n_star)


def detect_period(series, tol: float = 1e-9) -> int | None:
    """Smallest p with ``|dE(n+p) - dE(n)| <= tol`` for every recorded n.

    Only candidates up to half the series length are tried; ``None`` if none fit.
    """
    e = _delta_e(series)
    for p in range(1, e.size // 2 + 1):
        if np.all(np.abs(e[p:] - e[:-p]) <= tol):
            return p
    return None


def local_maxima(values: Sequence[float]) -> list[int]:
    """Indices whose value is >= both neighbours (interior points only)."""
    v = np.asarray(values, dtype=np.float64)
    if v.size < 3:
        return []
    inner = (v[1:-1] >= v[:-2]) & (v[1:-1] >= v[2:])
    return [int(i) + 1 for i in np.flatnonzero(inner)]
