"""Dense reference propagation for checking the transform-based fast path.

Hamiltonians are assembled as explicit z-basis matrices and exponentiated by a
scaled Taylor series, so nothing here relies on the x-basis diagonalisation.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterator, NamedTuple

import numpy as np

from .angles import parse_angle
from .floquet import apply_kick, build_floquet
from .lattice import ChargerParams, build_bond_table, magnetization_table
from .statevector import ground_state

MAX_DENSE_SITES = 10
MAX_VALIDATE_SITES = 8


class DenseOperators(NamedTuple):
    Hxx: np.ndarray
    Hx: np.ndarray
    Hz: np.ndarray


def build_dense_operators(params: ChargerParams) -> DenseOperators:
    N = params.N
    if N > MAX_DENSE_SITES:
        raise ValueError(f"dense operators capped at N={MAX_DENSE_SITES}, got N={N}")
    dim = 1 << N
    cols = np.arange(dim)
    Hz = np.diag(magnetization_table(N)).astype(np.complex128)
    Hx = np.zeros((dim, dim), dtype=np.complex128)
    for j in range(N):
        Hx[cols ^ (1 << j), cols] += 1.0
    Hxx = np.zeros((dim, dim), dtype=np.complex128)
    for bond in build_bond_table(params).bonds:
        Hxx[cols ^ (1 << bond.i) ^ (1 << bond.j), cols] += bond.w
    return DenseOperators(Hxx, Hx, Hz)


def dense_expm(H: np.ndarray, t: float, tol: float = 1e-12) -> np.ndarray:
    """``exp(-1j * H * t)`` by Taylor series with scaling and squaring."""
    H = np.asarray(H, dtype=np.complex128)
    if not np.all(np.isfinite(H)) or not math.isfinite(t):
        raise ValueError("non-finite entries in dense_expm input")
    A = -1j * t * H
    norm = float(np.max(np.sum(np.abs(A), axis=1))) if A.size else 0.0
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    B = A / 2.0**s
    dim = A.shape[0]
    result = np.eye(dim, dtype=np.complex128)
    term = np.eye(dim, dtype=np.complex128)
    term_tol = tol * 2.0 ** (-s)
    k = 0
    while True:
        k += 1
        term = term @ B / k
        result += term
        if float(np.max(np.sum(np.abs(term), axis=1))) <= term_tol:
            break
        if k > 200:
            raise RuntimeError("Taylor series failed to converge")
    for _ in range(s):
        result = result @ result
    return result


def dense_floquet(params: ChargerParams, tol: float = 1e-12) -> np.ndarray:
    ops = build_dense_operators(params)
    kick = dense_expm(params.J * ops.Hxx + params.h_x * ops.Hx, params.tau0, tol)
    field = dense_expm(params.h_z * ops.Hz, params.tau1, tol)
    return field @ kick


@dataclass(frozen=True)
class ValidationReport:
    params: ChargerParams
    n_kicks: int
    max_amp_dev: float
    max_energy_dev: float
    passed: bool


def cross_validate(params: ChargerParams, n_kicks: int, tol: float = 1e-10) -> ValidationReport:
    """Evolve the ground state both ways and compare after every kick."""
    if params.N > MAX_VALIDATE_SITES:
        raise ValueError(f"cross-validation capped at N={MAX_VALIDATE_SITES}, got N={params.N}")
    U = dense_floquet(params)
    F = build_floquet(params)
    fast = ground_state(params.N, params.omega)
    dense = fast.amps.copy()
    m = magnetization_table(params.N)
    amp_dev = energy_dev = 0.0
    for _ in range(n_kicks):
        apply_kick(fast, F)
        dense = U @ dense
        amp_dev = max(amp_dev, float(np.max(np.abs(fast.amps - dense))))
        e_fast = params.omega * float(fast.probabilities() @ m)
        e_dense = params.omega * float((np.abs(dense) ** 2) @ m)
        energy_dev = max(energy_dev, abs(e_fast - e_dense))
    return ValidationReport(params, n_kicks, amp_dev, energy_dev, amp_dev <= tol)


def load_validation_manifest() -> dict:
    text = resources.files("fqb").joinpath("data/validation_grid.json").read_text()
    return json.loads(text)


def validation_grid(max_sites: int = 6, manifest: dict | None = None) -> Iterator[ChargerParams]:
    """Parameter points of the pinned validation manifest with ``N <= max_sites``."""
    m = manifest if manifest is not None else load_validation_manifest()
    taus = [parse_angle(t) for t in m["taus"]]
    for N, boundary, rng, hx, J, tau0, tau1 in itertools.product(
        m["sites"], m["boundaries"], m["ranges"], m["h_x"], m["J"], taus, taus
    ):
        if N > max_sites:
            continue
        yield ChargerParams(
            N=N, J=J, h_x=hx, h_z=m["h_z"], omega=m["omega"],
            tau0=tau0, tau1=tau1, boundary=boundary, range=rng,
        )
