"""Charger geometry and classical diagonal energies on basis bit patterns.

Bit convention, shared by every module: bit ``j`` of a basis index (bit 0 is the
least significant) holds site ``j`` (0-based; site ``j + 1`` in user-facing
output). A bit value of 0 means local eigenvalue +1, a bit value of 1 means -1.
The same convention applies in the z-product and x-product bases.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


class Boundary(str, enum.Enum):
    PBC = "pbc"
    OBC = "obc"


class Range(str, enum.Enum):
    LONG = "lr"
    NEAREST = "nn"


@dataclass(frozen=True)
class ChargerParams:
    """Physical and protocol configuration of one charging run.

    ``tau0`` is the duration of the ``J*H_xx + h_x*H_x`` step, ``tau1`` the
    duration of the ``h_z*H_z`` step. The period is always ``tau0 + tau1``.
    """

    N: int
    J: float = 1.0
    h_x: float = 0.0
    h_z: float = 1.0
    omega: float = 1.0
    tau0: float = math.pi / 2
    tau1: float = math.pi / 2
    boundary: Boundary = Boundary.PBC
    range: Range = Range.LONG
    antipodal_halving: bool = False

    def __post_init__(self) -> None:
        # normalise enum-like inputs so ChargerParams(N=4, boundary="obc") works
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        object.__setattr__(self, "range", Range(self.range))
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise ValueError(f"N must be an integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        for name in ("J", "h_x", "h_z", "omega", "tau0", "tau1"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.tau0 < 0 or self.tau1 < 0:
            raise ValueError(f"tau0 and tau1 must be >= 0, got {self.tau0}, {self.tau1}")

    @property
    def T(self) -> float:
        return self.tau0 + self.tau1

    @property
    def integrable(self) -> bool:
        return self.h_x == 0.0

    def canonical(self) -> str:
        """Single-line ``key=value`` serialization; floats use ``repr`` so it round-trips."""
        return " ".join(
            [
                f"N={self.N}",
                f"J={self.J!r}",
                f"h_x={self.h_x!r}",
                f"h_z={self.h_z!r}",
                f"omega={self.omega!r}",
                f"tau0={self.tau0!r}",
                f"tau1={self.tau1!r}",
                f"boundary={self.boundary.value}",
                f"range={self.range.value}",
                f"antipodal_halving={str(self.antipodal_halving).lower()}",
            ]
        )

    @classmethod
    def from_canonical(cls, text: str) -> ChargerParams:
        fields: dict[str, object] = {}
        for token in text.split():
            key, _, value = token.partition("=")
            if key == "N":
                fields[key] = int(value)
            elif key in ("boundary", "range"):
                fields[key] = value
            elif key == "antipodal_halving":
                fields[key] = value == "true"
            else:
                fields[key] = float(value)
        return cls(**fields)  # type: ignore[arg-type]


@dataclass(frozen=True)
class Bond:
    i: int
    j: int
    w: float


@dataclass(frozen=True)
class BondTable:
    N: int
    bonds: tuple[Bond, ...]
    boundary: Boundary
    range: Range
    _pairs: tuple[np.ndarray, np.ndarray, np.ndarray] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        i = np.array([b.i for b in self.bonds], dtype=np.int64)
        j = np.array([b.j for b in self.bonds], dtype=np.int64)
        w = np.array([b.w for b in self.bonds], dtype=np.float64)
        object.__setattr__(self, "_pairs", (i, j, w))

    @property
    def total_weight(self) -> float:
        return float(sum(b.w for b in self.bonds))

    def __len__(self) -> int:
        return len(self.bonds)


def long_range_cutoff(N: int) -> int:
    """Maximum separation K of the periodic long-range sum."""
    return (N - 1) // 2 if N % 2 else N // 2


def build_bond_table(params: ChargerParams) -> BondTable:
    """Enumerate the weighted pairs of ``H_xx`` exactly as the double sum is written.

    Under PBC with even N the separation ``N/2`` pair is reached from both of
    its sites, so it carries total weight ``2 * 2**(1 - N/2)`` unless
    ``params.antipodal_halving`` is set.
    """
    N = params.N
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    bonds: list[Bond] = []
    if params.range is Range.NEAREST:
        if N < 2:
            raise ValueError("nearest-neighbour coupling needs N >= 2")
        last = N if params.boundary is Boundary.PBC else N - 1
        bonds = [Bond(j, (j + 1) % N, 1.0) for j in range(last)]
    elif params.boundary is Boundary.PBC:
        K = long_range_cutoff(N)
        for j in range(N):
            for k in range(1, K + 1):
                w = 2.0 ** (1 - k)
                if params.antipodal_halving and N % 2 == 0 and k == N // 2:
                    w /= 2
                bonds.append(Bond(j, (j + k) % N, w))
    else:
        for j in range(N - 1):
            for k in range(1, N - j):
                bonds.append(Bond(j, j + k, 2.0 ** (1 - k)))
    return BondTable(N=N, bonds=tuple(bonds), boundary=params.boundary, range=params.range)


def _spins(bits: int, N: int) -> list[int]:
    return [1 - 2 * ((bits >> j) & 1) for j in range(N)]


def interaction_energy(bits: int, table: BondTable) -> float:
    """Eigenvalue of ``H_xx`` on the x-product configuration ``bits``."""
    if not 0 <= bits < (1 << table.N):
        raise ValueError(f"bits={bits} out of range for N={table.N}")
    s = _spins(bits, table.N)
    return float(sum(b.w * s[b.i] * s[b.j] for b in table.bonds))


def magnetization(bits: int, N: int) -> int:
    if not 0 <= bits < (1 << N):
        raise ValueError(f"bits={bits} out of range for N={N}")
    return N - 2 * bin(bits).count("1")


@lru_cache(maxsize=32)
def spin_table(N: int) -> np.ndarray:
    """(2**N, N) int8 array of local eigenvalues +-1, read-only."""
    idx = np.arange(1 << N, dtype=np.int64)
    s = (1 - 2 * ((idx[:, None] >> np.arange(N)) & 1)).astype(np.int8)
    s.flags.writeable = False
    return s


@lru_cache(maxsize=32)
def magnetization_table(N: int) -> np.ndarray:
    """Magnetization of every basis index, as float64, read-only."""
    m = spin_table(N).sum(axis=1, dtype=np.int64).astype(np.float64)
    m.flags.writeable = False
    return m


def interaction_energy_table(table: BondTable) -> np.ndarray:
    """``interaction_energy`` evaluated on every basis index at once."""
    s = spin_table(table.N)
    i, j, w = table._pairs
    if len(w) == 0:
        return np.zeros(1 << table.N)
    return (s[:, i] * s[:, j]).astype(np.float64) @ w
