"""Grid scans over driving period, asymmetry, size and coupling, plus the
structural landscape classification.

Sweep points are independent; with ``workers > 1`` they run in a process
pool and are gathered back in axis order, so output does not depend on
scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .floquet import evolve
from .lattice import Boundary, ChargerParams, Range
from .observables import detect_period, max_stored_energy

DEFAULT_KICKS = 500
PERIOD_TOL = 1e-9
MATCH_TOL = 1e-6


def default_tau_grid(step_div: int = 32) -> list[float]:
    """0 .. pi/2 in steps of pi/step_div, endpoints included."""
    return [k * math.pi / step_div for k in range(step_div // 2 + 1)]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("FQB_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SweepPoint:
    value: float
    delta_e_max: float
    n_star: int
    p_max: float
    period: int | None


@dataclass(frozen=True)
class SweepResult:
    axis: str
    points: tuple[SweepPoint, ...]
    base_params: ChargerParams
    n_max: int

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])

    @property
    def delta_e_max(self) -> np.ndarray:
        return np.array([p.delta_e_max for p in self.points])


def measure_point(params: ChargerParams, n_max: int) -> tuple[float, int, float, int | None]:
    """Run one evolution and reduce it to (dE_max, n*, P_max, period)."""
    series = evolve(params, n_max)
    peak = max_stored_energy(series)
    power = series.power[1:]
    p_max = float(power.max()) if power.size else 0.0
    return peak.delta_e_max, peak.n_star, p_max, detect_period(series, PERIOD_TOL)


def _measure(job: tuple[ChargerParams, int]) -> tuple[float, int, float, int | None]:
    return measure_point(*job)


def run_jobs(
    fn: Callable, jobs: Sequence, workers: int | None = None
) -> list:
    """Order-preserving map, in-process for a single worker."""
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


def _sorted_unique(values: Iterable[float], what: str) -> list:
    vals = sorted(values)
    if not vals:
        raise ValueError(f"{what} grid is empty")
    for a, b in zip(vals, vals[1:]):
        if a == b:
            raise ValueError(f"duplicate {what} value {a}")
    return vals


def _sweep(
    axis: str,
    base: ChargerParams,
    values: Sequence,
    make: Callable[[ChargerParams, float], ChargerParams],
    n_max: int,
    workers: int | None,
) -> SweepResult:
    jobs = [(make(base, v), n_max) for v in values]
    results = run_jobs(_measure, jobs, workers)
    points = tuple(SweepPoint(v, *r) for v, r in zip(values, results))
    return SweepResult(axis, points, base, n_max)


def sweep_tau(
    base: ChargerParams,
    grid: Sequence[float] | None = None,
    n_max: int = DEFAULT_KICKS,
    workers: int | None = None,
) -> SweepResult:
    """Symmetric protocol ``tau0 = tau1 = tau`` over ``grid``."""
    values = _sorted_unique(default_tau_grid() if grid is None else grid, "tau")
    if values[0] < 0:
        raise ValueError("tau grid values must be >= 0")
    return _sweep("tau", base, values, lambda p, v: replace(p, tau0=v, tau1=v), n_max, workers)


def sweep_asymmetric(
    base: ChargerParams,
    fixed: str,
    fixed_value: float,
    grid: Sequence[float] | None = None,
    n_max: int = DEFAULT_KICKS,
    workers: int | None = None,
) -> SweepResult:
    """Hold one interval at ``fixed_value`` and scan the other."""
    if fixed not in ("tau0", "tau1"):
        raise ValueError(f"fixed must be 'tau0' or 'tau1', got {fixed!r}")
    varied = "tau1" if fixed == "tau0" else "tau0"
    values = _sorted_unique(default_tau_grid() if grid is None else grid, varied)
    if values[0] < 0 or fixed_value < 0:
        raise ValueError("durations must be >= 0")
    base = replace(base, **{fixed: fixed_value})
    return _sweep(varied, base, values, lambda p, v: replace(p, **{varied: v}), n_max, workers)


def sweep_size(
    base: ChargerParams,
    sizes: Sequence[int],
    n_max: int = DEFAULT_KICKS,
    workers: int | None = None,
) -> SweepResult:
    values = _sorted_unique((int(n) for n in sizes), "size")
    if values[0] < 2:
        raise ValueError("sizes must be >= 2")
    return _sweep("size", base, values, lambda p, v: replace(p, N=v), n_max, workers)


def sweep_coupling(
    base: ChargerParams,
    J_grid: Sequence[float],
    n_max: int = DEFAULT_KICKS,
    workers: int | None = None,
) -> SweepResult:
    values = _sorted_unique(J_grid, "coupling")
    return _sweep("coupling", base, values, lambda p, v: replace(p, J=v), n_max, workers)


# --- structural landscape ----------------------------------------------------


@dataclass(frozen=True)
class Prediction:
    """Expected dE_max: exact value, closed range, or strict upper bound."""

    source: str
    kind: str  # "exact" | "range" | "below"
    lo: float
    hi: float
    label: str

    def matches(self, value: float, tol: float = MATCH_TOL) -> bool:
        if self.kind == "exact":
            return abs(value - self.lo) <= tol
        if self.kind == "range":
            return self.lo - tol <= value <= self.hi + tol
        return value < self.hi - tol


@dataclass(frozen=True)
class Cell:
    range: Range
    integrable: bool
    boundary: Boundary

    @property
    def name(self) -> str:
        dyn = "int" if self.integrable else "nonint"
        return f"{self.range.value}-{dyn}-{self.boundary.value}"

    def params(self, N: int) -> ChargerParams:
        return ChargerParams(
            N=N, h_x=0.0 if self.integrable else 1.0, boundary=self.boundary, range=self.range
        )


CELLS: tuple[Cell, ...] = tuple(
    Cell(r, integ, b)
    for r in (Range.LONG, Range.NEAREST)
    for integ in (True, False)
    for b in (Boundary.PBC, Boundary.OBC)
)


def _close(a: float, b: float) -> bool:
    return abs(a - b) < 1e-9


def predictions(cell: Cell, N: int, tau: float, omega: float = 1.0) -> list[Prediction]:
    """Reference expectations for one landscape cell at symmetric period ``tau``.

    ``source="landscape"`` is the structural summary; ``source="size-scan"``
    marks the competing even-N claim for the NN integrable PBC cell at pi/4.
    """
    full = 2 * omega * N
    half_pi, quarter_pi = math.pi / 2, math.pi / 4
    at_half = _close(tau, half_pi)
    at_quarter = _close(tau, quarter_pi)

    def exact(v: float, label: str, source: str = "landscape") -> Prediction:
        return Prediction(source, "exact", v, v, label)

    span = Prediction("landscape", "range", 0.0, full, "0 ~ 2wN")
    below = Prediction("landscape", "below", 0.0, full, "< 2wN")
    quarter = (
        exact(full, "2wN (N=4m)") if N % 4 == 0 else exact(omega * N, "wN (N!=4m)")
    )

    if cell.range is Range.LONG:
        if cell.boundary is Boundary.OBC:
            return [span]
        if at_half:
            return [exact(full, "2wN (even N)") if N % 2 == 0 else exact(omega * N, "wN (odd N)")]
        return [span] if tau < half_pi else []

    if cell.integrable and cell.boundary is Boundary.PBC:
        out = [span]
        if at_half:
            out.append(exact(0.0, "0"))
        if at_quarter:
            out.append(quarter)
            alt = full if N % 2 == 0 else omega * N
            out.append(exact(alt, "2wN (even N)" if N % 2 == 0 else "wN (odd N)", "size-scan"))
        return out
    if cell.integrable:
        if at_half:
            return [exact(omega * N / 2, "wN/2")]
        if at_quarter:
            return [exact(omega * N, "wN")]
        return [below] if 0 < tau < half_pi else []
    if at_quarter:
        return [quarter]
    if at_half:
        if cell.boundary is Boundary.PBC:
            return [exact(full, "2wN")]
        return [exact(1.5 * omega * N, "3wN/2")]
    return [below] if 0 < tau < half_pi else []


@dataclass(frozen=True)
class LandscapeRow:
    cell: str
    tau: float
    delta_e_max: float
    source: str | None
    expected: str | None
    match: bool | None


def landscape_table(
    N: int,
    n_max: int = DEFAULT_KICKS,
    grid: Sequence[float] | None = None,
    workers: int | None = None,
) -> list[LandscapeRow]:
    """Measure dE_max for all eight structural cells over the tau grid and
    compare each point with the reference expectations."""
    if N > 12:
        raise ValueError(f"landscape table capped at N=12, got {N}")
    taus = _sorted_unique(default_tau_grid() if grid is None else grid, "tau")
    # the two distinguished periods are always evaluated
    for extra in (math.pi / 4, math.pi / 2):
        if not any(_close(extra, t) for t in taus):
            taus.append(extra)
    taus.sort()
    jobs = [
        (replace(cell.params(N), tau0=t, tau1=t), n_max) for cell in CELLS for t in taus
    ]
    measured = run_jobs(_measure, jobs, workers)
    rows: list[LandscapeRow] = []
    k = 0
    for cell in CELLS:
        for t in taus:
            value = measured[k][0]
            k += 1
            preds = predictions(cell, N, t)
            if not preds:
                rows.append(LandscapeRow(cell.name, t, value, None, None, None))
            for pred in preds:
                rows.append(
                    LandscapeRow(cell.name, t, value, pred.source, pred.label, pred.matches(value))
                )
    return rows
