"""CSV emission and parsing, run configuration files, and SVG line plots."""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

from .angles import parse_angle
from .experiments import LandscapeRow, SweepResult
from .floquet import KickRecord, KickSeries
from .lattice import ChargerParams

FLOAT_FMT = "{:.12g}"


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return FLOAT_FMT.format(x)


def _open_for_write(path: str | Path):
    try:
        return open(path, "w", newline="\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def format_series_csv(series: KickSeries) -> str:
    buf = io.StringIO()
    with_entropy = series.entropy_spec is not None
    buf.write(f"# params: {series.params.canonical()}\n")
    if with_entropy:
        sites = " ".join(str(s + 1) for s in sorted(series.entropy_spec.sites))
        buf.write(f"# entropy: sites={sites} log_base={series.entropy_spec.log_base}\n")
    buf.write("n,delta_e,power,entropy\n" if with_entropy else "n,delta_e,power\n")
    for r in series.records:
        row = [str(r.n), _fmt(r.delta_e), _fmt(r.power)]
        if with_entropy:
            row.append(_fmt(r.entropy))
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def write_series_csv(series: KickSeries, path: str | Path) -> None:
    with _open_for_write(path) as fh:
        fh.write(format_series_csv(series))


def read_series_csv(path: str | Path) -> KickSeries:
    """Parse a file written by ``write_series_csv`` (entropy spec is not restored)."""
    params = None
    records: list[KickRecord] = []
    header: list[str] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# params:"):
            params = ChargerParams.from_canonical(line.split(":", 1)[1])
        elif line.startswith("#") or not line.strip():
            continue
        elif not header:
            header = line.split(",")
        else:
            cells = line.split(",")
            entropy = float(cells[3]) if len(cells) > 3 and cells[3] else None
            records.append(KickRecord(int(cells[0]), float(cells[1]), float(cells[2]), entropy))
    if params is None:
        raise ValueError(f"{path}: missing '# params:' line")
    return KickSeries(params, records)


def format_sweep_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    buf.write(f"# params: {result.base_params.canonical()}\n")
    buf.write(f"# axis: {result.axis} n_max: {result.n_max}\n")
    buf.write("value,delta_e_max,n_star,p_max,period\n")
    for p in result.points:
        value = str(p.value) if result.axis == "size" else _fmt(p.value)
        period = "" if p.period is None else str(p.period)
        buf.write(f"{value},{_fmt(p.delta_e_max)},{p.n_star},{_fmt(p.p_max)},{period}\n")
    return buf.getvalue()


def write_sweep_csv(result: SweepResult, path: str | Path) -> None:
    with _open_for_write(path) as fh:
        fh.write(format_sweep_csv(result))


def format_landscape_csv(rows: Sequence[LandscapeRow], N: int, n_max: int) -> str:
    buf = io.StringIO()
    buf.write(f"# landscape: N={N} n_max={n_max}\n")
    buf.write("cell,tau,delta_e_max,source,expected,match\n")
    for r in rows:
        match = "" if r.match is None else str(r.match).lower()
        buf.write(
            f"{r.cell},{_fmt(r.tau)},{_fmt(r.delta_e_max)},{r.source or ''},{r.expected or ''},{match}\n"
        )
    return buf.getvalue()


# --- run configuration ---------------------------------------------------------

PARAM_KEYS = ("N", "J", "h_x", "h_z", "omega", "tau0", "tau1", "boundary", "range", "antipodal_halving")


@dataclass
class RunConfig:
    """Everything one CLI invocation needs; round-trips through an INI document."""

    command: str
    params: ChargerParams
    n_max: int = 500
    grid: str | None = None
    fixed: str | None = None
    fixed_value: float | None = None
    sizes: list[int] | None = None
    couplings: list[float] | None = None
    entropy_sites: list[int] = field(default_factory=lambda: [1])
    log_base: str = "e"
    out: str | None = None
    plot: str | None = None
    workers: int = 1
    max_sites: int = 6

    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str  # keep "N" and "J" case-sensitive
        cp["params"] = {k: _ini_value(getattr(self.params, k)) for k in PARAM_KEYS}
        run = {}
        for f in fields(self):
            if f.name == "params":
                continue
            value = getattr(self, f.name)
            if value is None:
                continue
            run[f.name] = _ini_value(value)
        cp["run"] = run
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> RunConfig:
        raw = read_config_text(text)
        return cls(params=ChargerParams(**raw["params"]), **raw["run"])


def _ini_value(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if hasattr(value, "value"):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_ini_value(v) for v in value)
    return str(value)


_PARAM_TYPES = {"N": int, "boundary": str, "range": str}
_RUN_TYPES = {
    "command": str, "n_max": int, "grid": str, "fixed": str, "fixed_value": float,
    "sizes": list, "couplings": list, "entropy_sites": list, "log_base": str,
    "out": str, "plot": str, "workers": int, "max_sites": int,
}


def read_config_text(text: str) -> dict[str, dict]:
    """Parse an INI config into typed ``params``/``run`` dicts (unknown keys rejected)."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string(text)
    out: dict[str, dict] = {"params": {}, "run": {}}
    for section in cp.sections():
        if section not in out:
            raise ValueError(f"unknown config section [{section}]")
    if cp.has_section("params"):
        for key, value in cp["params"].items():
            if key not in PARAM_KEYS:
                raise ValueError(f"unknown config key params.{key}")
            if key == "antipodal_halving":
                out["params"][key] = cp["params"].getboolean(key)
            elif key in _PARAM_TYPES:
                out["params"][key] = _PARAM_TYPES[key](value)
            else:
                out["params"][key] = parse_angle(value)
    if cp.has_section("run"):
        for key, value in cp["run"].items():
            if key not in _RUN_TYPES:
                raise ValueError(f"unknown config key run.{key}")
            kind = _RUN_TYPES[key]
            if kind is list:
                conv = float if key == "couplings" else int
                out["run"][key] = [conv(v) for v in value.split(",") if v.strip()]
            elif kind is float:
                out["run"][key] = parse_angle(value)
            else:
                out["run"][key] = kind(value)
    return out


def read_config(path: str | Path) -> dict[str, dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return read_config_text(text)


# --- SVG ------------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 30, 55


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _series_for_plot(data) -> tuple[list[tuple[str, list[float], list[float]]], str, str]:
    if isinstance(data, KickSeries):
        return [("", data.n.astype(float).tolist(), data.delta_e.tolist())], "n", "ΔE"
    if isinstance(data, SweepResult):
        return [("", data.values.astype(float).tolist(), data.delta_e_max.tolist())], data.axis, "ΔE_max"
    lines = []
    for label, s in data:
        lines.append((str(label), s.n.astype(float).tolist(), s.delta_e.tolist()))
    return lines, "n", "ΔE"


def render_svg(data, style: str = "line", title: str | None = None) -> str:
    """Self-contained SVG of one series, one sweep, or ``[(label, series), ...]``."""
    if style not in ("line", "step"):
        raise ValueError(f"style must be 'line' or 'step', got {style!r}")
    lines, xlabel, ylabel = _series_for_plot(data)
    if not lines or not any(xs for _, xs, _ in lines):
        raise ValueError("nothing to plot")
    xs_all = [x for _, xs, _ in lines for x in xs]
    ys_all = [y for _, _, ys in lines for y in ys]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(0.0, min(ys_all)), max(ys_all)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def sx(x: float) -> float:
        return _ML + (x - x0) / (x1 - x0) * pw

    def sy(y: float) -> float:
        return _MT + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _nice_ticks(x0, x1):
        if x0 <= t <= x1:
            out.append(f'<line x1="{sx(t):.2f}" y1="{_MT + ph}" x2="{sx(t):.2f}" y2="{_MT + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{sx(t):.2f}" y="{_MT + ph + 18}" font-size="11" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y0, y1):
        if y0 <= t <= y1:
            out.append(f'<line x1="{_ML - 5}" y1="{sy(t):.2f}" x2="{_ML}" y2="{sy(t):.2f}" stroke="black"/>')
            out.append(f'<text x="{_ML - 8}" y="{sy(t) + 4:.2f}" font-size="11" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{_ML + pw / 2:.1f}" y="{_H - 12}" font-size="13" text-anchor="middle">{xlabel}</text>')
    out.append(
        f'<text x="16" y="{_MT + ph / 2:.1f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MT + ph / 2:.1f})">{ylabel}</text>'
    )
    if title:
        out.append(f'<text x="{_ML + pw / 2:.1f}" y="18" font-size="13" text-anchor="middle">{title}</text>')
    for k, (label, xs, ys) in enumerate(lines):
        color = _PALETTE[k % len(_PALETTE)]
        if len(xs) == 1:
            out.append(f'<circle cx="{sx(xs[0]):.2f}" cy="{sy(ys[0]):.2f}" r="3" fill="{color}"/>')
        else:
            pts = []
            for i, (x, y) in enumerate(zip(xs, ys)):
                if style == "step" and i:
                    pts.append(f"{sx(x):.2f},{sy(ys[i - 1]):.2f}")
                pts.append(f"{sx(x):.2f},{sy(y):.2f}")
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(pts)}"/>')
        if label:
            ly = _MT + 16 + 16 * k
            out.append(f'<line x1="{_ML + pw - 90}" y1="{ly - 4}" x2="{_ML + pw - 70}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{_ML + pw - 65}" y="{ly}" font-size="11">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg_plot(data, path: str | Path, style: str = "line", title: str | None = None) -> None:
    text = render_svg(data, style, title)
    with _open_for_write(path) as fh:
        fh.write(text)
