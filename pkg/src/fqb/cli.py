"""Command-line front end.

Layering: built-in defaults < ``--config`` file < explicit flags.
Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import Sequence

from . import experiments, oracle
from .angles import parse_angle, parse_grid
from .floquet import evolve
from .io import (
    RunConfig,
    format_landscape_csv,
    format_series_csv,
    format_sweep_csv,
    read_config,
    write_svg_plot,
)
from .lattice import Boundary, ChargerParams, Range
from .observables import BipartitionSpec

COMMANDS = (
    "evolve", "sweep-tau", "sweep-asym", "sweep-size", "sweep-coupling",
    "landscape", "entropy", "validate",
)

# flag name -> (section, config key)
FLAG_KEYS = {
    "n_sites": ("params", "N"),
    "coupling": ("params", "J"),
    "hx": ("params", "h_x"),
    "hz": ("params", "h_z"),
    "omega": ("params", "omega"),
    "tau0": ("params", "tau0"),
    "tau1": ("params", "tau1"),
    "boundary": ("params", "boundary"),
    "range": ("params", "range"),
    "antipodal_halving": ("params", "antipodal_halving"),
    "kicks": ("run", "n_max"),
    "out": ("run", "out"),
    "plot": ("run", "plot"),
    "workers": ("run", "workers"),
    "log_base": ("run", "log_base"),
    "grid": ("run", "grid"),
    "fixed": ("run", "fixed"),
    "fixed_value": ("run", "fixed_value"),
    "sizes": ("run", "sizes"),
    "couplings": ("run", "couplings"),
    "sites": ("run", "entropy_sites"),
    "max_sites": ("run", "max_sites"),
}
KEY_FLAGS = {v: "--" + k.replace("_", "-") for k, v in FLAG_KEYS.items()}


class UsageError(Exception):
    def __init__(self, flag: str, message: str) -> None:
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _angle(text: str) -> float:
    try:
        return parse_angle(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    g = p.add_argument_group("charger parameters")
    g.add_argument("--n-sites", type=int, default=S, metavar="N")
    g.add_argument("--coupling", type=float, default=S, metavar="J")
    g.add_argument("--hx", type=float, default=S, help="x field (0 = integrable)")
    g.add_argument("--hz", type=float, default=S)
    g.add_argument("--omega", type=float, default=S)
    g.add_argument("--tau0", type=_angle, default=S, help="radians or e.g. pi/4")
    g.add_argument("--tau1", type=_angle, default=S, help="radians or e.g. pi/4")
    g.add_argument("--boundary", choices=["pbc", "obc"], default=S)
    g.add_argument("--range", choices=["lr", "nn"], default=S)
    g.add_argument("--antipodal-halving", action="store_true", default=S)
    r = p.add_argument_group("run options")
    r.add_argument("--kicks", type=int, default=S)
    r.add_argument("--out", default=S, help="output CSV (default: stdout)")
    r.add_argument("--plot", default=S, help="also write an SVG plot here")
    r.add_argument("--workers", type=int, default=S, help="default: $FQB_WORKERS or 1")
    r.add_argument("--log-base", choices=["e", "2"], default=S)
    r.add_argument("--config", default=S, help="INI file with [params] and [run] sections")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fqb", description="Floquet quantum battery simulator")
    sub = parser.add_subparsers(dest="command", metavar="command")
    S = argparse.SUPPRESS
    helps = {
        "evolve": "stroboscopic series of stored energy and power",
        "sweep-tau": "dE_max over a symmetric tau grid",
        "sweep-asym": "dE_max with one interval fixed",
        "sweep-size": "dE_max over system sizes",
        "sweep-coupling": "dE_max over coupling strengths",
        "landscape": "structural landscape table with expectation flags",
        "entropy": "series including bipartite entanglement entropy",
        "validate": "fast path vs dense oracle over the pinned grid",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        _add_common(p)
        if name in ("sweep-tau", "sweep-asym", "landscape"):
            p.add_argument("--grid", default=S, help="start:stop:step or comma list (default 0:pi/2:pi/32)")
        if name == "sweep-asym":
            p.add_argument("--fixed", choices=["tau0", "tau1"], default=S)
            p.add_argument("--fixed-value", type=_angle, default=S)
        if name == "sweep-size":
            p.add_argument("--sizes", type=_int_list, default=S, help="comma list, e.g. 4,6,8")
        if name == "sweep-coupling":
            p.add_argument("--couplings", type=_float_list, default=S, help="comma list of J")
        if name == "entropy":
            p.add_argument("--sites", type=_int_list, default=S, help="1-based subsystem sites (default 1)")
        if name == "validate":
            p.add_argument("--max-sites", type=int, default=S)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge config file and flags into a validated ``RunConfig``."""
    layered: dict[str, dict] = {"params": {}, "run": {}}
    if getattr(args, "config", None):
        try:
            layered = read_config(args.config)
        except (OSError, ValueError) as exc:
            raise UsageError("--config", str(exc)) from None
    for flag, (section, key) in FLAG_KEYS.items():
        if hasattr(args, flag):
            layered[section][key] = getattr(args, flag)
    params_raw = layered["params"]
    run = layered["run"]
    run.pop("command", None)
    command = args.command

    if command == "sweep-size":
        sizes = run.get("sizes")
        if not sizes:
            raise UsageError("--sizes", "required for sweep-size")
        params_raw.setdefault("N", sizes[0])
    if command == "validate":
        params_raw.setdefault("N", 2)
    if "N" not in params_raw:
        raise UsageError("--n-sites", "required")
    _check_params(params_raw)
    try:
        params = ChargerParams(**params_raw)
    except (TypeError, ValueError) as exc:
        raise UsageError("--config", str(exc)) from None

    run.setdefault("workers", experiments.default_workers())
    cfg = RunConfig(command=command, params=params, **run)
    _check_run(cfg)
    return cfg


def _check_params(raw: dict) -> None:
    def bad(key: str, msg: str) -> UsageError:
        return UsageError(KEY_FLAGS[("params", key)], msg)

    N = raw["N"]
    if N < 1:
        raise bad("N", f"must be >= 1, got {N}")
    if raw.get("omega", 1.0) <= 0:
        raise bad("omega", f"must be > 0, got {raw['omega']}")
    for key in ("tau0", "tau1"):
        if raw.get(key, 0.0) < 0:
            raise bad(key, f"must be >= 0, got {raw[key]}")
    rng = Range(raw.get("range", "lr"))
    if rng is Range.NEAREST and N < 2:
        raise bad("N", "nearest-neighbour coupling needs at least 2 sites")
    if raw.get("antipodal_halving"):
        if rng is not Range.LONG or Boundary(raw.get("boundary", "pbc")) is not Boundary.PBC:
            raise bad("antipodal_halving", "only meaningful with --range lr --boundary pbc")


def _check_run(cfg: RunConfig) -> None:
    if cfg.n_max < 0:
        raise UsageError("--kicks", f"must be >= 0, got {cfg.n_max}")
    if cfg.workers < 1:
        raise UsageError("--workers", f"must be >= 1, got {cfg.workers}")
    if cfg.command == "sweep-asym":
        if cfg.fixed is None:
            raise UsageError("--fixed", "required for sweep-asym")
        if cfg.fixed_value is None:
            raise UsageError("--fixed-value", "required for sweep-asym")
    if cfg.command == "sweep-coupling" and not cfg.couplings:
        raise UsageError("--couplings", "required for sweep-coupling")
    if cfg.command == "sweep-size" and min(cfg.sizes) < 2:
        raise UsageError("--sizes", "sizes must be >= 2")
    if cfg.command == "entropy":
        N = cfg.params.N
        sites = cfg.entropy_sites
        if not sites or any(not 1 <= s <= N for s in sites) or len(set(sites)) >= N:
            raise UsageError("--sites", f"need 1..{N - 1} distinct sites in 1..{N}")
    if cfg.command == "validate" and not 1 <= cfg.max_sites <= oracle.MAX_VALIDATE_SITES:
        raise UsageError("--max-sites", f"must lie in 1..{oracle.MAX_VALIDATE_SITES}")
    if cfg.command == "landscape" and cfg.params.N > 12:
        raise UsageError("--n-sites", "landscape is capped at 12 sites")
    if cfg.grid is not None:
        try:
            parse_grid(cfg.grid)
        except ValueError as exc:
            raise UsageError("--grid", str(exc)) from None


def _emit(text: str, out: str | None) -> None:
    if out:
        try:
            Path(out).write_text(text, encoding="utf-8", newline="\n")
        except OSError as exc:
            raise OSError(f"cannot write {out}: {exc.strerror or exc}") from exc
    else:
        sys.stdout.write(text)


def _grid(cfg: RunConfig) -> list[float] | None:
    return parse_grid(cfg.grid) if cfg.grid is not None else None


def run(cfg: RunConfig) -> int:
    p = cfg.params
    cmd = cfg.command
    if cmd in ("evolve", "entropy"):
        spec = None
        if cmd == "entropy":
            spec = BipartitionSpec(frozenset(s - 1 for s in cfg.entropy_sites), cfg.log_base)
        series = evolve(p, cfg.n_max, entropy=spec)
        _emit(format_series_csv(series), cfg.out)
        if cfg.plot:
            write_svg_plot(series, cfg.plot)
        return 0
    if cmd in ("sweep-tau", "sweep-asym", "sweep-size", "sweep-coupling"):
        if cmd == "sweep-tau":
            result = experiments.sweep_tau(p, _grid(cfg), cfg.n_max, cfg.workers)
        elif cmd == "sweep-asym":
            result = experiments.sweep_asymmetric(
                p, cfg.fixed, cfg.fixed_value, _grid(cfg), cfg.n_max, cfg.workers
            )
        elif cmd == "sweep-size":
            result = experiments.sweep_size(p, cfg.sizes, cfg.n_max, cfg.workers)
        else:
            result = experiments.sweep_coupling(p, cfg.couplings, cfg.n_max, cfg.workers)
        _emit(format_sweep_csv(result), cfg.out)
        if cfg.plot:
            write_svg_plot(result, cfg.plot)
        return 0
    if cmd == "landscape":
        rows = experiments.landscape_table(p.N, cfg.n_max, _grid(cfg), cfg.workers)
        _emit(format_landscape_csv(rows, p.N, cfg.n_max), cfg.out)
        return 0
    if cmd == "validate":
        return _validate(cfg)
    raise AssertionError(cmd)


def _validate(cfg: RunConfig) -> int:
    manifest = oracle.load_validation_manifest()
    n_kicks = manifest["n_kicks"]
    tol = manifest["tol"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["params", "max_amp_dev", "max_energy_dev", "pass"])
    failures = total = 0
    for params in oracle.validation_grid(cfg.max_sites, manifest):
        report = oracle.cross_validate(params, n_kicks, tol)
        total += 1
        failures += not report.passed
        status = "PASS" if report.passed else "FAIL"
        print(
            f"{status} {params.canonical()} max_amp_dev={report.max_amp_dev:.3e} "
            f"max_energy_dev={report.max_energy_dev:.3e}"
        )
        writer.writerow(
            [params.canonical(), f"{report.max_amp_dev:.6e}", f"{report.max_energy_dev:.6e}",
             str(report.passed).lower()]
        )
    if cfg.out:
        Path(cfg.out).write_text(buf.getvalue(), encoding="utf-8", newline="\n")
    print(f"{total - failures}/{total} grid points passed (manifest v{manifest['version']})")
    return 1 if failures else 0


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = resolve_config(args)
    except UsageError as exc:
        print(f"fqb: error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"fqb: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
