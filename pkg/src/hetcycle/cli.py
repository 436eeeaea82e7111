"""``hetcycle`` command line: analyze, scan, simulate, plot.

Exit codes: 0 success, 1 usage or input error, 2 indeterminate regime,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import game as gm
from .errors import (
    ConvergenceError,
    HetcycleError,
    IndeterminateError,
    InputError,
    NoSignChangeError,
)

__all__ = ["main", "build_parser", "parse_game", "load_game"]

EXIT_OK, EXIT_INPUT, EXIT_INDETERMINATE, EXIT_NUMERIC = 0, 1, 2, 3
FAMILIES = ("paper-mu",)


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors with status 2; ours is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _rational_at(value, pointer: str):
    try:
        return gm.as_rational(value)
    except InputError as exc:
        raise InputError(f"{pointer}: {exc}") from exc


def parse_game(obj) -> gm.PolymatrixGame:
    """Game from a decoded JSON document.

    Either ``{"groups": [...], "payoff": [[...]]}`` with numbers or ``"p/q"``
    strings, or ``{"family": "paper-mu", "mu": "850/11"}``.  Errors name the
    offending location as a JSON pointer.
    """
    if not isinstance(obj, dict):
        raise InputError("/: expected an object")
    if "family" in obj:
        if obj["family"] not in FAMILIES:
            raise InputError(f"/family: unknown family {obj['family']!r}")
        if "mu" not in obj:
            raise InputError("/mu: missing")
        return gm.build_mu_family(_rational_at(obj["mu"], "/mu"))
    for key in ("groups", "payoff"):
        if key not in obj:
            raise InputError(f"/{key}: missing")
    groups = obj["groups"]
    if not isinstance(groups, list) or not groups:
        raise InputError("/groups: expected a nonempty array")
    for i, g in enumerate(groups):
        if not isinstance(g, int) or isinstance(g, bool) or g != 2:
            raise InputError(f"/groups/{i}: every group needs exactly 2 strategies")
    size = sum(groups)
    payoff = obj["payoff"]
    if not isinstance(payoff, list) or len(payoff) != size:
        raise InputError(f"/payoff: expected {size} rows")
    rows = []
    for i, row in enumerate(payoff):
        if not isinstance(row, list) or len(row) != size:
            raise InputError(f"/payoff/{i}: expected {size} entries")
        rows.append([_rational_at(v, f"/payoff/{i}/{j}") for j, v in enumerate(row)])
    return gm.PolymatrixGame(tuple(groups), tuple(map(tuple, rows)))


def load_game(path: str) -> gm.PolymatrixGame:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_game(obj)


def _game_from_args(args) -> gm.PolymatrixGame:
    if args.game:
        if args.mu is not None:
            raise InputError("--mu applies to --family, not --game")
        return load_game(args.game)
    if args.mu is None:
        raise InputError("give --game FILE or --mu with --family")
    return gm.build_mu_family(gm.as_rational(args.mu))


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from exc


def cmd_analyze(args) -> int:
    from .report import build_report, dumps, report_csv

    game = _game_from_args(args)
    report = build_report(game, max_period=args.max_period)
    text = dumps(report) if args.format == "json" else report_csv(report)
    _write(args.out, text)
    reg = report["regime"]
    if reg["indeterminate"]:
        print(f"indeterminate regime: {reg['reason']}", file=sys.stderr)
        return EXIT_INDETERMINATE
    return EXIT_OK


def cmd_scan(args) -> int:
    from .projective import SCAN_JITTER, classify_regime, detect_thresholds
    from .report import events_csv, scan_csv
    from .simulate import thread_count

    lo, hi = float(gm.as_rational(args.mu_from)), float(gm.as_rational(args.mu_to))
    if not hi > lo:
        raise InputError("empty range: --mu-to must exceed --mu-from")
    if args.steps < 2:
        raise InputError("--steps must be at least 2")
    grid = [lo + (hi - lo) * k / args.steps + SCAN_JITTER for k in range(args.steps)]
    grid.append(hi - SCAN_JITTER)

    def run(m):
        return classify_regime(gm.build_mu_family(m), max_period=args.max_period)

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        records = list(pool.map(run, grid))
    _write(args.out, scan_csv(records))
    if args.detect:
        events = detect_thresholds(lo, hi, args.steps)
        _write(args.events, events_csv(events))
        print(f"{len(events)} events", file=sys.stderr)
    return EXIT_OK


def _parse_point(text: str) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise InputError(f"--x0 must be comma-separated numbers, got {text!r}") from exc
    return np.array(vals)


def cmd_simulate(args) -> int:
    from . import simulate as sm
    from .network import graph_for
    from .report import dumps

    mu = gm.as_rational(args.mu)
    game = gm.build_mu_family(mu)
    out = Path(args.out) if args.out else None
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise InputError(f"cannot create {out}: {exc.strerror}") from exc
    if args.x0 is not None:
        x0 = _parse_point(args.x0)
        if x0.shape != (game.n_groups,) or np.any(x0 < 0) or np.any(x0 > 1):
            raise InputError(f"--x0 must be a point of [0, 1]^{game.n_groups}")
        traj = sm.integrate(game, x0, args.t)
        itin = sm.extract_itinerary(traj, args.eps, graph_for(game))
        if out is not None:
            _write(str(out / "trajectory.csv"), sm.trajectory_csv(traj))
            _write(str(out / "itinerary.csv"), sm.itinerary_csv(itin))
        cycle = sm.terminal_cycle(itin, graph_for(game))
        point = ",".join(format(float(v), ".17g") for v in traj.terminal)
        print(f"termination: {traj.termination}")
        print(f"terminal point: {point}")
        print(f"visits: {len(itin.visits)}  terminal cycle: {cycle or '-'}")
        return EXIT_OK
    if args.seeds < 1:
        raise InputError("--seeds must be positive")
    cv = sm.cross_validate(mu, sm.halton_seeds(args.seeds), args.eps, args.t)
    summary = {
        "mu": float(mu),
        "case": cv.case,
        "likely_limit_set": list(cv.likely_limit_set),
        "match_fraction": cv.fraction,
        "counts": dict(sorted(cv.counts.items())),
        "observed_cycles": sorted(cv.observed_cycles),
        "outcomes": [
            {"seed": list(o.seed), "termination": o.termination, "terminal": list(o.terminal),
             "label": o.label, "matches": o.matches, "growth": o.growth}
            for o in cv.outcomes
        ],
    }
    if out is not None:
        _write(str(out / "crossval.json"), dumps(summary))
    print(f"match fraction: {cv.fraction:.4f} ({sum(o.matches for o in cv.outcomes)}"
          f"/{len(cv.outcomes)}) against {' U '.join(cv.likely_limit_set)}")
    print(f"observed cycles: {', '.join(sorted(cv.observed_cycles)) or '-'}")
    print("counts: " + ", ".join(f"{k}={v}" for k, v in sorted(cv.counts.items())))
    return EXIT_OK


def cmd_plot(args) -> int:
    from . import svg
    from .network import graph_for
    from .projective import build_projective_map

    game = gm.build_mu_family(gm.as_rational(args.mu))
    if args.what == "graph":
        text = svg.graph_svg(graph_for(game))
    elif args.what == "projective":
        text = svg.projective_svg(build_projective_map(game))
    else:
        if args.start is None:
            raise InputError("--start is required for a cobweb plot")
        text = svg.cobweb_svg(build_projective_map(game), args.start, args.iterates)
    _write(args.svg, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hetcycle", description="Heteroclinic cycle stability for polymatrix games.")
    p.add_argument("--version", action="version", version=f"hetcycle {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="full pipeline for one game")
    a.add_argument("--game", help="game JSON file")
    a.add_argument("--family", choices=FAMILIES, default="paper-mu")
    a.add_argument("--mu", help="parameter, e.g. 90 or 850/11")
    a.add_argument("--out", help="output path (default stdout)")
    a.add_argument("--format", choices=("json", "csv"), default="json")
    a.add_argument("--max-period", type=int, default=4)
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("scan", help="regime per parameter value and threshold detection")
    s.add_argument("--family", choices=FAMILIES, default="paper-mu")
    s.add_argument("--mu-from", required=True)
    s.add_argument("--mu-to", required=True)
    s.add_argument("--steps", type=int, default=500)
    s.add_argument("--detect", action="store_true", help="locate and refine bifurcations")
    s.add_argument("--out", help="regime CSV path (default stdout)")
    s.add_argument("--events", help="event CSV path (default stdout)")
    s.add_argument("--max-period", type=int, default=2)
    s.set_defaults(func=cmd_scan)

    m = sub.add_parser("simulate", help="integrate trajectories and cross-validate")
    m.add_argument("--family", choices=FAMILIES, default="paper-mu")
    m.add_argument("--mu", required=True)
    g = m.add_mutually_exclusive_group(required=True)
    g.add_argument("--x0", help="initial cube point a,b,c")
    g.add_argument("--seeds", type=int, help="number of Halton seeds")
    m.add_argument("--t", type=float, default=1e5, help="final time")
    m.add_argument("--eps", type=float, default=0.05, help="vertex neighbourhood radius")
    m.add_argument("--out", help="output directory")
    m.set_defaults(func=cmd_simulate)

    q = sub.add_parser("plot", help="SVG figures")
    q.add_argument("--family", choices=FAMILIES, default="paper-mu")
    q.add_argument("--mu", required=True)
    q.add_argument("--what", choices=("projective", "cobweb", "graph"), required=True)
    q.add_argument("--svg", required=True, help="output SVG path")
    q.add_argument("--start", type=float, help="cobweb initial condition")
    q.add_argument("--iterates", type=int, default=100)
    q.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IndeterminateError as exc:
        print(f"hetcycle: indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (ConvergenceError, NoSignChangeError) as exc:
        print(f"hetcycle: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (HetcycleError, ValueError) as exc:
        print(f"hetcycle: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"hetcycle: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
