"""Analysis reports: one nested dict per game, deterministic JSON and CSV text.

Floats are written with 17 significant digits so every value round-trips
exactly; rationals travel as ``"p/q"`` strings next to their float value.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from importlib import resources

from . import __version__
from . import game as gm
from .equilibria import HYPERBOLIC_TOL, all_equilibria
from .network import cycle_edges, switching_nodes
from .projective import (
    NEUTRAL_TOL,
    ORBIT_TOL,
    build_projective_map,
    classify_regime,
)
from .skeleton import build_skeleton, structural_sets

__all__ = [
    "SCHEMA_ID",
    "build_report",
    "dumps",
    "loads",
    "report_csv",
    "scan_csv",
    "events_csv",
    "load_schema",
]

SCHEMA_ID = "hetcycle.analysis/1"


def _q(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _num(v):
    """Exact rational as ``{"exact", "value"}``, float as a float."""
    if isinstance(v, (int, Fraction)) and not isinstance(v, bool):
        return {"exact": _q(v), "value": float(v)}
    return float(v)


def _cx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _vec(v):
    return None if v is None else [float(x) for x in v]


def _matrix(m) -> dict:
    return {
        "exact": [[_q(x) for x in row] for row in m],
        "value": [[float(x) for x in row] for row in m],
    }


def build_report(game: gm.PolymatrixGame, S=None, max_period: int = 4) -> dict:
    """Run the whole pipeline on ``game`` and collect every section."""
    skel = build_skeleton(game, S)
    graph = skel.graph
    pm = build_projective_map(skel)
    regime = classify_regime(game, skel.S, max_period)
    names = graph.cycle_names()
    equilibria = all_equilibria(game)
    return {
        "schema": SCHEMA_ID,
        "provenance": {
            "tool": "hetcycle",
            "version": __version__,
            "tolerances": {
                "hyperbolic": HYPERBOLIC_TOL,
                "neutral_multiplier": NEUTRAL_TOL,
                "orbit": ORBIT_TOL,
            },
            "max_period": max_period,
        },
        "mu": None if game.mu is None else _num(game.mu),
        "game": {
            "groups": list(game.groups),
            "payoff": [[_q(x) for x in row] for row in game.payoff],
        },
        "equilibria": [
            {
                "name": r.name,
                "kind": r.kind,
                "location": [float(x) for x in r.location],
                "exact_location": None if r.exact_location is None
                else [_q(x) for x in r.exact_location],
                "eigenvalues": [_cx(z) for z in r.eigenvalues],
                "classification": r.classification,
                "face": r.face,
                "vertex": r.vertex,
            }
            for r in equilibria
        ],
        "graph": {
            "edges": [
                {"index": e.index, "label": e.label, "source": e.source, "target": e.target,
                 "direction": e.direction, "faces": list(e.faces)}
                for e in graph.edges
            ],
            "cycles": [
                {"name": name, "vertices": list(cyc), "edges": list(cycle_edges(graph, cyc))}
                for cyc, name in names.items()
            ],
            "switching_nodes": sorted(switching_nodes(graph)),
        },
        "structural_set": list(skel.S),
        "structural_sets": [list(s) for s in structural_sets(graph)],
        "branches": [
            {
                "id": b.id,
                "name": b.name,
                "edges": list(b.edges),
                "source": b.source,
                "target": b.target,
                "matrix": _matrix(b.matrix),
                "sector": b.sector.describe(),
            }
            for b in skel.branches
        ],
        "cycle_verdicts": [
            {
                "cycle": name,
                "eigenvalues": [_cx(z) for z in v.eigenvalues],
                "perron_vector": _vec(v.perron_vector),
                "minor_vector": _vec(v.minor_vector),
                "in_sector": v.in_sector,
                "verdict": v.verdict,
                "target": v.target,
            }
            for name, v in regime.verdicts.items()
        ],
        "projective": {
            "length": pm.length,
            "s_edges": list(pm.s_edges),
            "breakpoints": [_num(x) for x in pm.breakpoints],
            "branches": [
                {
                    "label": b.label,
                    "branch": f"xi{b.branch_id}",
                    "source": b.source,
                    "target": b.target,
                    "lo": _num(b.lo),
                    "hi": _num(b.hi),
                    "lo_closed": b.lo_closed,
                    "hi_closed": b.hi_closed,
                    "mobius": [_num(c) for c in b.mobius.coefficients()],
                }
                for b in pm.branches
            ],
            "points": [
                {
                    "x": float(p.x),
                    "period": p.period,
                    "itinerary": [f"J{k}" for k in p.itinerary],
                    "orbit": [float(x) for x in p.orbit],
                    "multiplier": float(p.multiplier),
                    "verdict": p.verdict,
                    "cycle": p.cycle,
                }
                for p in regime.points
            ],
        },
        "regime": {
            "case": regime.case,
            "likely_limit_set": list(regime.likely_limit_set),
            "glue_cycle": regime.glue_cycle,
            "attracting_cycles": list(regime.attracting_cycles),
            "repelling_cycles": list(regime.repelling_cycles),
            "indeterminate": regime.indeterminate,
            "reason": regime.reason,
            "bracket": None if regime.bracket is None else [float(x) for x in regime.bracket],
            "table_row": regime.table_row,
        },
    }


def _encode(obj, out: list) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float_text(obj) if math.isfinite(obj) else "null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k), ensure_ascii=False))
            out.append(": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")


def _float_text(x: float) -> str:
    # Keep a float marker so integral values read back as floats.
    text = format(x, ".17g")
    return text if any(ch in text for ch in ".en") else text + ".0"


def dumps(obj) -> str:
    """JSON text with every float at 17 significant digits and a final newline."""
    out: list = []
    _encode(obj, out)
    return "".join(out) + "\n"


def loads(text: str):
    return json.loads(text)


def load_schema() -> dict:
    return json.loads(resources.files("hetcycle").joinpath("schemas/report.schema.json").read_text())


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, dict) and "exact" in v:
        return v["exact"]
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    if v is None:
        return ""
    return str(v)


def _row(cells) -> str:
    out = []
    for c in cells:
        c = _cell(c)
        if any(ch in c for ch in ',"\n'):
            c = '"' + c.replace('"', '""') + '"'
        out.append(c)
    return ",".join(out)


def report_csv(report: dict) -> str:
    """Long-format table ``section,name,field,value`` of the main results."""
    rows = [("section", "name", "field", "value")]
    for r in report["equilibria"]:
        for key in ("kind", "location", "eigenvalues", "classification"):
            val = r[key]
            if key == "eigenvalues":
                val = [f"{format(z[0], '.17g')}{z[1]:+.17g}j" for z in val]
            rows.append(("equilibrium", r["name"], key, val))
    for cyc in report["graph"]["cycles"]:
        rows.append(("cycle", cyc["name"], "vertices", cyc["vertices"]))
    for v in report["cycle_verdicts"]:
        rows.append(("verdict", v["cycle"], "verdict", v["verdict"]))
    for b in report["projective"]["branches"]:
        rows.append(("interval", b["label"], "lo", b["lo"]))
        rows.append(("interval", b["label"], "hi", b["hi"]))
    for k, p in enumerate(report["projective"]["points"], start=1):
        rows.append(("point", f"P{k}", "x", p["x"]))
        rows.append(("point", f"P{k}", "multiplier", p["multiplier"]))
        rows.append(("point", f"P{k}", "cycle", p["cycle"]))
    reg = report["regime"]
    for key in ("case", "likely_limit_set", "glue_cycle", "indeterminate"):
        rows.append(("regime", "", key, reg[key]))
    return "\n".join(_row(r) for r in rows) + "\n"


def scan_csv(records) -> str:
    """One row per scanned parameter value."""
    rows = [("mu", "case", "likely_limit_set", "glue_cycle", "indeterminate", "reason")]
    for r in records:
        rows.append((float(r.mu), r.case, " U ".join(r.likely_limit_set), r.glue_cycle,
                     str(r.indeterminate).lower(), r.reason))
    return "\n".join(_row(r) for r in rows) + "\n"


def events_csv(events) -> str:
    rows = [("mu_star", "kind", "subject", "bracket_lo", "bracket_hi", "residual")]
    for e in events:
        rows.append((float(e.mu_star), e.kind, e.subject, float(e.bracket[0]),
                     float(e.bracket[1]), float(e.residual)))
    return "\n".join(_row(r) for r in rows) + "\n"
