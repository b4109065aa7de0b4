"""Small-graph enumeration, exhaustive margin scans and the search for the
four-vertex instance where the E3 and D3 models disagree.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterator, Optional

from .graph import MultiGraph, format_instance, is_connected, separates
from .minors import canonical_form, from_canonical_form, is_outerplanar
from .models import (
    ModelError,
    ModelSpec,
    Query,
    bbc_margin,
    exact_prob,
    exact_prob_conditional,
    fraction_str,
)

MAX_ENUM_VERTICES = 8


@dataclass(frozen=True)
class InstanceFilter:
    max_vertices: int
    max_edges: Optional[int] = None
    connected_only: bool = True
    outerplanar_only: bool = False
    multigraph: bool = False
    min_vertices: int = 1

    def __post_init__(self):
        if self.max_vertices < 1 or self.min_vertices < 1:
            raise ValueError("vertex bounds must be positive")
        if self.max_edges is not None and self.max_edges < 0:
            raise ValueError("max_edges must be nonnegative")
        if self.multigraph and self.max_edges is None:
            raise ValueError("multigraph enumeration needs max_edges")


def _graphs_on(n: int, max_edges: int, multigraph: bool) -> Iterator[MultiGraph]:
    """All graphs on ``n`` vertices with at most ``max_edges`` edges, one per
    isomorphism class, grown one edge at a time with canonical deduplication.
    """
    pairs = list(combinations(range(n), 2))
    level = {canonical_form(MultiGraph(n)): MultiGraph(n)}
    m = 0
    while True:
        for code in sorted(level):
            yield from_canonical_form(code)
        if m == max_edges or not pairs:
            return
        nxt = {}
        for g in level.values():
            present = set(g.edges)
            for ab in pairs:
                if not multigraph and ab in present:
                    continue
                h = MultiGraph(n, g.edges + (ab,))
                code = canonical_form(h)
                if code not in nxt:
                    nxt[code] = h
        if not nxt:
            return
        level = nxt
        m += 1


def enumerate_graphs(flt: InstanceFilter) -> Iterator[MultiGraph]:
    """Graphs ordered by vertex count, edge count, then canonical code."""
    if flt.max_vertices > MAX_ENUM_VERTICES:
        raise ValueError(f"enumeration bound: max_vertices {flt.max_vertices} > {MAX_ENUM_VERTICES}")
    for n in range(flt.min_vertices, flt.max_vertices + 1):
        cap = n * (n - 1) // 2
        max_edges = flt.max_edges if flt.max_edges is not None else cap
        if not flt.multigraph:
            max_edges = min(max_edges, cap)
        for g in _graphs_on(n, max_edges, flt.multigraph):
            if flt.connected_only and not is_connected(g):
                continue
            if flt.outerplanar_only and not is_outerplanar(g):
                continue
            yield g


# --- conjecture scans ------------------------------------------------------------


def anticorrelated_constraints(g: MultiGraph):
    """Force the two edges at every degree-2 vertex to take different colors."""
    cons = []
    for x in range(g.n):
        inc = g.incident(x)
        if len(inc) == 2:
            cons.append(((inc[0], inc[1]), "different"))
    return cons


def _subsets(n: int):
    for mask in range(1 << n):
        yield frozenset(x for x in range(n) if mask >> x & 1)


def cycle_p_vec(g: MultiGraph, grid=(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))) -> tuple:
    return tuple(grid[e % len(grid)] for e in range(g.m))


def spec_for(kind: str, g: MultiGraph, t, p=None) -> ModelSpec:
    kind = kind.upper()
    if kind == "E1":
        return ModelSpec.e1(p if p is not None else Fraction(1, 2))
    if kind == "E2":
        return ModelSpec.e2(cycle_p_vec(g), t)
    if kind == "E3":
        return ModelSpec.e3(t)
    if kind == "E5":
        return ModelSpec.e5(p if p is not None else Fraction(1, 2), t)
    if kind == "D2":
        return ModelSpec.d2(t)
    if kind == "D3":
        return ModelSpec.d3(t)
    raise ModelError(f"scan does not support model {kind}")


def cutset_condition(g: MultiGraph, t, u: int, v: int) -> bool:
    """u or v transversal, or some subset of T separates them."""
    if u in t or v in t:
        return True
    return u != v and separates(g, t, u, v)


@dataclass
class ScanReport:
    model: str
    total: int = 0
    min_margin: Optional[Fraction] = None
    worst: Optional[dict] = None
    equality_count: int = 0
    equality_cutset: int = 0
    violations: list = field(default_factory=list)

    def add(self, g: MultiGraph, t, u: int, v: int, margin: Fraction) -> None:
        self.total += 1
        row = {"graph": format_instance(g, t), "T": sorted(t), "u": u, "v": v, "margin": margin}
        if self.min_margin is None or margin < self.min_margin:
            self.min_margin = margin
            self.worst = row
        if margin == 0:
            self.equality_count += 1
            if cutset_condition(g, t, u, v):
                self.equality_cutset += 1
        if margin < 0:
            self.violations.append(row)

    def merge(self, other: "ScanReport") -> "ScanReport":
        out = ScanReport(self.model)
        for r in (self, other):
            out.total += r.total
            out.equality_count += r.equality_count
            out.equality_cutset += r.equality_cutset
            out.violations += r.violations
            if r.min_margin is not None and (out.min_margin is None or r.min_margin < out.min_margin):
                out.min_margin, out.worst = r.min_margin, r.worst
        return out

    def to_json(self) -> dict:
        def row(r):
            return None if r is None else dict(r, margin=fraction_str(r["margin"]))

        return {
            "schema": 1,
            "model": self.model,
            "total": self.total,
            "min_margin": None if self.min_margin is None else fraction_str(self.min_margin),
            "worst": row(self.worst),
            "equality_count": self.equality_count,
            "equality_cutset": self.equality_cutset,
            "violations": [row(r) for r in self.violations],
        }

    def to_text(self) -> str:
        lines = [f"model {self.model}: {self.total} (graph, T, u, v) cases",
                 f"min margin {fraction_str(self.min_margin) if self.min_margin is not None else '-'}",
                 f"equalities {self.equality_count} ({self.equality_cutset} covered by the cutset rule)"]
        if self.worst:
            w = self.worst
            lines.append(f"worst: T={w['T']} u={w['u']} v={w['v']} graph " + w["graph"].replace("\n", " | "))
        if self.violations:
            lines.append(f"VIOLATIONS: {len(self.violations)}")
            for r in self.violations:
                lines.append(f"  margin {fraction_str(r['margin'])} T={r['T']} u={r['u']} v={r['v']} "
                             + r["graph"].replace("\n", " | "))
        return "\n".join(lines)


def _margin(kind, g, t, u, v, p, constrain):
    spec = spec_for(kind, g, t, p)
    if constrain is None:
        return bbc_margin(g, spec, u, v)
    cons = constrain(g)
    try:
        return (exact_prob_conditional(g, spec, Query(u, v, 0), cons)
                - exact_prob_conditional(g, spec, Query(u, v, 1), cons))
    except ModelError:
        return None


def _scan_graph(args) -> ScanReport:
    kind, g, p, constrain, t_filter = args
    rep = ScanReport(kind)
    for t in _subsets(g.n):
        if t_filter is not None and not t_filter(t):
            continue
        for u in range(g.n):
            for v in range(g.n):
                margin = _margin(kind, g, t, u, v, p, constrain)
                if margin is not None:
                    rep.add(g, t, u, v, margin)
    return rep


def scan_conjecture(kind: str, flt: InstanceFilter, p=None,
                    constrain: Optional[Callable] = None, t_filter: Optional[Callable] = None,
                    jobs: int = 1) -> ScanReport:
    """Exact margins over every graph passing ``flt``, every T and every (u, v).

    ``constrain`` maps a graph to color constraints (e.g. :func:`anticorrelated_constraints`),
    turning every probability into a conditional one.
    """
    graphs = list(enumerate_graphs(flt))
    tasks = [(kind, g, p, constrain, t_filter) for g in graphs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_scan_graph, tasks))
    else:
        parts = [_scan_graph(task) for task in tasks]
    out = ScanReport(kind)
    for part in parts:
        out = out.merge(part)
    return out


# --- four-vertex E3 vs D3 instance -----------------------------------------------------


EXAMPLE_D3 = Fraction(13, 16)
EXAMPLE_E3 = Fraction(7, 8)


def find_figure2() -> list[dict]:
    """Every 4-vertex 5-edge connected multigraph with u != v and T = {u, v}
    where both D3 arrival probabilities are 13/16 and both E3 probabilities 7/8.
    """
    flt = InstanceFilter(max_vertices=4, min_vertices=4, max_edges=5, multigraph=True)
    found = []
    for g in enumerate_graphs(flt):
        if g.m != 5:
            continue
        for u in range(4):
            for v in range(4):
                if u == v:
                    continue
                t = frozenset({u, v})
                d3 = [exact_prob(g, ModelSpec.d3(t), Query(u, v, k)) for k in (0, 1)]
                e3 = [exact_prob(g, ModelSpec.e3(t), Query(u, v, k)) for k in (0, 1)]
                if d3 == [EXAMPLE_D3] * 2 and e3 == [EXAMPLE_E3] * 2:
                    found.append({"graph": g, "u": u, "v": v, "t": t, "d3": d3, "e3": e3})
    if not found:
        raise RuntimeError("no 4-vertex 5-edge instance matches 13/16 and 7/8; check the D3 walk semantics")
    return found


def figure2_json(found: list[dict]) -> str:
    rows = [{
        "graph": format_instance(r["graph"], r["t"]),
        "edges": [list(e) for e in r["graph"].edges],
        "u": r["u"], "v": r["v"], "T": sorted(r["t"]),
        "d3": fraction_str(r["d3"][0]), "e3": fraction_str(r["e3"][0]),
        "d3_against": fraction_str(r["d3"][1]), "e3_layer1": fraction_str(r["e3"][1]),
    } for r in found]
    return json.dumps({"schema": 1, "instances": rows}, indent=2)
