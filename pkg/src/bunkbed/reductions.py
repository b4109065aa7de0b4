"""Weighted rewrites of (graph, transversal, partition) triples and their verifier.

Each operation conditions on a few edge colors and returns the child triples
the parent splits into, with the probability of each case as its weight. The
verifier recomputes every endpoint query exactly on the parent and on the
children and checks that the weighted mix reproduces the parent.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Union

from .graph import (
    EdgePartition,
    GraphError,
    MultiGraph,
    components,
    contract_edge,
    delete_edges,
    delete_vertex,
    format_instance,
    separates,
)
from .models import ModelSpec, Query, exact_prob, fraction_str


class ReductionError(ValueError):
    """An operation's precondition does not hold at the requested site."""


@dataclass(frozen=True)
class Triple:
    g: MultiGraph
    t: frozenset
    partition: EdgePartition
    u: int
    v: int

    @classmethod
    def make(cls, g: MultiGraph, t: Iterable[int], u: int, v: int,
             partition: Optional[EdgePartition] = None) -> "Triple":
        return cls(g, frozenset(t), partition or EdgePartition.singletons(g), u, v)

    def spec(self) -> ModelSpec:
        return ModelSpec.e4(self.t, self.partition)


@dataclass(frozen=True)
class HybridTriple:
    """Graph whose edges are either E2-style (``p_vec[e]``) or one-layer (``None``)."""

    g: MultiGraph
    p_vec: tuple
    t: frozenset
    u: int
    v: int

    def spec(self) -> ModelSpec:
        return ModelSpec.hybrid(self.p_vec, self.t)


AnyTriple = Union[Triple, HybridTriple]


@dataclass(frozen=True)
class ReductionStep:
    op: str
    parent: AnyTriple
    children: tuple[tuple[AnyTriple, Fraction], ...]
    notes: str = ""

    def weight_sum(self) -> Fraction:
        return sum((w for _, w in self.children), Fraction(0))

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "notes": self.notes,
            "parent": _triple_json(self.parent),
            "children": [dict(_triple_json(c), weight=fraction_str(w)) for c, w in self.children],
        }


def _triple_json(tr: AnyTriple) -> dict:
    out = {"u": tr.u, "v": tr.v}
    if isinstance(tr, Triple):
        out["graph"] = format_instance(tr.g, tr.t, tr.partition)
    else:
        out["graph"] = format_instance(tr.g, tr.t)
        out["p_vec"] = [None if x is None else fraction_str(x) for x in tr.p_vec]
    return out


# --- child construction ------------------------------------------------------------


def _derive(tr: Triple, drop: Iterable[int] = (), contract: Optional[int] = None) -> Triple:
    """Delete ``drop`` then contract ``contract`` (ids refer to the parent)."""
    g, emap = delete_edges(tr.g, drop)
    part = tr.partition.relabel(g, emap)
    t, u, v = tr.t, tr.u, tr.v
    if contract is not None:
        c = contract_edge(g, t, emap[contract])
        g, t = c.graph, c.transversal
        part = part.relabel(g, c.edge_map)
        u, v = c.vertex_map[u], c.vertex_map[v]
    return Triple(g, t, part, u, v)


def _endpoints(g: MultiGraph, e: int) -> set[int]:
    return set(g.edges[e])


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ReductionError(msg)


def _check_edges(tr: AnyTriple, *edges: int) -> None:
    for e in edges:
        if not 0 <= e < tr.g.m:
            raise GraphError(f"unknown edge id {e}")


def _triangle(tr: Triple, exy: int, exz: int, eyz: int) -> tuple[int, int, int]:
    _check_edges(tr, exy, exz, eyz)
    xy, xz, yz = (_endpoints(tr.g, e) for e in (exy, exz, eyz))
    x = xy & xz
    y = xy & yz
    z = xz & yz
    _require(len(x) == len(y) == len(z) == 1 and len(x | y | z) == 3,
             f"edges {exy}, {exz}, {eyz} do not form a triangle xy, xz, yz")
    return x.pop(), y.pop(), z.pop()


# --- operations ----------------------------------------------------------------------


def t_contract(tr: Triple, e: int) -> ReductionStep:
    """Contract an edge whose endpoints are both transversal."""
    _check_edges(tr, e)
    _require(_endpoints(tr.g, e) <= tr.t, f"edge {e} does not join two transversal vertices")
    return ReductionStep("t_contract", tr, ((_derive(tr, contract=e), Fraction(1)),), f"contract {e}")


def v2_reduce(tr: Triple, x: int) -> ReductionStep:
    """Split on whether the two edges at a degree-2 vertex share a color."""
    _require(x not in tr.t and x not in (tr.u, tr.v), f"vertex {x} is transversal or an endpoint")
    inc = tr.g.incident(x)
    _require(len(inc) == 2, f"vertex {x} has degree {len(inc)}, not 2")
    exy, exz = inc
    singles = [e for e in inc if tr.partition.is_singleton(e)]
    _require(bool(singles), f"neither edge at {x} is a singleton block")
    g1, vmap, emap = delete_vertex(tr.g, x)
    different = Triple(g1, frozenset(vmap[y] for y in tr.t), tr.partition.relabel(g1, emap),
                       vmap[tr.u], vmap[tr.v])
    # contract the free edge: contracting a block member would untie the other edge from its block
    same = _derive(tr, contract=singles[0])
    half = Fraction(1, 2)
    return ReductionStep("v2_reduce", tr, ((different, half), (same, half)),
                         f"x={x}, edges {exy},{exz}, contracted {singles[0]}")


def delta_reduce(tr: Triple, exy: int, exz: int, eyz: int) -> ReductionStep:
    """Condition a triangle of singleton blocks on which edge (if any) has the odd color."""
    _triangle(tr, exy, exz, eyz)
    for e in (exy, exz, eyz):
        _require(tr.partition.is_singleton(e), f"triangle edge {e} is not a singleton block")
    q = Fraction(1, 4)
    children = (
        (_derive(tr, drop=[eyz], contract=exy), q),
        (_derive(tr, drop=[eyz], contract=exz), q),
        (_derive(tr, drop=[exz], contract=eyz), q),
        (replace(tr, partition=tr.partition.merged(tr.g, [exy, exz, eyz])), q),
    )
    return ReductionStep("delta_reduce", tr, children, f"triangle {exy},{exz},{eyz}")


def restricted_delta_reduce(tr: Triple, exy: int, exz: int, eyz: int) -> ReductionStep:
    """Triangle where ``exy`` lies in a block of size >= 2 and the other two are free."""
    _triangle(tr, exy, exz, eyz)
    _require(len(tr.partition.block_of(exy)) >= 2, f"edge {exy} is a singleton; use delta_reduce")
    for e in (exz, eyz):
        _require(tr.partition.is_singleton(e), f"triangle edge {e} is not a singleton block")
    q = Fraction(1, 4)
    children = (
        (_derive(tr, drop=[eyz], contract=exz), q),
        (_derive(tr, drop=[exz], contract=eyz), q),
        (replace(tr, partition=tr.partition.merged(tr.g, [exz, eyz])), Fraction(1, 2)),
    )
    return ReductionStep("restricted_delta_reduce", tr, children, f"triangle {exy},{exz},{eyz}")


def y_reduce(tr: Triple, x: int) -> ReductionStep:
    """Condition the three free edges at a degree-3 vertex on their color pattern."""
    _require(x not in tr.t, f"vertex {x} is transversal")
    _require(x not in (tr.u, tr.v), f"vertex {x} is an endpoint of the query")
    inc = tr.g.incident(x)
    _require(len(inc) == 3, f"vertex {x} has degree {len(inc)}, not 3")
    for e in inc:
        _require(tr.partition.is_singleton(e), f"edge {e} at {x} is not a singleton block")
    ax, bx, cx = inc
    q = Fraction(1, 4)
    children = (
        (_derive(tr, drop=[ax], contract=bx), q),
        (_derive(tr, drop=[bx], contract=cx), q),
        (_derive(tr, drop=[cx], contract=ax), q),
        (replace(tr, partition=tr.partition.merged(tr.g, inc)), q),
    )
    return ReductionStep("y_reduce", tr, children, f"x={x}, edges {ax},{bx},{cx}")


def parallel_pair_reduce(tr: Triple, e: int, f: int) -> ReductionStep:
    """Two parallel one-layer edges: same color makes one redundant, different
    colors join the endpoints on both layers.
    """
    _check_edges(tr, e, f)
    _require(e != f and _endpoints(tr.g, e) == _endpoints(tr.g, f), f"edges {e}, {f} are not parallel")
    for k in (e, f):
        _require(tr.partition.is_singleton(k), f"edge {k} is not a singleton block")
    half = Fraction(1, 2)
    children = ((_derive(tr, drop=[f]), half), (_derive(tr, contract=e), half))
    return ReductionStep("parallel_pair_reduce", tr, children, f"parallel {e},{f}")


def e2_condition_edge(htr: HybridTriple, e: int) -> ReductionStep:
    """Condition an E2-style edge on both / exactly one / neither image present."""
    _check_edges(htr, e)
    pe = htr.p_vec[e]
    _require(pe is not None, f"edge {e} is already one-layer")
    _require(0 <= pe <= 1, f"p_e = {pe} outside [0, 1]")

    both = contract_edge(htr.g, htr.t, e)
    vec1 = [None] * both.graph.m
    for old, new in both.edge_map.items():
        vec1[new] = htr.p_vec[old]
    h1 = HybridTriple(both.graph, tuple(vec1), both.transversal,
                      both.vertex_map[htr.u], both.vertex_map[htr.v])
    vec2 = list(htr.p_vec)
    vec2[e] = None
    h2 = replace(htr, p_vec=tuple(vec2))
    g3, emap = delete_edges(htr.g, [e])
    vec3 = [None] * g3.m
    for old, new in emap.items():
        vec3[new] = htr.p_vec[old]
    h3 = HybridTriple(g3, tuple(vec3), htr.t, htr.u, htr.v)
    children = tuple((c, w) for c, w in ((h1, pe * pe), (h2, 2 * pe * (1 - pe)), (h3, (1 - pe) ** 2)) if w)
    return ReductionStep("e2_condition_edge", htr, children, f"edge {e}, p_e={pe}")


# --- mirror argument ------------------------------------------------------------------


def mirror_edge_set(g: MultiGraph, t: Iterable[int], cutset: Iterable[int], u: int, v: int) -> frozenset[int]:
    """Edges of ``v``'s side of ``G - C`` plus the edges from that side into ``C``."""
    t, cutset = frozenset(t), frozenset(cutset)
    if not cutset <= t:
        raise ReductionError(f"cutset {sorted(cutset)} is not inside T")
    if not separates(g, cutset, u, v):
        raise ReductionError(f"{sorted(cutset)} does not separate {u} from {v}")
    side = next(c for c in components(g, cutset) if v in c)
    return frozenset(e for e, (a, b) in enumerate(g.edges) if a in side or b in side)


def mirror_config(config: int, edge_set: Iterable[int], m: Optional[int] = None) -> int:
    """Swap layers on ``edge_set``.

    With ``m`` omitted ``config`` is a coloring (bit = blue). With ``m`` given it
    is a present-edge mask on the bunkbed, where bit ``e`` is e_0 and bit
    ``m + e`` is e_1; vertical bits are untouched.
    """
    if m is None:
        return config ^ sum(1 << e for e in set(edge_set))
    out = config
    for e in set(edge_set):
        lo, hi = config >> e & 1, config >> (m + e) & 1
        out &= ~(1 << e | 1 << (m + e))
        out |= hi << e | lo << (m + e)
    return out


# --- verification ---------------------------------------------------------------------


QUERIES = (("uv", 0), ("uv", 1), ("vu", 0), ("vu", 1))


def _query(tr: AnyTriple, which: str, layer: int) -> Query:
    a, b = (tr.u, tr.v) if which == "uv" else (tr.v, tr.u)
    return Query(a, b, layer)


@dataclass
class VerificationReport:
    op: str
    weight_sum: Fraction
    rows: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.weight_sum == 1 and all(parent == mixed for _, parent, mixed in self.rows)

    def violations(self) -> list:
        return [(q, parent, mixed, parent - mixed) for q, parent, mixed in self.rows if parent != mixed]


def verify_reduction(step: ReductionStep, queries=QUERIES) -> VerificationReport:
    """Check parent probability == sum of weight * child probability, exactly."""
    report = VerificationReport(step.op, step.weight_sum())
    pspec = step.parent.spec()
    for which, layer in queries:
        parent = exact_prob(step.parent.g, pspec, _query(step.parent, which, layer))
        mixed = sum((w * exact_prob(c.g, c.spec(), _query(c, which, layer)) for c, w in step.children),
                    Fraction(0))
        label = f"{step.parent.u if which == 'uv' else step.parent.v}_0 -> " \
                f"{step.parent.v if which == 'uv' else step.parent.u}_{layer}"
        report.rows.append((label, parent, mixed))
    return report


# --- site enumeration -------------------------------------------------------------------


def applicable_sites(tr: Triple):
    """Yield ``(op_name, step)`` for every site where an operation applies."""
    g = tr.g
    for e, (a, b) in enumerate(g.edges):
        if a in tr.t and b in tr.t:
            yield "t_contract", t_contract(tr, e)
    for x in range(g.n):
        inc = g.incident(x)
        if len(inc) == 2 and x not in tr.t and x not in (tr.u, tr.v) \
                and any(tr.partition.is_singleton(e) for e in inc):
            yield "v2_reduce", v2_reduce(tr, x)
        if len(inc) == 3 and x not in tr.t and x not in (tr.u, tr.v) \
                and all(tr.partition.is_singleton(e) for e in inc):
            yield "y_reduce", y_reduce(tr, x)
    for exy in range(g.m):
        for exz in range(g.m):
            for eyz in range(exz + 1, g.m):
                if len({exy, exz, eyz}) < 3:
                    continue
                try:
                    _triangle(tr, exy, exz, eyz)
                except ReductionError:
                    continue
                if not (tr.partition.is_singleton(exz) and tr.partition.is_singleton(eyz)):
                    continue
                if tr.partition.is_singleton(exy):
                    if exy < exz:
                        yield "delta_reduce", delta_reduce(tr, exy, exz, eyz)
                else:
                    yield "restricted_delta_reduce", restricted_delta_reduce(tr, exy, exz, eyz)
    for e in range(g.m):
        for f in range(e + 1, g.m):
            if _endpoints(g, e) == _endpoints(g, f) and tr.partition.is_singleton(e) \
                    and tr.partition.is_singleton(f):
                yield "parallel_pair_reduce", parallel_pair_reduce(tr, e, f)
