"""Exact identity and inequality checks over a corpus of small graphs.

Each check returns a :class:`LemmaRow`: how many cases it looked at and a
description of every case that failed. ``verify_lemmas`` runs them all and
adds a negative control whose row is expected to fail.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional

from .graph import MultiGraph, components, cut_vertices, induced_subgraph
from .models import ModelSpec, Query, bbc_margin, exact_prob, fraction_str, joint_prob
from .reach import Endpoint, mode_reach, reaches_transversal, reversal_involution
from .reductions import (
    HybridTriple,
    Triple,
    applicable_sites,
    e2_condition_edge,
    verify_reduction,
)
from .search import InstanceFilter, cutset_condition, cycle_p_vec, enumerate_graphs


@dataclass
class LemmaRow:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)
    expect_pass: bool = True
    note: str = ""

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def as_expected(self) -> bool:
        return self.passed == self.expect_pass

    def fail(self, msg: str) -> None:
        self.failures.append(msg)

    def to_json(self) -> dict:
        return {"check": self.name, "cases": self.cases, "status": "pass" if self.passed else "fail",
                "expected": "pass" if self.expect_pass else "fail", "note": self.note,
                "failures": self.failures[:20]}


def _subsets(n: int):
    for mask in range(1 << n):
        yield frozenset(x for x in range(n) if mask >> x & 1)


def _tag(g: MultiGraph, t=None, u=None, v=None) -> str:
    s = f"n={g.n} edges={list(g.edges)}"
    if t is not None:
        s += f" T={sorted(t)}"
    if u is not None:
        s += f" u={u} v={v}"
    return s


def default_corpus(max_vertices: int = 4) -> list[MultiGraph]:
    return list(enumerate_graphs(InstanceFilter(max_vertices=max_vertices)))


# --- individual checks ---------------------------------------------------------------


def check_cutset(graphs: Iterable[MultiGraph]) -> LemmaRow:
    """E3 and E2 margins vanish when u or v is in T or T separates them."""
    row = LemmaRow("cutset equality (E3, E2)")
    for g in graphs:
        pv = cycle_p_vec(g)
        for t in _subsets(g.n):
            for u in range(g.n):
                for v in range(g.n):
                    if not cutset_condition(g, t, u, v):
                        continue
                    for spec in (ModelSpec.e3(t), ModelSpec.e2(pv, t)):
                        row.cases += 1
                        m = bbc_margin(g, spec, u, v)
                        if m != 0:
                            row.fail(f"{spec.kind} margin {fraction_str(m)} at {_tag(g, t, u, v)}")
    return row


def check_fewvertices(graphs: Iterable[MultiGraph]) -> LemmaRow:
    """E2 margins are nonnegative when |T| <= 1."""
    row = LemmaRow("|T| <= 1 nonnegativity (E2)")
    for g in graphs:
        pv = cycle_p_vec(g)
        for t in [frozenset()] + [frozenset({x}) for x in range(g.n)]:
            spec = ModelSpec.e2(pv, t)
            for u in range(g.n):
                for v in range(g.n):
                    row.cases += 1
                    m = bbc_margin(g, spec, u, v)
                    if m < 0:
                        row.fail(f"margin {fraction_str(m)} at {_tag(g, t, u, v)}")
    return row


def check_percolation_orientation_equal(graphs: Iterable[MultiGraph]) -> LemmaRow:
    """Half-probability percolation on G connects x to y exactly as often as a
    uniform orientation has a directed x-y path.
    """
    row = LemmaRow("E1(1/2) on G == D1")
    e1 = ModelSpec.e1(Fraction(1, 2), on_bunkbed=False)
    d1 = ModelSpec.d1()
    for g in graphs:
        for u in range(g.n):
            for v in range(g.n):
                row.cases += 1
                a, b = exact_prob(g, e1, Query(u, v)), exact_prob(g, d1, Query(u, v))
                if a != b:
                    row.fail(f"E1 {fraction_str(a)} != D1 {fraction_str(b)} at {_tag(g, None, u, v)}")
    return row


def check_d2(graphs: Iterable[MultiGraph]) -> LemmaRow:
    """D2 margins are nonnegative; orientations whose walks from u reach T
    contribute zero margin, and the reversal map on them is a certified involution.
    """
    row = LemmaRow("D2 margin and reversal involution")
    for g in graphs:
        for t in _subsets(g.n):
            for u in range(g.n):
                for v in range(g.n):
                    row.cases += 1
                    m = bbc_margin(g, ModelSpec.d2(t), u, v)
                    if m < 0:
                        row.fail(f"D2 margin {fraction_str(m)} at {_tag(g, t, u, v)}")
            for u in range(g.n):
                paired = [0] * g.n
                for o in range(1 << g.m):
                    if not reaches_transversal(g, t, o, u):
                        continue
                    cert = reversal_involution(g, t, o, u)
                    back = reversal_involution(g, t, cert.reversed_orientation, u)
                    if back.reversed_orientation != o or back.X != cert.X or back.F != cert.F or not cert.X:
                        row.fail(f"involution broken for orientation {o:b} at {_tag(g, t, u)}")
                    here = mode_reach(g, t, o, Endpoint(u, 0))
                    there = mode_reach(g, t, cert.reversed_orientation, Endpoint(u, 0))
                    for v in range(g.n):
                        if (Endpoint(v, 0) in here) != (Endpoint(v, 1) in there):
                            row.fail(f"reversal does not swap arrival at {v} for {o:b} at {_tag(g, t, u)}")
                        paired[v] += (Endpoint(v, 0) in here) - (Endpoint(v, 1) in here)
                for v in range(g.n):
                    if paired[v]:
                        row.fail(f"T-reaching margin {paired[v]} != 0 at {_tag(g, t, u, v)}")
    return row


def cut_vertex_split(g: MultiGraph, x: int, u: int):
    """Split at cut vertex ``x`` into u's side (plus x) and the rest (plus x).

    Returns ``(g1, map1, g2, map2)`` with vertex maps from ``g``.
    """
    side = next(c for c in components(g, [x]) if u in c)
    g1, m1 = induced_subgraph(g, side | {x})
    g2, m2 = induced_subgraph(g, set(range(g.n)) - side)
    return g1, m1, g2, m2


def check_cut_vertex_factorization(graphs: Iterable[MultiGraph]) -> LemmaRow:
    """E3 probabilities through a cut vertex expand over the two sides, and
    the margin factors into the two side margins.
    """
    row = LemmaRow("cut-vertex factorization (E3)")
    for g in graphs:
        for x in sorted(cut_vertices(g)):
            for u in range(g.n):
                if u == x:
                    continue
                g1, m1, g2, m2 = cut_vertex_split(g, x, u)
                for v in range(g.n):
                    if v == x or v in m1:
                        continue
                    for t in _subsets(g.n):
                        row.cases += 1
                        t1 = frozenset(m1[y] for y in t if y in m1)
                        t2 = frozenset(m2[y] for y in t if y in m2)
                        s1, s2 = ModelSpec.e3(t1), ModelSpec.e3(t2)
                        a, xa, b, vb = m1[u], m1[x], m2[x], m2[v]
                        to0 = exact_prob(g1, s1, Query(a, xa, 0))
                        to1 = exact_prob(g1, s1, Query(a, xa, 1))
                        both1 = joint_prob(g1, s1, Endpoint(a, 0), [Endpoint(xa, 0), Endpoint(xa, 1)])
                        f00 = exact_prob(g2, s2, Query(b, vb, 0, 0))
                        f01 = exact_prob(g2, s2, Query(b, vb, 1, 0))
                        f10 = exact_prob(g2, s2, Query(b, vb, 0, 1))
                        both2 = joint_prob(g2, s2, Endpoint(vb, 0), [Endpoint(b, 0), Endpoint(b, 1)])
                        whole = exact_prob(g, ModelSpec.e3(t), Query(u, v, 0))
                        if whole != to0 * f00 + to1 * f10 - both1 * both2:
                            row.fail(f"expansion fails at x={x} {_tag(g, t, u, v)}")
                        m = bbc_margin(g, ModelSpec.e3(t), u, v)
                        if m != (to0 - to1) * (f00 - f01):
                            row.fail(f"margin {fraction_str(m)} != product at x={x} {_tag(g, t, u, v)}")
    return row


def check_color_swap(graphs: Iterable[MultiGraph]) -> LemmaRow:
    """P(x_0 -> v_1) = P(x_1 -> v_0) and P(x_0, x_1 -> v_0) = P(x_0, x_1 -> v_1) under E3."""
    row = LemmaRow("color-swap symmetries (E3)")
    for g in graphs:
        for t in _subsets(g.n):
            spec = ModelSpec.e3(t)
            for x in range(g.n):
                for v in range(g.n):
                    row.cases += 1
                    if exact_prob(g, spec, Query(x, v, 1, 0)) != exact_prob(g, spec, Query(x, v, 0, 1)):
                        row.fail(f"cross-layer asymmetry x={x} {_tag(g, t, None)} v={v}")
                    xs = [Endpoint(x, 0), Endpoint(x, 1)]
                    if joint_prob(g, spec, Endpoint(v, 0), xs) != joint_prob(g, spec, Endpoint(v, 1), xs):
                        row.fail(f"joint asymmetry x={x} {_tag(g, t, None)} v={v}")
    return row


def _mg(n, edges):
    return MultiGraph(n, tuple(edges))


def handcrafted_triples() -> list[Triple]:
    """Ten small multigraph instances with nontrivial blocks, chosen so that every
    reduction (including restricted Delta and parallel pairs) has a site.
    """
    from .graph import EdgePartition

    def tr(g, t, u, v, blocks=None):
        part = None
        if blocks is not None:
            rest = [{e} for e in range(g.m) if not any(e in b for b in blocks)]
            part = EdgePartition.build(g, list(blocks) + rest)
        return Triple.make(g, t, u, v, part)

    return [
        tr(_mg(2, [(0, 1), (0, 1)]), (), 0, 1),
        tr(_mg(3, [(0, 1), (0, 1), (1, 2)]), {1}, 0, 2),
        tr(_mg(4, [(0, 1), (0, 2), (1, 2), (1, 3)]), (), 0, 2, [{0, 3}]),
        tr(_mg(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]), {3}, 0, 1, [{0, 4}]),
        tr(_mg(4, [(0, 1), (0, 2), (0, 3), (0, 3)]), (), 1, 2),
        tr(_mg(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 1)]), {2}, 0, 2),
        tr(_mg(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]), (), 0, 4, [{2, 3}]),
        tr(_mg(3, [(0, 1), (0, 1), (1, 2), (1, 2), (0, 2), (0, 2)]), {2}, 0, 1),
        tr(_mg(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]), (), 0, 1, [{0, 3}]),
        tr(_mg(4, [(0, 1), (1, 2), (1, 2), (1, 2), (2, 3)]), (), 0, 3),
    ]


def triple_steps(triples: Iterable[Triple], all_t: bool = True):
    """Every applicable step on each triple, over all T when ``all_t``."""
    for base in triples:
        ts = list(_subsets(base.g.n)) if all_t else [base.t]
        for t in ts:
            tr = replace(base, t=frozenset(t))
            for _, step in applicable_sites(tr):
                yield step
            htr = HybridTriple(tr.g, cycle_p_vec(tr.g), tr.t, tr.u, tr.v)
            for e in range(tr.g.m):
                yield e2_condition_edge(htr, e)


def reduction_steps(graphs: Iterable[MultiGraph], all_t: bool = True):
    """Every applicable reduction step (including E2 edge conditioning) on the corpus."""
    for g in graphs:
        ts = list(_subsets(g.n)) if all_t else [frozenset()]
        for t in ts:
            for u in range(g.n):
                for v in range(g.n):
                    tr = Triple.make(g, t, u, v)
                    for _, step in applicable_sites(tr):
                        yield step
                    htr = HybridTriple(g, cycle_p_vec(g), t, u, v)
                    for e in range(g.m):
                        yield e2_condition_edge(htr, e)


def check_reductions(graphs: Iterable[MultiGraph], all_t: bool = True,
                     triples: Optional[Iterable[Triple]] = None) -> LemmaRow:
    row = LemmaRow("reduction soundness")
    ops = set()
    steps = reduction_steps(graphs, all_t)
    if triples is not None:
        from itertools import chain
        steps = chain(steps, triple_steps(triples, all_t))
    for step in steps:
        row.cases += 1
        ops.add(step.op)
        rep = verify_reduction(step)
        if not rep.ok:
            row.fail(f"{step.op} ({step.notes}) at {_tag(step.parent.g, step.parent.t, step.parent.u, step.parent.v)}")
    row.note = "ops: " + ",".join(sorted(ops))
    return row


def corrupt(step, delta=Fraction(1, 8)):
    """The same step with ``delta`` moved from the last child's weight to the first."""
    kids = list(step.children)
    if len(kids) < 2:
        kids.append((step.parent, Fraction(0)))
    (c0, w0), (c1, w1) = kids[0], kids[-1]
    kids[0] = (c0, w0 + delta)
    kids[-1] = (c1, w1 - delta)
    return replace(step, children=tuple(kids))


def check_negative_control(graphs: Iterable[MultiGraph]) -> LemmaRow:
    """A perturbed-weight reduction; this row is expected to fail.

    Steps whose children all agree on every query cannot expose a perturbation,
    so the first step where it shows is used.
    """
    row = LemmaRow("negative control: perturbed reduction weight", expect_pass=False)
    for step in reduction_steps(graphs, all_t=False):
        if len(step.children) < 2:
            continue
        row.cases += 1
        rep = verify_reduction(corrupt(step))
        if rep.violations():
            q, parent, mixed, diff = rep.violations()[0]
            row.fail(f"{step.op}: {q} parent {fraction_str(parent)} vs mix {fraction_str(mixed)}")
            break
    return row


def check_disagreement_example(found: list[dict]) -> LemmaRow:
    """On the reconstructed instance, record the E3/D3 gap and confirm no violation."""
    row = LemmaRow("four-vertex instance: E3 vs D3")
    for r in found:
        row.cases += 1
        g, t, u, v = r["graph"], r["t"], r["u"], r["v"]
        gap = r["e3"][0] - r["d3"][0]
        m3 = bbc_margin(g, ModelSpec.e3(t), u, v)
        md = bbc_margin(g, ModelSpec.d3(t), u, v)
        row.note = f"E3 {fraction_str(r['e3'][0])} vs D3 {fraction_str(r['d3'][0])}, gap {fraction_str(gap)}"
        if m3 < 0 or md < 0:
            row.fail(f"negative margin on {_tag(g, t, u, v)}")
    return row


def verify_lemmas(graphs: Optional[list[MultiGraph]] = None, figure2: bool = False) -> list[LemmaRow]:
    graphs = default_corpus() if graphs is None else list(graphs)
    rows = [
        check_cutset(graphs),
        check_fewvertices(graphs),
        check_percolation_orientation_equal(graphs),
        check_d2(graphs),
        check_cut_vertex_factorization(graphs),
        check_color_swap(graphs),
        check_reductions(graphs, triples=handcrafted_triples()),
    ]
    if figure2:
        from .search import find_figure2
        rows.append(check_disagreement_example(find_figure2()))
    rows.append(check_negative_control(graphs))
    return rows
