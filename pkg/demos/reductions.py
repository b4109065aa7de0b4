"""
Graph rewrites that preserve the colored connection probability
===============================================================

Each reduction replaces a (graph, T, u, v) triple by a weighted mixture of
smaller triples. ``verify_reduction`` recomputes every side exactly and
checks that the mixture reproduces the parent.
"""

from fractions import Fraction

from bunkbed import MultiGraph, path_graph, star_graph
from bunkbed.reductions import (
    HybridTriple,
    Triple,
    applicable_sites,
    e2_condition_edge,
    v2_reduce,
    verify_reduction,
    y_reduce,
)


def show(step):
    rep = verify_reduction(step)
    weights = ", ".join(str(w) for _, w in step.children)
    print(f"{step.op:<26} weights [{weights}]  {'exact' if rep.ok else 'MISMATCH'}")
    for query, parent, mixed in rep.rows:
        print(f"    {query}: parent {parent}, mixture {mixed}")


# A degree-2 vertex outside T: its two edges share a color or they do not.
show(v2_reduce(Triple.make(path_graph(2), (), 0, 2), 1))

# A degree-3 vertex: condition on which edge (if any) has the odd color.
show(y_reduce(Triple.make(star_graph(3), (), 1, 2), 0))

# Independent layers: condition one edge on how many of its images survive.
htr = HybridTriple(path_graph(2), (Fraction(1, 3), Fraction(1, 2)), frozenset({1}), 0, 2)
show(e2_condition_edge(htr, 0))

# Every site on the complete graph K4 with one transversal vertex.
k4 = MultiGraph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
ops = {}
for op, step in applicable_sites(Triple.make(k4, {3}, 0, 1)):
    ops.setdefault(op, []).append(verify_reduction(step).ok)
for op, oks in sorted(ops.items()):
    print(f"K4: {op} at {len(oks)} site(s), all exact: {all(oks)}")
