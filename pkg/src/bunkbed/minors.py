"""Canonical forms, isomorphism and brute-force minor tests for small graphs."""

from __future__ import annotations

from itertools import permutations

from .graph import (
    GraphError,
    MultiGraph,
    complete_bipartite,
    complete_graph,
    delete_vertex,
    merge_vertices,
)

MINOR_MAX_VERTICES = 10


def _multiplicity(g: MultiGraph) -> list[list[int]]:
    mat = [[0] * g.n for _ in range(g.n)]
    for a, b in g.edges:
        mat[a][b] += 1
        mat[b][a] += 1
    return mat


def _refine(mat, cells):
    while True:
        out = []
        for cell in cells:
            if len(cell) == 1:
                out.append(cell)
                continue
            sig = {v: tuple(sum(mat[v][w] for w in c) for c in cells) for v in cell}
            groups = {}
            for v in cell:
                groups.setdefault(sig[v], []).append(v)
            for key in sorted(groups):
                out.append(groups[key])
        if len(out) == len(cells):
            return out
        cells = out


def _search(mat, cells, best):
    cells = _refine(mat, cells)
    for k, cell in enumerate(cells):
        if len(cell) > 1:
            break
    else:
        order = [c[0] for c in cells]
        n = len(order)
        code = tuple(mat[order[i]][order[j]] for i in range(n) for j in range(i + 1, n))
        if best[0] is None or code < best[0]:
            best[0] = code
        return
    for v in cell:
        rest = [w for w in cell if w != v]
        _search(mat, cells[:k] + [[v], rest] + cells[k + 1:], best)


def canonical_form(g: MultiGraph) -> tuple:
    """Isomorphism invariant that is complete: equal iff isomorphic.

    Individualization-refinement over the edge-multiplicity matrix; the code is
    the lexicographically least upper triangle over all leaves of the search.
    """
    if g.n == 0:
        return (0, ())
    best = [None]
    _search(_multiplicity(g), [list(range(g.n))], best)
    return (g.n, best[0])


def from_canonical_form(code: tuple) -> MultiGraph:
    n, tri = code
    edges = []
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            edges += [(i, j)] * tri[k]
            k += 1
    return MultiGraph(n, tuple(edges))


def are_isomorphic(g: MultiGraph, h: MultiGraph) -> bool:
    if g.n != h.n or g.m != h.m:
        return False
    if sorted(map(len, map(g.incident, range(g.n)))) != sorted(map(len, map(h.incident, range(h.n)))):
        return False
    return canonical_form(g) == canonical_form(h)


def _contains_spanning(s: MultiGraph, h: MultiGraph) -> bool:
    """Is ``h`` a (not necessarily induced) subgraph of ``s`` on the same vertex count?"""
    present = {(min(a, b), max(a, b)) for a, b in s.edges}
    h_edges = [(a, b) for a, b in h.simple().edges]
    for perm in permutations(range(s.n)):
        if all((min(perm[a], perm[b]), max(perm[a], perm[b])) in present for a, b in h_edges):
            return True
    return False


def minor_contains(g: MultiGraph, h: MultiGraph) -> bool:
    """True iff ``h`` is a minor of ``g`` (parallel edges ignored on both sides).

    Every minor is a subgraph of a contraction, so the search walks contractions
    and vertex deletions, memoized on canonical form, and tests containment
    once the vertex count matches.
    """
    if g.n > MINOR_MAX_VERTICES:
        raise GraphError(f"minor test size guard: {g.n} > {MINOR_MAX_VERTICES} vertices")
    h = h.simple()
    k, eh = h.n, h.m
    seen = set()

    def visit(s: MultiGraph) -> bool:
        if s.n < k or s.m < eh:
            return False
        code = canonical_form(s)
        if code in seen:
            return False
        seen.add(code)
        if s.n == k:
            return _contains_spanning(s, h)
        for x in range(s.n):
            if visit(delete_vertex(s, x)[0]):
                return True
        for a, b in s.edges:
            if visit(merge_vertices(s, a, b).graph.simple()):
                return True
        return False

    return visit(g.simple())


K4 = complete_graph(4)
K23 = complete_bipartite(2, 3)


def is_outerplanar(g: MultiGraph) -> bool:
    """Outerplanar iff neither K_4 nor K_{2,3} is a minor."""
    return not minor_contains(g, K4) and not minor_contains(g, K23)
