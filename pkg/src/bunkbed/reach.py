"""Reachability semantics for the percolation and orientation models.

Colorings and orientations are ``m``-bit masks. In a coloring bit ``e`` set
means edge ``e`` is blue (upstairs, layer 1), clear means red (layer 0). In an
orientation bit ``e`` set means edge ``e = (a, b)`` points ``a -> b`` as
stored, clear means ``b -> a``.

An endpoint ``(x, layer)`` is vertex ``x`` entered along a red edge / with the
edge direction (layer 0) or along a blue edge / against it (layer 1). At a
transversal vertex both layers are reachable from each other for free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .graph import BunkbedGraph, GraphError, MultiGraph

D3_MAX_EDGES = 12


class Endpoint(NamedTuple):
    vertex: int
    layer: int = 0


def _state(n: int, x: int, layer: int) -> int:
    return x + layer * n


def _endpoints(n: int, mask: int) -> frozenset[Endpoint]:
    return frozenset(Endpoint(i % n, i // n) for i in range(2 * n) if mask >> i & 1)


def _check_start(g: MultiGraph, start: Endpoint) -> None:
    if not 0 <= start.vertex < g.n or start.layer not in (0, 1):
        raise GraphError(f"start endpoint {tuple(start)} is out of range")


# --- undirected kernels ------------------------------------------------------


def labels(n: int, pairs: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    """Component representative (smallest member) of each of ``n`` nodes."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
    return tuple(find(x) for x in range(n))


def layered_labels(g: MultiGraph, t: Iterable[int], present0: int, present1: int) -> tuple[int, ...]:
    """Components of the bunkbed with verticals at ``t`` and the given horizontals.

    Node ``x`` is x_0 and node ``n + x`` is x_1.
    """
    n = g.n
    pairs = [(x, x + n) for x in t]
    for e, (a, b) in enumerate(g.edges):
        if present0 >> e & 1:
            pairs.append((a, b))
        if present1 >> e & 1:
            pairs.append((a + n, b + n))
    return labels(2 * n, pairs)


def subgraph_labels(g: MultiGraph, present: int) -> tuple[int, ...]:
    return labels(g.n, (ab for e, ab in enumerate(g.edges) if present >> e & 1))


def colored_reach(g: MultiGraph, t: Iterable[int], coloring: int, start: Endpoint) -> frozenset[Endpoint]:
    """Endpoints reachable by walks that change color only at ``t``."""
    start = Endpoint(*start)
    _check_start(g, start)
    full = (1 << g.m) - 1
    lab = layered_labels(g, t, full & ~coloring, coloring)
    root = lab[_state(g.n, *start)]
    return frozenset(Endpoint(i % g.n, i // g.n) for i, r in enumerate(lab) if r == root)


def subgraph_reach(bb: BunkbedGraph, present: int, start: Endpoint) -> frozenset[Endpoint]:
    """Component of ``start`` in the bunkbed restricted to the ``present`` derived edges."""
    start = Endpoint(*start)
    _check_start(bb.base, start)
    lab = subgraph_labels(bb.graph, present)
    n = bb.base.n
    root = lab[bb.node(*start)]
    return frozenset(Endpoint(i % n, i // n) for i, r in enumerate(lab) if r == root)


def coloring_to_present(bb: BunkbedGraph, coloring: int, t: Iterable[int]) -> int:
    """Derived-edge mask of a coloring: e_0 iff red, e_1 iff blue, verticals at ``t``."""
    m = bb.base.m
    full = (1 << m) - 1
    present = (full & ~coloring) | (coloring << m)
    for x in t:
        present |= 1 << bb.vertical(x)
    return present


# --- directed kernels ----------------------------------------------------------


def _closure(succ: list[int], start_mask: int) -> int:
    seen = start_mask
    frontier = start_mask
    while frontier:
        nxt = 0
        i = 0
        f = frontier
        while f:
            if f & 1:
                nxt |= succ[i]
            f >>= 1
            i += 1
        frontier = nxt & ~seen
        seen |= frontier
    return seen


def _directed_succ(g: MultiGraph, orientation: int) -> list[int]:
    succ = [0] * g.n
    for e, (a, b) in enumerate(g.edges):
        if orientation >> e & 1:
            succ[a] |= 1 << b
        else:
            succ[b] |= 1 << a
    return succ


def _mode_succ(g: MultiGraph, t: Iterable[int], orientation: int) -> list[int]:
    # state x + mode*n; mode 0 follows edge directions, mode 1 goes against them
    n = g.n
    succ = [0] * (2 * n)
    for e, (a, b) in enumerate(g.edges):
        tail, head = (a, b) if orientation >> e & 1 else (b, a)
        succ[tail] |= 1 << head
        succ[head + n] |= 1 << (tail + n)
    for x in t:
        succ[x] |= 1 << (x + n)
        succ[x + n] |= 1 << x
    return succ


def directed_reach(g: MultiGraph, orientation: int, start: int) -> frozenset[int]:
    if not 0 <= start < g.n:
        raise GraphError(f"start vertex {start} is out of range")
    mask = _closure(_directed_succ(g, orientation), 1 << start)
    return frozenset(i for i in range(g.n) if mask >> i & 1)


def directed_reach_masks(g: MultiGraph, orientation: int) -> tuple[int, ...]:
    succ = _directed_succ(g, orientation)
    return tuple(_closure(succ, 1 << x) for x in range(g.n))


def _start_mask(n: int, t, start: Endpoint) -> int:
    mask = 1 << _state(n, *start)
    if start.vertex in t:
        mask |= 1 << start.vertex | 1 << (start.vertex + n)
    return mask


def mode_reach(g: MultiGraph, t: Iterable[int], orientation: int, start: Endpoint) -> frozenset[Endpoint]:
    """Walks that may switch between following and opposing edge directions at ``t``."""
    t = frozenset(t)
    start = Endpoint(*start)
    _check_start(g, start)
    mask = _closure(_mode_succ(g, t, orientation), _start_mask(g.n, t, start))
    return _endpoints(g.n, mask)


def mode_reach_masks(g: MultiGraph, t: Iterable[int], orientation: int) -> tuple[int, ...]:
    """Reach mask over the ``2n`` states from every start state."""
    t = frozenset(t)
    succ = _mode_succ(g, t, orientation)
    n = g.n
    return tuple(_closure(succ, _start_mask(n, t, Endpoint(i % n, i // n))) for i in range(2 * n))


def nonreversing_reach(g: MultiGraph, t: Iterable[int], orientation: int, start: Endpoint) -> frozenset[Endpoint]:
    """Like :func:`mode_reach` but no walk may cross an edge both ways.

    Crossing an edge again in the direction already used is allowed. Exact
    search over (vertex, mode, used-a->b mask, used-b->a mask).
    """
    if g.m > D3_MAX_EDGES:
        raise GraphError(f"nonreversing walk search guard: {g.m} > {D3_MAX_EDGES} edges")
    t = frozenset(t)
    start = Endpoint(*start)
    _check_start(g, start)
    return _endpoints(g.n, _nonreversing_mask(g, t, orientation, start))


def _nonreversing_mask(g: MultiGraph, t: frozenset[int], orientation: int, start: Endpoint) -> int:
    n = g.n
    moves = [[] for _ in range(n)]
    for e, (a, b) in enumerate(g.edges):
        fwd = orientation >> e & 1
        # (next vertex, bit for this crossing, bit for the opposite crossing, required mode)
        moves[a].append((b, 1 << (2 * e), 1 << (2 * e + 1), 0 if fwd else 1))
        moves[b].append((a, 1 << (2 * e + 1), 1 << (2 * e), 1 if fwd else 0))
    init = [(start.vertex, start.layer, 0)]
    if start.vertex in t:
        init.append((start.vertex, 1 - start.layer, 0))
    seen = set(init)
    stack = list(init)
    reached = 0
    while stack:
        x, mode, used = stack.pop()
        reached |= 1 << (x + mode * n)
        nxt = []
        if x in t:
            nxt.append((x, 1 - mode, used))
        for y, bit, rev, need in moves[x]:
            if need == mode and not used & rev:
                nxt.append((y, mode, used | bit))
        for s in nxt:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return reached


def nonreversing_reach_masks(g: MultiGraph, t: Iterable[int], orientation: int) -> tuple[int, ...]:
    if g.m > D3_MAX_EDGES:
        raise GraphError(f"nonreversing walk search guard: {g.m} > {D3_MAX_EDGES} edges")
    t = frozenset(t)
    n = g.n
    return tuple(_nonreversing_mask(g, t, orientation, Endpoint(i % n, i // n)) for i in range(2 * n))


# --- reversal involution ----------------------------------------------------


@dataclass(frozen=True)
class ReversalCertificate:
    X: frozenset[int]
    F: frozenset[int]
    reversed_orientation: int


def reaches_transversal(g: MultiGraph, t: Iterable[int], orientation: int, u: int) -> bool:
    t = frozenset(t)
    got = mode_reach(g, t, orientation, Endpoint(u, 0))
    return any(x.vertex in t for x in got)


def reversal_involution(g: MultiGraph, t: Iterable[int], orientation: int, u: int) -> ReversalCertificate:
    """Vertices reachable from u_-> in both modes, the edges inside them, and the
    orientation with every other edge reversed.
    """
    t = frozenset(t)
    if not reaches_transversal(g, t, orientation, u):
        raise ValueError(f"no walk from {u}-> to a transversal vertex; the involution is undefined")
    got = mode_reach(g, t, orientation, Endpoint(u, 0))
    both = frozenset(x for x in range(g.n) if Endpoint(x, 0) in got and Endpoint(x, 1) in got)
    inside = frozenset(e for e, (a, b) in enumerate(g.edges) if a in both and b in both)
    full = (1 << g.m) - 1
    flip = full & ~sum(1 << e for e in inside)
    return ReversalCertificate(both, inside, orientation ^ flip)
