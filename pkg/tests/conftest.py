"""Shared strategies and brute-force oracles.

The oracles here walk the definitions directly (breadth-first search over
explicit states, networkx connectivity) and share no code with the library's
union-find and bitmask kernels.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from itertools import product

import networkx as nx
import pytest
from hypothesis import strategies as st

from bunkbed.graph import MultiGraph


# --- strategies ----------------------------------------------------------------


@st.composite
def multigraphs(draw, min_n=1, max_n=4, max_m=5, connected=False):
    n = draw(st.integers(min_n, max_n))
    if n < 2:
        return MultiGraph(n)
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda ab: ab[0] != ab[1])
    edges = draw(st.lists(pairs, max_size=max_m))
    g = MultiGraph(n, tuple(edges))
    if connected:
        from bunkbed.graph import is_connected
        from hypothesis import assume
        assume(is_connected(g))
    return g


@st.composite
def graph_with_t(draw, **kw):
    g = draw(multigraphs(**kw))
    t = frozenset(draw(st.sets(st.integers(0, g.n - 1), max_size=g.n))) if g.n else frozenset()
    return g, t


# --- oracles -------------------------------------------------------------------------


def walk_colored(g: MultiGraph, t, coloring: int, start):
    """Endpoints reachable by walks changing color only at T (bit set = blue)."""
    seen = {tuple(start)}
    todo = deque([tuple(start)])
    while todo:
        x, layer = todo.popleft()
        nxt = []
        if x in t:
            nxt.append((x, 1 - layer))
        for e, (a, b) in enumerate(g.edges):
            if (coloring >> e & 1) != layer:
                continue
            if a == x:
                nxt.append((b, layer))
            if b == x:
                nxt.append((a, layer))
        for s in nxt:
            if s not in seen:
                seen.add(s)
                todo.append(s)
    return seen


def walk_modes(g: MultiGraph, t, orientation: int, start):
    """D2 states reachable: mode 0 follows directions, mode 1 opposes them."""
    seen = {tuple(start)}
    todo = deque([tuple(start)])
    while todo:
        x, mode = todo.popleft()
        nxt = [(x, 1 - mode)] if x in t else []
        for e, (a, b) in enumerate(g.edges):
            tail, head = (a, b) if orientation >> e & 1 else (b, a)
            if mode == 0 and tail == x:
                nxt.append((head, 0))
            if mode == 1 and head == x:
                nxt.append((tail, 1))
        for s in nxt:
            if s not in seen:
                seen.add(s)
                todo.append(s)
    return seen


def walk_trails(g: MultiGraph, t, orientation: int, start):
    """D3 states reachable by walks that never cross an edge both ways."""
    out = set()
    init = (start[0], start[1], frozenset())
    stack, seen = [init], {init}
    while stack:
        x, mode, used = stack.pop()
        out.add((x, mode))
        nxt = [(x, 1 - mode, used)] if x in t else []
        for e, (a, b) in enumerate(g.edges):
            tail, head = (a, b) if orientation >> e & 1 else (b, a)
            for frm, to, need in ((tail, head, 0), (head, tail, 1)):
                if frm == x and mode == need and (e, to, frm) not in used:
                    nxt.append((to, mode, used | {(e, frm, to)}))
        for s in nxt:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return out


def oracle_colored_prob(g, t, start, targets, red=Fraction(1, 2), blocks=None, constraints=()):
    """P(all targets reached) under independent block colors, by enumeration."""
    blocks = blocks or [[e] for e in range(g.m)]
    num = den = Fraction(0)
    for choice in product((0, 1), repeat=len(blocks)):
        coloring = 0
        w = Fraction(1)
        for blue, b in zip(choice, blocks):
            w *= (1 - red) if blue else red
            if blue:
                for e in b:
                    coloring |= 1 << e
        if any(((coloring >> e & 1) == (coloring >> f & 1)) != (rel == "same") for (e, f), rel in constraints):
            continue
        den += w
        got = walk_colored(g, t, coloring, start)
        if all(tuple(x) in got for x in targets):
            num += w
    return num / den


def oracle_orientation_prob(g, t, start, targets, walker):
    hits = 0
    for o in range(1 << g.m):
        got = walker(g, t, o, start)
        hits += all(tuple(x) in got for x in targets)
    return Fraction(hits, 1 << g.m)


def oracle_d1(g, u, v):
    hits = 0
    for o in range(1 << g.m):
        d = nx.MultiDiGraph()
        d.add_nodes_from(range(g.n))
        for e, (a, b) in enumerate(g.edges):
            d.add_edge(*((a, b) if o >> e & 1 else (b, a)))
        hits += nx.has_path(d, u, v)
    return Fraction(hits, 1 << g.m)


def oracle_percolation(nodes, edges, probs, s, targets):
    """Independent edge percolation on an explicit graph; P(s joined to all targets)."""
    total = Fraction(0)
    for keep in product((0, 1), repeat=len(edges)):
        w = Fraction(1)
        h = nx.MultiGraph()
        h.add_nodes_from(nodes)
        for k, (ab, pe) in zip(keep, zip(edges, probs)):
            w *= pe if k else 1 - pe
            if k:
                h.add_edge(*ab)
        if w and all(nx.has_path(h, s, x) for x in targets):
            total += w
    return total


def oracle_e1_bunkbed(g, p, start, target):
    n = g.n
    edges = [(a, b) for a, b in g.edges] + [(a + n, b + n) for a, b in g.edges] + [(x, x + n) for x in range(n)]
    return oracle_percolation(range(2 * n), edges, [Fraction(p)] * len(edges),
                              start[0] + start[1] * n, [target[0] + target[1] * n])


def oracle_e2(g, p_vec, t, start, target):
    n = g.n
    edges = [(a, b) for a, b in g.edges] + [(a + n, b + n) for a, b in g.edges] + [(x, x + n) for x in sorted(t)]
    probs = list(p_vec) * 2 + [Fraction(1)] * len(t)
    return oracle_percolation(range(2 * n), edges, probs, start[0] + start[1] * n, [target[0] + target[1] * n])


@pytest.fixture
def tmp_instance(tmp_path):
    def write(text, name="g.txt"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write
