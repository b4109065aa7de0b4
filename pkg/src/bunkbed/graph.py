"""Finite multigraphs, bunkbed products and minor operations.

Vertices are ``0..n-1`` and edges are dense ids ``0..m-1`` (the position in
``MultiGraph.edges``), so any edge subset or 2-coloring is an ``m``-bit mask.
Parallel edges are allowed, loops are not.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple


class GraphError(ValueError):
    """Malformed graph, transversal, partition or unknown id."""


@dataclass(frozen=True)
class MultiGraph:
    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise GraphError(f"negative vertex count {self.n}")
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        for i, (a, b) in enumerate(edges):
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise GraphError(f"edge {i} = ({a}, {b}) has an endpoint out of range")
            if a == b:
                raise GraphError(f"edge {i} is a loop at {a}")
        object.__setattr__(self, "edges", edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(self.n)

    def incident(self, x: int) -> list[int]:
        return [i for i, (a, b) in enumerate(self.edges) if x in (a, b)]

    def degree(self, x: int) -> int:
        return len(self.incident(x))

    def other_end(self, e: int, x: int) -> int:
        a, b = self.edges[e]
        return b if a == x else a

    def neighbors(self, x: int) -> set[int]:
        return {self.other_end(e, x) for e in self.incident(x)}

    def edges_between(self, x: int, y: int) -> list[int]:
        return [i for i, (a, b) in enumerate(self.edges) if {a, b} == {x, y}]

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def simple(self) -> "MultiGraph":
        """Same vertices with parallel edges collapsed (first copy kept)."""
        seen = set()
        keep = []
        for a, b in self.edges:
            key = (min(a, b), max(a, b))
            if key not in seen:
                seen.add(key)
                keep.append(key)
        return MultiGraph(self.n, tuple(keep))

    def is_simple(self) -> bool:
        return self.simple().m == self.m


def check_transversal(g: MultiGraph, t: Iterable[int]) -> frozenset[int]:
    t = frozenset(int(x) for x in t)
    bad = [x for x in t if not 0 <= x < g.n]
    if bad:
        raise GraphError(f"transversal vertices out of range: {sorted(bad)}")
    return t


@dataclass(frozen=True)
class EdgePartition:
    """Partition of E(G) into blocks that must share a color."""

    blocks: tuple[frozenset[int], ...]

    @classmethod
    def singletons(cls, g: MultiGraph) -> "EdgePartition":
        return cls(tuple(frozenset([e]) for e in range(g.m)))

    @classmethod
    def build(cls, g: MultiGraph, blocks: Iterable[Iterable[int]]) -> "EdgePartition":
        blocks = tuple(frozenset(int(e) for e in b) for b in blocks)
        seen: set[int] = set()
        for b in blocks:
            if not b:
                raise GraphError("empty block in edge partition")
            if b & seen:
                raise GraphError(f"edge partition blocks overlap on {sorted(b & seen)}")
            if any(not 0 <= e < g.m for e in b):
                raise GraphError(f"edge partition block {sorted(b)} has unknown edge ids")
            if not _edges_connected(g, b):
                raise GraphError(f"edge partition block {sorted(b)} is not connected")
            seen |= b
        if len(seen) != g.m:
            missing = sorted(set(range(g.m)) - seen)
            raise GraphError(f"edge partition misses edges {missing}")
        return cls(tuple(sorted(blocks, key=min)))

    def block_of(self, e: int) -> frozenset[int]:
        for b in self.blocks:
            if e in b:
                return b
        raise GraphError(f"edge {e} is in no block")

    def is_singleton(self, e: int) -> bool:
        return len(self.block_of(e)) == 1

    def relabel(self, g: MultiGraph, edge_map: dict[int, int]) -> "EdgePartition":
        """Restrict to the edges that survive in ``edge_map`` (old id -> new id)."""
        blocks = []
        for b in self.blocks:
            nb = frozenset(edge_map[e] for e in b if e in edge_map)
            if nb:
                blocks.append(nb)
        return EdgePartition.build(g, blocks)

    def merged(self, g: MultiGraph, edges: Iterable[int]) -> "EdgePartition":
        """Join the blocks containing ``edges`` into one block."""
        edges = set(edges)
        joined = frozenset().union(*(b for b in self.blocks if b & edges))
        rest = [b for b in self.blocks if not b & edges]
        return EdgePartition.build(g, rest + [joined])


def _edges_connected(g: MultiGraph, edge_ids: frozenset[int]) -> bool:
    edge_ids = list(edge_ids)
    verts = {v for e in edge_ids for v in g.edges[e]}
    if not verts:
        return True
    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edge_ids:
        a, b = g.edges[e]
        parent[find(a)] = find(b)
    return len({find(v) for v in verts}) == 1


# --- bunkbed product -------------------------------------------------------

HORIZONTAL_0 = "horizontal-0"
HORIZONTAL_1 = "horizontal-1"
VERTICAL = "vertical"


@dataclass(frozen=True)
class BunkbedGraph:
    """G x K_2 with tagged edges.

    Vertex ``x`` of the base has images ``x`` (layer 0) and ``n + x`` (layer 1).
    Derived edge ids: ``e`` is e_0, ``m + e`` is e_1, ``2m + x`` is the
    vertical slot x_0 x_1.
    """

    base: MultiGraph
    graph: MultiGraph
    tags: tuple[tuple[str, int], ...]

    def node(self, x: int, layer: int) -> int:
        return x + layer * self.base.n

    def image(self, e: int, layer: int) -> int:
        return e + layer * self.base.m

    def vertical(self, x: int) -> int:
        return 2 * self.base.m + x


def build_bunkbed(g: MultiGraph) -> BunkbedGraph:
    n, m = g.n, g.m
    edges = [(a, b) for a, b in g.edges]
    edges += [(a + n, b + n) for a, b in g.edges]
    edges += [(x, x + n) for x in range(n)]
    tags = [(HORIZONTAL_0, e) for e in range(m)]
    tags += [(HORIZONTAL_1, e) for e in range(m)]
    tags += [(VERTICAL, x) for x in range(n)]
    return BunkbedGraph(g, MultiGraph(2 * n, tuple(edges)), tuple(tags))


# --- deletion and contraction ----------------------------------------------


class Contraction(NamedTuple):
    graph: MultiGraph
    transversal: frozenset[int]
    vertex_map: dict[int, int]
    edge_map: dict[int, int]


def _check_edge(g: MultiGraph, e: int) -> None:
    if not 0 <= e < g.m:
        raise GraphError(f"unknown edge id {e} (graph has {g.m} edges)")


def delete_edge(g: MultiGraph, e: int) -> tuple[MultiGraph, dict[int, int]]:
    """Return ``G \\ e`` and the map old edge id -> new edge id."""
    _check_edge(g, e)
    return delete_edges(g, [e])


def delete_edges(g: MultiGraph, drop: Iterable[int]) -> tuple[MultiGraph, dict[int, int]]:
    drop = set(drop)
    for e in drop:
        _check_edge(g, e)
    emap = {}
    keep = []
    for i, ab in enumerate(g.edges):
        if i not in drop:
            emap[i] = len(keep)
            keep.append(ab)
    return MultiGraph(g.n, tuple(keep)), emap


def delete_vertex(g: MultiGraph, x: int) -> tuple[MultiGraph, dict[int, int], dict[int, int]]:
    """Remove ``x`` and its incident edges. Returns graph, vertex map, edge map."""
    if not 0 <= x < g.n:
        raise GraphError(f"unknown vertex {x}")
    vmap = {y: (y if y < x else y - 1) for y in range(g.n) if y != x}
    emap = {}
    keep = []
    for i, (a, b) in enumerate(g.edges):
        if x not in (a, b):
            emap[i] = len(keep)
            keep.append((vmap[a], vmap[b]))
    return MultiGraph(g.n - 1, tuple(keep)), vmap, emap


def merge_vertices(g: MultiGraph, x: int, y: int, t: Iterable[int] = ()) -> Contraction:
    """Identify ``x`` and ``y``; edges between them become loops and vanish.

    The merged vertex takes the smaller id and is transversal iff x or y was.
    """
    t = check_transversal(g, t)
    if x == y:
        return Contraction(g, t, {v: v for v in range(g.n)}, {e: e for e in range(g.m)})
    lo, hi = min(x, y), max(x, y)
    vmap = {}
    for v in range(g.n):
        if v == hi:
            vmap[v] = lo
        else:
            vmap[v] = v if v < hi else v - 1
    emap = {}
    keep = []
    for i, (a, b) in enumerate(g.edges):
        na, nb = vmap[a], vmap[b]
        if na != nb:
            emap[i] = len(keep)
            keep.append((na, nb))
    new_t = frozenset(vmap[v] for v in t)
    return Contraction(MultiGraph(g.n - 1, tuple(keep)), new_t, vmap, emap)


def contract_edge(g: MultiGraph, t: Iterable[int], e: int) -> Contraction:
    """Contract ``e``; parallel edges stay, loops are dropped."""
    _check_edge(g, e)
    a, b = g.edges[e]
    return merge_vertices(g, a, b, t)


# --- connectivity ------------------------------------------------------------


def components(g: MultiGraph, removed: Iterable[int] = ()) -> list[frozenset[int]]:
    removed = set(removed)
    adj = g.adjacency()
    seen = set(removed)
    comps = []
    for s in range(g.n):
        if s in seen:
            continue
        seen.add(s)
        stack, comp = [s], [s]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
                    comp.append(y)
        comps.append(frozenset(comp))
    return comps


def is_connected(g: MultiGraph) -> bool:
    return len(components(g)) <= 1


def components_after_removal(g: MultiGraph, s: Iterable[int]) -> list[frozenset[int]]:
    return components(g, s)


def cut_vertices(g: MultiGraph) -> set[int]:
    base = len(components(g))
    return {x for x in range(g.n) if len(components(g, [x])) > base}


def separates(g: MultiGraph, c: Iterable[int], u: int, v: int) -> bool:
    """True iff ``u`` and ``v`` lie in different components of ``G - C``."""
    c = set(c)
    if u in c or v in c:
        return False
    for comp in components(g, c):
        if u in comp:
            return v not in comp
    return True


# --- small named graphs ------------------------------------------------------


def path_graph(k: int) -> MultiGraph:
    """Path with ``k`` edges, vertices 0..k in order."""
    return MultiGraph(k + 1, tuple((i, i + 1) for i in range(k)))


def cycle_graph(n: int) -> MultiGraph:
    return MultiGraph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete_graph(n: int) -> MultiGraph:
    return MultiGraph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def complete_bipartite(a: int, b: int) -> MultiGraph:
    return MultiGraph(a + b, tuple((i, a + j) for i in range(a) for j in range(b)))


def star_graph(k: int) -> MultiGraph:
    """Center 0 joined to leaves 1..k."""
    return MultiGraph(k + 1, tuple((0, i) for i in range(1, k + 1)))


# --- text instance format ------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    graph: MultiGraph
    t: frozenset[int]
    partition: EdgePartition
    names: tuple[str, ...] = ()

    def vertex(self, label: str) -> int:
        """Resolve a vertex label from the ``names:`` line, or an integer id."""
        if label in self.names:
            return self.names.index(label)
        try:
            x = int(label)
        except ValueError:
            raise GraphError(f"unknown vertex label {label!r}") from None
        if not 0 <= x < self.graph.n:
            raise GraphError(f"vertex {x} out of range")
        return x


def parse_instance(text: str) -> Instance:
    """Parse ``n m``, ``m`` lines ``a b``, ``T: ...``, optional ``U: ...`` and ``names: ...``."""
    lines = [(i + 1, ln.split("#")[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise GraphError("line 1: empty instance")

    def fail(lineno, msg):
        raise GraphError(f"line {lineno}: {msg}")

    lineno, head = lines[0]
    try:
        n, m = map(int, head.split())
    except ValueError:
        fail(lineno, f"expected 'n m', got {head!r}")
    if n < 0 or m < 0:
        fail(lineno, "negative counts")
    if len(lines) < 1 + m:
        fail(lines[-1][0], f"expected {m} edge lines")
    edges = []
    for lineno, ln in lines[1:1 + m]:
        try:
            a, b = map(int, ln.split())
        except ValueError:
            fail(lineno, f"expected an edge 'a b', got {ln!r}")
        if not (0 <= a < n and 0 <= b < n):
            fail(lineno, f"edge ({a}, {b}) has an endpoint out of range 0..{n - 1}")
        if a == b:
            fail(lineno, f"loop at vertex {a}")
        edges.append((a, b))
    g = MultiGraph(n, tuple(edges))
    t = None
    blocks = []
    names: tuple[str, ...] = ()
    for lineno, ln in lines[1 + m:]:
        tag, _, rest = ln.partition(":")
        tag = tag.strip()
        if tag == "T":
            if t is not None:
                fail(lineno, "second T: line")
            try:
                t = frozenset(int(x) for x in rest.split())
            except ValueError:
                fail(lineno, f"bad transversal list {rest.strip()!r}")
            bad = sorted(x for x in t if not 0 <= x < n)
            if bad:
                fail(lineno, f"transversal vertices out of range: {bad}")
        elif tag == "U":
            try:
                block = [int(x) for x in rest.split()]
            except ValueError:
                fail(lineno, f"bad block {rest.strip()!r}")
            bad = [e for e in block if not 0 <= e < m]
            if bad:
                fail(lineno, f"block has unknown edge ids {bad}")
            blocks.append((lineno, block))
        elif tag == "names":
            names = tuple(rest.split())
            if len(names) != n or len(set(names)) != n:
                fail(lineno, f"names: needs {n} distinct labels")
        else:
            fail(lineno, f"unexpected line {ln!r}")
    if t is None:
        fail(lines[-1][0], "missing T: line")
    if blocks:
        try:
            partition = EdgePartition.build(g, [b for _, b in blocks])
        except GraphError as err:
            fail(blocks[-1][0], str(err))
    else:
        partition = EdgePartition.singletons(g)
    return Instance(g, t, partition, names)


def format_instance(g: MultiGraph, t: Iterable[int] = (), partition: EdgePartition | None = None,
                    names: Iterable[str] = ()) -> str:
    out = [f"{g.n} {g.m}"]
    out += [f"{a} {b}" for a, b in g.edges]
    out.append("T:" + "".join(f" {x}" for x in sorted(t)))
    if partition is not None and any(len(b) > 1 for b in partition.blocks):
        out += ["U:" + "".join(f" {e}" for e in sorted(b)) for b in partition.blocks]
    names = tuple(names)
    if names:
        out.append("names: " + " ".join(names))
    return "\n".join(out) + "\n"


def read_instance(path) -> Instance:
    with open(path) as fh:
        return parse_instance(fh.read())


def induced_subgraph(g: MultiGraph, keep: Iterable[int]) -> tuple[MultiGraph, dict[int, int]]:
    """Subgraph on ``keep`` (all edges with both ends kept) and the vertex map."""
    keep = sorted(set(keep))
    vmap = {x: i for i, x in enumerate(keep)}
    edges = tuple((vmap[a], vmap[b]) for a, b in g.edges if a in vmap and b in vmap)
    return MultiGraph(len(keep), edges), vmap
