"""Exact and Monte Carlo connection probabilities for the eight models.

Every exact quantity is a sum over configurations (edge subsets, colorings or
orientations) enumerated as bitmasks. Configurations are grouped by the
reachability structure they induce, so one enumeration answers every query on
the same graph and model, and the p-dependence of E1/E5 stays symbolic.

Kinds:

* ``E1`` every edge of the bunkbed (or of G itself) present with prob ``p``
* ``E2`` verticals exactly at ``t``, e_0 and e_1 independent with prob ``p_e``
* ``E3`` verticals at ``t``, each edge red or blue with prob 1/2
* ``E4`` as E3 but the blocks of ``partition`` share one color
* ``E5`` as E3 with red prob ``p``
* ``D1`` uniform random orientation, directed paths
* ``D2`` walks may switch between following and opposing directions at ``t``
* ``D3`` as D2 but no edge crossed both ways
* ``H``  per edge either E2-style (``p_vec[e]`` a probability) or committed to
  exactly one layer with prob 1/2 each (``p_vec[e] is None``)
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import lcm, sqrt
from typing import Iterable, Optional, Sequence

import numpy as np

from .graph import EdgePartition, GraphError, MultiGraph, build_bunkbed, check_transversal
from .poly import RootInterval, UniPoly, isolate_roots
from .reach import (
    D3_MAX_EDGES,
    Endpoint,
    directed_reach_masks,
    layered_labels,
    mode_reach_masks,
    nonreversing_reach_masks,
    subgraph_labels,
)

MAX_CONFIGURATIONS = 1 << 24
MAX_AVERAGE_VERTICES = 16
MC_CHUNK = 8192

KINDS = ("E1", "E2", "E3", "E4", "E5", "D1", "D2", "D3", "H")
LAYERED = ("E2", "E3", "E4", "E5", "H")
DIRECTED = ("D1", "D2", "D3")
COLORED = ("E3", "E4", "E5")


class ModelError(ValueError):
    """Spec/kind mismatch, guard exceeded or zero-probability conditioning."""


def _prob(x, what: str) -> Fraction:
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ModelError(f"{what} = {x} is not in [0, 1]")
    return x


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    p: Optional[Fraction] = None
    p_vec: Optional[tuple] = None
    t: frozenset = frozenset()
    partition: Optional[EdgePartition] = None
    on_bunkbed: bool = True

    def __post_init__(self):
        k = self.kind
        if k not in KINDS:
            raise ModelError(f"unknown model kind {k!r}")
        if k in ("E1", "E5"):
            if self.p is None:
                raise ModelError(f"{k} needs p")
            object.__setattr__(self, "p", _prob(self.p, "p"))
        elif self.p is not None:
            raise ModelError(f"{k} takes no scalar p")
        if k in ("E2", "H"):
            if self.p_vec is None:
                raise ModelError(f"{k} needs a probability vector")
            vec = tuple(None if x is None else _prob(x, "p_e") for x in self.p_vec)
            if k == "E2" and None in vec:
                raise ModelError("E2 needs a probability for every edge")
            object.__setattr__(self, "p_vec", vec)
        elif self.p_vec is not None:
            raise ModelError(f"{k} takes no probability vector")
        if self.partition is not None and k != "E4":
            raise ModelError(f"{k} takes no edge partition")
        if k == "E4" and self.partition is None:
            raise ModelError("E4 needs an edge partition")
        object.__setattr__(self, "t", frozenset(self.t))
        if self.t and k in ("E1", "D1"):
            raise ModelError(f"{k} has no transversal set")

    @classmethod
    def e1(cls, p, on_bunkbed: bool = True) -> "ModelSpec":
        return cls("E1", p=p, on_bunkbed=on_bunkbed)

    @classmethod
    def e2(cls, p_vec, t=()) -> "ModelSpec":
        return cls("E2", p_vec=tuple(p_vec), t=frozenset(t))

    @classmethod
    def e3(cls, t=()) -> "ModelSpec":
        return cls("E3", t=frozenset(t))

    @classmethod
    def e4(cls, t, partition: EdgePartition) -> "ModelSpec":
        return cls("E4", t=frozenset(t), partition=partition)

    @classmethod
    def e5(cls, p, t=()) -> "ModelSpec":
        return cls("E5", p=p, t=frozenset(t))

    @classmethod
    def d1(cls) -> "ModelSpec":
        return cls("D1")

    @classmethod
    def d2(cls, t=()) -> "ModelSpec":
        return cls("D2", t=frozenset(t))

    @classmethod
    def d3(cls, t=()) -> "ModelSpec":
        return cls("D3", t=frozenset(t))

    @classmethod
    def hybrid(cls, p_vec, t=()) -> "ModelSpec":
        return cls("H", p_vec=tuple(p_vec), t=frozenset(t))

    def check(self, g: MultiGraph) -> None:
        check_transversal(g, self.t)
        if self.p_vec is not None and len(self.p_vec) != g.m:
            raise ModelError(f"probability vector has {len(self.p_vec)} entries for {g.m} edges")
        if self.partition is not None:
            EdgePartition.build(g, self.partition.blocks)
        if self.kind == "D3" and g.m > D3_MAX_EDGES:
            raise ModelError(f"D3 guard: {g.m} > {D3_MAX_EDGES} edges")

    def label(self) -> str:
        parts = [self.kind]
        if self.p is not None:
            parts.append(f"p={self.p}")
        if self.p_vec is not None:
            parts.append("p_vec=[" + ",".join("*" if x is None else str(x) for x in self.p_vec) + "]")
        if self.kind not in ("E1", "D1"):
            parts.append("T={" + ",".join(map(str, sorted(self.t))) + "}")
        if self.partition is not None:
            parts.append("U=" + "|".join(",".join(map(str, sorted(b))) for b in self.partition.blocks))
        if self.kind == "E1" and not self.on_bunkbed:
            parts.append("on G")
        return " ".join(parts)


@dataclass(frozen=True)
class Query:
    """From ``(u, start_layer)`` to ``(v, target_layer)``; ``joint`` adds targets
    that must all be reached as well. For D-models layer 0 is "with the
    direction" and layer 1 "against".
    """

    u: int
    v: int
    target_layer: int = 0
    start_layer: int = 0
    joint: tuple = ()

    def targets(self) -> tuple[Endpoint, ...]:
        return (Endpoint(self.v, self.target_layer),) + tuple(Endpoint(*x) for x in self.joint)

    def start(self) -> Endpoint:
        return Endpoint(self.u, self.start_layer)


# --- configuration distributions ---------------------------------------------


@dataclass
class _Dist:
    """Reachability keys with their accumulated weight.

    Binary models (every factor a two-way choice) store ``{(key, ones): count}``
    where ``ones`` counts factors at choice 1; ``one_prob`` maps a parameter to
    the probability of choice 1. General models store ``{key: Fraction}``.
    """

    style: str  # "labels" | "directed" | "mode"
    n_nodes: int
    binary: bool
    bits: int = 0
    table: dict = field(default_factory=dict)
    denominator: int = 1

    def counts(self, event) -> list[int]:
        """Integer mass of ``event`` per number of 1-choices (binary) or in total."""
        ident = event.ident() if hasattr(event, "ident") else None
        if ident is not None:
            memo = self.__dict__.setdefault("_memo", {})
            if ident not in memo:
                memo[ident] = self._counts(event)
            return memo[ident]
        return self._counts(event)

    def _counts(self, event) -> list[int]:
        if not self.binary:
            return [sum(w for key, w in self.table.items() if event(key))]
        cnt = [0] * (self.bits + 1)
        for (key, ones), count in self.table.items():
            if event(key):
                cnt[ones] += count
        return cnt

    def weight(self, event, q=Fraction(1, 2)):
        return self.combine(self.counts(event), q)

    def combine(self, cnt: list[int], q=Fraction(1, 2)):
        if not self.binary:
            return Fraction(cnt[0], self.denominator)
        total = Fraction(0) if not isinstance(q, UniPoly) else UniPoly()
        for ones, c in enumerate(cnt):
            if c:
                total = total + c * q ** ones * (1 - q) ** (self.bits - ones)
        return total

    @property
    def total_counts(self) -> list[int]:
        if not hasattr(self, "_totals"):
            self._totals = self.counts(lambda key: True)
        return self._totals


def _block_masks(g: MultiGraph, spec: ModelSpec) -> list[int]:
    if spec.kind == "E4":
        return [sum(1 << e for e in b) for b in spec.partition.blocks]
    return [1 << e for e in range(g.m)]


def _expand(masks: list[int]) -> list[int]:
    """Union of the masks selected by each bit pattern, for all 2^k patterns."""
    out = [0] * (1 << len(masks))
    for c in range(1, len(out)):
        low = c & -c
        out[c] = out[c ^ low] | masks[low.bit_length() - 1]
    return out


def _constraint_ok(b1: int, constraints) -> bool:
    for (e, f), rel in constraints:
        same = (b1 >> e & 1) == (b1 >> f & 1)
        if same != (rel == "same"):
            return False
    return True


def _binary_kernel(g: MultiGraph, spec: ModelSpec):
    """Number of choice bits and a function from a choice pattern to its key."""
    kind = spec.kind
    if kind == "E1":
        target = build_bunkbed(g).graph if spec.on_bunkbed else g
        return target.m, "labels", target.n, lambda c: subgraph_labels(target, c)
    if kind in COLORED:
        masks = _block_masks(g, spec)
        full = (1 << g.m) - 1
        t = tuple(sorted(spec.t))
        if len(masks) <= 20:
            expanded = _expand(masks)
            blue = expanded.__getitem__
        else:
            def blue(c):
                return sum(mk for i, mk in enumerate(masks) if c >> i & 1)
        return len(masks), "labels", 2 * g.n, lambda c: layered_labels(g, t, full & ~blue(c), blue(c))
    if kind == "D1":
        return g.m, "directed", g.n, lambda c: directed_reach_masks(g, c)
    if kind == "D2":
        return g.m, "mode", 2 * g.n, lambda c: mode_reach_masks(g, spec.t, c)
    if kind == "D3":
        return g.m, "mode", 2 * g.n, lambda c: nonreversing_reach_masks(g, spec.t, c)
    raise ModelError(f"{kind} is not a binary-choice model")


def _general_factors(g: MultiGraph, spec: ModelSpec) -> list[list[tuple[int, int, Fraction]]]:
    factors = []
    half = Fraction(1, 2)
    for e, pe in enumerate(spec.p_vec):
        bit = 1 << e
        if pe is None:
            outs = [(bit, 0, half), (0, bit, half)]
        else:
            outs = [
                (bit, bit, pe * pe),
                (bit, 0, pe * (1 - pe)),
                (0, bit, (1 - pe) * pe),
                (0, 0, (1 - pe) * (1 - pe)),
            ]
        factors.append([o for o in outs if o[2]])
    return factors


def _count_configurations(g: MultiGraph, spec: ModelSpec) -> int:
    kind = spec.kind
    if kind == "E1":
        return 1 << ((2 * g.m + g.n) if spec.on_bunkbed else g.m)
    if kind == "E4":
        return 1 << len(spec.partition.blocks)
    if kind in ("E2", "H"):
        return 4 ** sum(x is not None for x in spec.p_vec) * 2 ** sum(x is None for x in spec.p_vec)
    return 1 << g.m


def _guard(g: MultiGraph, spec: ModelSpec) -> None:
    spec.check(g)
    total = _count_configurations(g, spec)
    if total > MAX_CONFIGURATIONS:
        raise ModelError(f"enumeration guard: {total} configurations > 2^24")


def _dist_key(spec: ModelSpec) -> ModelSpec:
    # E1/E5 enumerations do not depend on p; share them across p values
    if spec.kind == "E1":
        return ModelSpec.e1(0, spec.on_bunkbed)
    if spec.kind == "E5":
        return ModelSpec.e5(0, spec.t)
    return spec


@lru_cache(maxsize=8192)
def _distribution(g: MultiGraph, spec: ModelSpec, constraints: tuple = ()) -> _Dist:
    if spec.kind in ("E2", "H"):
        dist = _Dist("labels", 2 * g.n, binary=False)
        t = tuple(sorted(spec.t))
        table = dist.table
        factors = []
        den = 1
        for outs in _general_factors(g, spec):
            d = 1
            for _, _, w in outs:
                d = lcm(d, w.denominator)
            factors.append([(x0, x1, int(w * d)) for x0, x1, w in outs])
            den *= d
        for combo in product(*factors):
            b0 = b1 = 0
            w = 1
            for x0, x1, wt in combo:
                b0 |= x0
                b1 |= x1
                w *= wt
            key = layered_labels(g, t, b0, b1)
            table[key] = table.get(key, 0) + w
        dist.denominator = den
        return dist
    bits, style, n_nodes, kernel = _binary_kernel(g, spec)
    dist = _Dist(style, n_nodes, binary=True, bits=bits)
    table = dist.table
    track_ones = spec.kind in ("E1", "E5")
    masks = _expand(_block_masks(g, spec)) if constraints else None
    for c in range(1 << bits):
        if constraints and not _constraint_ok(masks[c], constraints):
            continue
        key = (kernel(c), c.bit_count() if track_ones else 0)
        table[key] = table.get(key, 0) + 1
    return dist


def _one_prob(spec: ModelSpec, p):
    """Probability that a choice bit is 1 (edge present for E1, blue for E5)."""
    if spec.kind == "E1":
        return p
    if spec.kind == "E5":
        return 1 - p
    return Fraction(1, 2)


# --- events --------------------------------------------------------------------


def _node(g: MultiGraph, spec: ModelSpec, x: Endpoint) -> int:
    if not 0 <= x.vertex < g.n or x.layer not in (0, 1):
        raise GraphError(f"endpoint {tuple(x)} is out of range")
    if spec.kind == "D1" or (spec.kind == "E1" and not spec.on_bunkbed):
        if x.layer:
            raise ModelError(f"{spec.kind} on G has no layers; endpoint {tuple(x)}")
        return x.vertex
    return x.vertex + x.layer * g.n


class _Event:
    """Membership test on a reachability key; hashable so counts can be memoized."""

    __slots__ = ("start", "targets", "directed", "want")

    def __init__(self, start: int, targets: Sequence[int], directed: bool):
        self.start = start
        self.targets = tuple(sorted(set(targets)))
        self.directed = directed
        self.want = sum(1 << x for x in self.targets)

    def __call__(self, key) -> bool:
        if self.directed:
            return key[self.start] & self.want == self.want
        root = key[self.start]
        return all(key[x] == root for x in self.targets)

    def ident(self):
        return (self.start, self.targets, self.directed)


def _event(g: MultiGraph, spec: ModelSpec, start: Endpoint, targets: Sequence[Endpoint]) -> _Event:
    s = _node(g, spec, Endpoint(*start))
    ts = [_node(g, spec, Endpoint(*x)) for x in targets]
    return _Event(s, ts, spec.kind in DIRECTED)


def _weight(g, spec, start, targets, constraints=(), q=None):
    _guard(g, spec)
    dist = _distribution(g, _dist_key(spec), tuple(constraints))
    event = _event(g, spec, start, targets)
    q = _one_prob(spec, spec.p) if q is None else q
    return dist.weight(event, q), dist.combine(dist.total_counts, q)


def exact_prob(g: MultiGraph, spec: ModelSpec, q: Query) -> Fraction:
    """Exact probability that every target of ``q`` is reached from its start."""
    w, _ = _weight(g, spec, q.start(), q.targets())
    return w


def joint_prob(g: MultiGraph, spec: ModelSpec, start: Endpoint, targets: Iterable[Endpoint]) -> Fraction:
    w, _ = _weight(g, spec, Endpoint(*start), [Endpoint(*x) for x in targets])
    return w


def total_probability(g: MultiGraph, spec: ModelSpec) -> Fraction:
    _guard(g, spec)
    dist = _distribution(g, _dist_key(spec))
    return dist.combine(dist.total_counts, _one_prob(spec, spec.p))


def exact_prob_conditional(g: MultiGraph, spec: ModelSpec, q: Query, constraints) -> Fraction:
    """``P(q | constraints)`` where each constraint is ``((e, f), "same"|"different")``
    on edge colors.
    """
    if spec.kind not in COLORED:
        raise ModelError(f"color constraints need a colored model, not {spec.kind}")
    cons = []
    for (e, f), rel in constraints:
        if rel not in ("same", "different"):
            raise ModelError(f"constraint relation {rel!r} is not 'same' or 'different'")
        if not (0 <= e < g.m and 0 <= f < g.m):
            raise GraphError(f"constraint on unknown edges ({e}, {f})")
        cons.append(((int(e), int(f)), rel))
    w, total = _weight(g, spec, q.start(), q.targets(), tuple(sorted(cons)))
    if total == 0:
        raise ModelError("conditioning event has probability zero")
    return w / total


def connection_polynomial(g: MultiGraph, spec: ModelSpec, q: Query) -> UniPoly:
    """Probability of ``q`` as a polynomial in ``p`` (E1 or E5; ``spec.p`` is ignored)."""
    if spec.kind not in ("E1", "E5"):
        raise ModelError(f"connection polynomials are defined for E1 and E5, not {spec.kind}")
    w, _ = _weight(g, spec, q.start(), q.targets(), q=_one_prob(spec, UniPoly.x()))
    return w if isinstance(w, UniPoly) else UniPoly.const(w)


def bbc_margin(g: MultiGraph, spec: ModelSpec, u: int, v: int) -> Fraction:
    """``P(u_0 -> v_0) - P(u_0 -> v_1)`` (with/against arrival for D-models)."""
    if spec.kind == "D1" or (spec.kind == "E1" and not spec.on_bunkbed):
        raise ModelError(f"{spec.kind} on G has no layers, so no bunkbed margin")
    return exact_prob(g, spec, Query(u, v, 0)) - exact_prob(g, spec, Query(u, v, 1))


# --- averages over transversal sets and the critical probability -----------------


def _subsets(n: int):
    for mask in range(1 << n):
        yield frozenset(x for x in range(n) if mask >> x & 1)


def avg_poly_over_T(g: MultiGraph, q: Query) -> UniPoly:
    """Uniform average over all T of the E5 probability of ``q``, as a polynomial in p."""
    if g.n > MAX_AVERAGE_VERTICES:
        raise ModelError(f"transversal average guard: {g.n} > {MAX_AVERAGE_VERTICES} vertices")
    total = UniPoly()
    for t in _subsets(g.n):
        total = total + connection_polynomial(g, ModelSpec.e5(0, t), q)
    return total * Fraction(1, 1 << g.n)


def avg_prob_over_T(g: MultiGraph, p, q: Query) -> Fraction:
    return avg_poly_over_T(g, q)(Fraction(p))


@dataclass(frozen=True)
class CriticalReport:
    difference: UniPoly
    roots: tuple[RootInterval, ...]

    @property
    def unique_crossing(self) -> bool:
        """Exactly one root, with the difference negative below and positive above."""
        return len(self.roots) == 1 and self.roots[0].left_sign == -1 and self.roots[0].right_sign == 1


def critical_probability(g: MultiGraph, u: int, v: int, tol) -> CriticalReport:
    """Roots in [0, 1] of the T-averaged layer-0 minus layer-1 probability."""
    tol = Fraction(tol)
    if tol <= 0:
        raise ModelError(f"tolerance must be positive, got {tol}")
    diff = avg_poly_over_T(g, Query(u, v, 0)) - avg_poly_over_T(g, Query(u, v, 1))
    if diff.is_zero():
        raise ModelError("the averaged difference is identically zero; no critical probability")
    return CriticalReport(diff, tuple(isolate_roots(diff, tol)))


# --- Monte Carlo -------------------------------------------------------------------


def _mc_chunk(args):
    g, spec, q, size, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    event = _event(g, spec, q.start(), q.targets())
    memo = {}
    hits = 0
    if spec.kind in ("E2", "H"):
        t = tuple(sorted(spec.t))
        factors = _general_factors(g, spec)
        cols = []
        for outs in factors:
            cum = np.cumsum([float(w) for _, _, w in outs])
            idx = np.searchsorted(cum, rng.random(size) * cum[-1], side="right")
            cols.append(np.minimum(idx, len(outs) - 1))
        for row in range(size):
            b0 = b1 = 0
            for f, outs in enumerate(factors):
                x0, x1, _ = outs[cols[f][row]]
                b0 |= x0
                b1 |= x1
            key = (b0, b1)
            if key not in memo:
                memo[key] = event(layered_labels(g, t, b0, b1))
            hits += memo[key]
        return hits
    bits, _, _, kernel = _binary_kernel(g, spec)
    one = float(_one_prob(spec, spec.p))
    draws = rng.random((size, bits)) < one
    weights = [1 << i for i in range(bits)]
    for row in draws:
        c = sum(w for w, b in zip(weights, row) if b)
        if c not in memo:
            memo[c] = event(kernel(c))
        hits += memo[c]
    return hits


def mc_estimate(g: MultiGraph, spec: ModelSpec, q: Query, samples: int, seed: int, jobs: int = 1):
    """Plain Monte Carlo frequency of ``q`` and its standard error.

    Samples are cut into fixed chunks, each with its own child seed, so the
    result depends on ``seed`` and ``samples`` only, never on ``jobs``.
    """
    if samples < 1:
        raise ModelError("need at least one sample")
    spec.check(g)
    _event(g, spec, q.start(), q.targets())
    sizes = [MC_CHUNK] * (samples // MC_CHUNK)
    if samples % MC_CHUNK:
        sizes.append(samples % MC_CHUNK)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    tasks = [(g, spec, q, s, ss) for s, ss in zip(sizes, seeds)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            hits = sum(pool.map(_mc_chunk, tasks))
    else:
        hits = sum(map(_mc_chunk, tasks))
    est = hits / samples
    return est, sqrt(est * (1 - est) / samples)


# --- reporting -----------------------------------------------------------------


def instance_hash(g: MultiGraph, spec: Optional[ModelSpec] = None) -> str:
    h = hashlib.sha256()
    h.update(f"{g.n} {g.edges}".encode())
    if spec is not None:
        h.update(spec.label().encode())
    return h.hexdigest()[:16]


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def report_record(g: MultiGraph, spec: ModelSpec, q: Query, value=None, poly: Optional[UniPoly] = None) -> dict:
    rec = {
        "instance": instance_hash(g, spec),
        "model": spec.label(),
        "query": {"u": q.u, "v": q.v, "start_layer": q.start_layer, "target_layer": q.target_layer,
                  "joint": [list(x) for x in q.joint]},
    }
    if value is not None:
        rec["value"] = fraction_str(value)
    if poly is not None:
        rec["polynomial"] = [fraction_str(c) for c in poly.coeffs]
    return rec
