from fractions import Fraction
from itertools import product

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bunkbed.graph import EdgePartition, GraphError, MultiGraph, cycle_graph, path_graph, star_graph
from bunkbed.lemmas import corrupt, handcrafted_triples, triple_steps
from bunkbed.models import ModelSpec, Query, exact_prob
from bunkbed.reach import Endpoint, colored_reach
from bunkbed.reductions import (
    HybridTriple,
    ReductionError,
    Triple,
    applicable_sites,
    delta_reduce,
    e2_condition_edge,
    mirror_config,
    mirror_edge_set,
    parallel_pair_reduce,
    restricted_delta_reduce,
    t_contract,
    v2_reduce,
    verify_reduction,
    y_reduce,
)

from conftest import graph_with_t, oracle_colored_prob

HALF, QUARTER = Fraction(1, 2), Fraction(1, 4)
TRIANGLE = cycle_graph(3)  # edges (0,1), (1,2), (2,0)


def oracle_hybrid(g, p_vec, t, start, target):
    """Enumerate every layer assignment: a None edge sits in exactly one layer,
    any other edge has each image independently with its probability."""
    n = g.n
    choices = [((0,), (1,)) if pe is None else ((), (0,), (1,), (0, 1)) for pe in p_vec]
    total = Fraction(0)
    for pick in product(*choices):
        w = Fraction(1)
        h = nx.MultiGraph()
        h.add_nodes_from(range(2 * n))
        h.add_edges_from((x, x + n) for x in t)
        for (a, b), pe, layers in zip(g.edges, p_vec, pick):
            if pe is None:
                w *= HALF
            else:
                w *= pe ** len(layers) * (1 - pe) ** (2 - len(layers))
            for layer in layers:
                h.add_edge(a + layer * n, b + layer * n)
        if w and nx.has_path(h, start[0] + start[1] * n, target[0] + target[1] * n):
            total += w
    return total


def triple_oracle(tr, layer):
    blocks = [sorted(b) for b in tr.partition.blocks]
    return oracle_colored_prob(tr.g, tr.t, (tr.u, 0), [(tr.v, layer)], blocks=blocks)


class TestOperationExamples:
    def test_t_contract(self):
        step = t_contract(Triple.make(path_graph(1), {0, 1}, 0, 1), 0)
        [(child, w)] = step.children
        assert w == 1 and child.g.n == 1 and child.g.m == 0
        assert child.t == {0} and child.u == child.v == 0

    def test_t_contract_needs_both_ends_in_t(self):
        with pytest.raises(ReductionError):
            t_contract(Triple.make(path_graph(1), {0}, 0, 1), 0)

    def test_v2_on_path(self):
        step = v2_reduce(Triple.make(path_graph(2), (), 0, 2), 1)
        (apart, w1), (joined, w2) = step.children
        assert w1 == w2 == HALF
        assert apart.g.n == 2 and apart.g.m == 0
        assert joined.g.n == 2 and joined.g.m == 1
        assert verify_reduction(step).ok

    @pytest.mark.parametrize("t, x", [({1}, 1), ((), 0), ((), 2)])
    def test_v2_preconditions(self, t, x):
        with pytest.raises(ReductionError):
            v2_reduce(Triple.make(path_graph(2), t, 0, 2), x)

    def test_v2_wrong_degree(self):
        with pytest.raises(ReductionError, match="degree"):
            v2_reduce(Triple.make(star_graph(3), (), 1, 2), 0)

    def test_delta_on_triangle(self):
        step = delta_reduce(Triple.make(TRIANGLE, (), 0, 1), 0, 2, 1)
        assert [w for _, w in step.children] == [QUARTER] * 4
        merged = step.children[3][0]
        assert merged.partition.block_of(0) == {0, 1, 2}
        assert verify_reduction(step).ok

    def test_delta_rejects_non_triangle(self):
        with pytest.raises(ReductionError, match="triangle"):
            delta_reduce(Triple.make(cycle_graph(4), (), 0, 1), 0, 1, 2)

    def test_delta_rejects_blocks(self):
        part = EdgePartition.build(TRIANGLE, [[0, 1], [2]])
        tr = Triple.make(TRIANGLE, (), 0, 1, part)
        with pytest.raises(ReductionError):
            delta_reduce(tr, 0, 2, 1)
        # only edge 2 is free, and restricted Delta needs two free edges
        with pytest.raises(ReductionError):
            restricted_delta_reduce(tr, 0, 2, 1)

    def test_restricted_delta_weights(self):
        g = MultiGraph(4, ((0, 1), (1, 2), (0, 2), (2, 3)))
        part = EdgePartition.build(g, [[1, 3], [0], [2]])
        step = restricted_delta_reduce(Triple.make(g, (), 0, 3, part), 1, 0, 2)
        assert [w for _, w in step.children] == [QUARTER, QUARTER, HALF]
        assert verify_reduction(step).ok

    def test_restricted_delta_needs_block(self):
        with pytest.raises(ReductionError, match="singleton"):
            restricted_delta_reduce(Triple.make(TRIANGLE, (), 0, 1), 0, 2, 1)

    def test_y_on_star(self):
        step = y_reduce(Triple.make(star_graph(3), (), 1, 2), 0)
        assert len(step.children) == 4 and step.weight_sum() == 1
        assert verify_reduction(step).ok

    @pytest.mark.parametrize("t, u, x", [({0}, 1, 0), ((), 0, 0), ((), 1, 1)])
    def test_y_preconditions(self, t, u, x):
        with pytest.raises(ReductionError):
            y_reduce(Triple.make(star_graph(3), t, u, 2), x)

    def test_parallel_pair(self):
        g = MultiGraph(3, ((0, 1), (0, 1), (1, 2)))
        step = parallel_pair_reduce(Triple.make(g, {1}, 0, 2), 0, 1)
        (single, _), (merged, _) = step.children
        assert single.g.m == 2 and merged.g.n == 2
        assert verify_reduction(step).ok
        with pytest.raises(ReductionError, match="parallel"):
            parallel_pair_reduce(Triple.make(g, (), 0, 2), 0, 2)

    def test_unknown_edge(self):
        with pytest.raises(GraphError):
            t_contract(Triple.make(path_graph(1), {0, 1}, 0, 1), 5)

    def test_e2_condition_weights(self):
        p = Fraction(1, 3)
        step = e2_condition_edge(HybridTriple(path_graph(2), (p, HALF), frozenset({1}), 0, 2), 0)
        assert [w for _, w in step.children] == [p * p, 2 * p * (1 - p), (1 - p) ** 2]
        both, one, none = (c for c, _ in step.children)
        assert both.g.n == 2 and one.p_vec == (None, HALF) and none.g.m == 1
        assert verify_reduction(step).ok

    def test_e2_condition_drops_zero_weights(self):
        step = e2_condition_edge(HybridTriple(path_graph(1), (Fraction(1),), frozenset(), 0, 1), 0)
        assert len(step.children) == 1 and step.children[0][1] == 1

    def test_e2_condition_rejects_one_layer_edge(self):
        with pytest.raises(ReductionError):
            e2_condition_edge(HybridTriple(path_graph(1), (None,), frozenset(), 0, 1), 0)

    def test_step_json(self):
        step = v2_reduce(Triple.make(path_graph(2), (), 0, 2), 1)
        out = step.to_json()
        assert out["op"] == "v2_reduce" and [c["weight"] for c in out["children"]] == ["1/2", "1/2"]


class TestSoundness:
    @settings(max_examples=80, deadline=None)
    @given(graph_with_t(min_n=2, max_n=4, max_m=5), st.data())
    def test_every_site_is_exact_against_oracle(self, gt, data):
        g, t = gt
        u = data.draw(st.integers(0, g.n - 1))
        v = data.draw(st.integers(0, g.n - 1))
        tr = Triple.make(g, t, u, v)
        for _, step in applicable_sites(tr):
            assert step.weight_sum() == 1
            rep = verify_reduction(step)
            assert rep.ok, rep.violations()
            for layer in (0, 1):
                mixed = sum(w * triple_oracle(c, layer) for c, w in step.children)
                assert triple_oracle(tr, layer) == mixed

    @settings(max_examples=60, deadline=None)
    @given(graph_with_t(min_n=2, max_n=4, max_m=4), st.data())
    def test_transversal_inheritance(self, gt, data):
        g, t = gt
        tr = Triple.make(g, t, 0, g.n - 1)
        for _, step in applicable_sites(tr):
            for child, _ in step.children:
                assert child.t <= set(range(child.g.n))
                assert len(child.t) <= len(t)
                assert child.g.m <= g.m

    @settings(max_examples=40, deadline=None)
    @given(graph_with_t(min_n=2, max_n=3, max_m=4), st.data())
    def test_e2_conditioning_against_oracle(self, gt, data):
        g, t = gt
        if g.m == 0:
            return
        vec = tuple(data.draw(st.sampled_from([None, QUARTER, HALF, Fraction(2, 3)])) for _ in range(g.m))
        e = data.draw(st.integers(0, g.m - 1))
        if vec[e] is None:
            vec = vec[:e] + (HALF,) + vec[e + 1:]
        htr = HybridTriple(g, vec, t, 0, 1)
        step = e2_condition_edge(htr, e)
        assert step.weight_sum() == 1
        for layer in (0, 1):
            parent = exact_prob(g, htr.spec(), Query(0, 1, layer))
            assert parent == oracle_hybrid(g, vec, t, (0, 0), (1, layer))
            mixed = sum(w * oracle_hybrid(c.g, c.p_vec, c.t, (c.u, 0), (c.v, layer)) for c, w in step.children)
            assert parent == mixed

    def test_handcrafted_triples_sample(self):
        steps = list(triple_steps(handcrafted_triples()[:4], all_t=False))
        assert {s.op for s in steps} >= {"parallel_pair_reduce", "restricted_delta_reduce", "delta_reduce"}
        assert all(verify_reduction(s).ok for s in steps)

    def test_corrupted_weights_detected(self):
        step = v2_reduce(Triple.make(path_graph(2), (), 0, 2), 1)
        bad = corrupt(step)
        assert bad.weight_sum() == 1
        rep = verify_reduction(bad)
        assert not rep.ok and rep.violations()

    def test_identity_step_verifies(self):
        from bunkbed.reductions import ReductionStep
        tr = Triple.make(cycle_graph(4), {2}, 0, 2)
        assert verify_reduction(ReductionStep("identity", tr, ((tr, Fraction(1)),))).ok


class TestMirror:
    def test_edge_set_on_path(self):
        assert mirror_edge_set(path_graph(2), {1}, {1}, 0, 2) == {1}

    def test_edge_set_errors(self):
        with pytest.raises(ReductionError, match="inside T"):
            mirror_edge_set(path_graph(2), (), {1}, 0, 2)
        with pytest.raises(ReductionError, match="separate"):
            mirror_edge_set(cycle_graph(4), {1}, {1}, 0, 2)

    @given(st.integers(0, 255), st.sets(st.integers(0, 7)))
    def test_coloring_involution(self, c, es):
        assert mirror_config(mirror_config(c, es), es) == c

    def test_present_mask_bijection(self):
        m, es = 3, {0, 2}
        width = 2 * m + 2
        images = {mirror_config(c, es, m) for c in range(1 << width)}
        assert images == set(range(1 << width))
        assert mirror_config(0b000_001, es, m) == 0b001_000
        assert all(mirror_config(mirror_config(c, es, m), es, m) == c for c in range(1 << width))

    @settings(max_examples=80, deadline=None)
    @given(graph_with_t(min_n=3, max_n=5, max_m=6), st.integers(0, 63))
    def test_mirroring_swaps_arrival_layer(self, gt, c):
        g, t = gt
        c &= (1 << g.m) - 1
        u, v = 0, g.n - 1
        if u in t or v in t:
            return
        from bunkbed.graph import separates
        if not separates(g, t, u, v):
            return
        es = mirror_edge_set(g, t, t, u, v)
        here = colored_reach(g, t, c, Endpoint(u, 0))
        there = colored_reach(g, t, mirror_config(c, es), Endpoint(u, 0))
        assert (Endpoint(v, 0) in here) == (Endpoint(v, 1) in there)
