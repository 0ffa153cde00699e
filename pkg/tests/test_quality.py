import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parlouvain import (DegenerateGraphError, EdgeList, build_csr, community_aggregates,
                        count_communities, delta_modularity, modularity)
from parlouvain.oracle import bruteforce_modularity
from parlouvain.quality import gather_move_inputs


@st.composite
def graph_and_membership(draw, max_vertices=10):
    n = draw(st.integers(2, max_vertices))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1),
                                    st.integers(1, 10).map(float)), min_size=1, max_size=25))
    c = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    return build_csr(EdgeList.from_triples(n, edges)), np.array(c, dtype=np.uint32)


def test_barbell_split(barbell):
    assert modularity(barbell, [0, 0, 0, 1, 1, 1]) == pytest.approx(5 / 14, abs=1e-12)


def test_singletons_of_triangle(triangle):
    assert modularity(triangle, [0, 1, 2]) == pytest.approx(-1 / 3)
    assert modularity(triangle, [0, 0, 0]) == pytest.approx(0.0, abs=1e-15)


def test_degenerate_graph():
    g = build_csr(EdgeList.from_triples(3, []))
    with pytest.raises(DegenerateGraphError):
        modularity(g, [0, 1, 2])


def test_membership_length_checked(barbell):
    with pytest.raises(ValueError):
        modularity(barbell, [0, 1])


@given(graph_and_membership())
def test_matches_bruteforce(gc):
    g, c = gc
    assert modularity(g, c) == pytest.approx(bruteforce_modularity(g, c), abs=1e-12)


@given(graph_and_membership(), st.permutations(range(10)))
def test_relabel_invariance(gc, perm):
    g, c = gc
    relabelled = np.array(perm, dtype=np.uint32)[c]
    assert modularity(g, relabelled) == pytest.approx(modularity(g, c), abs=1e-12)


@given(graph_and_membership(), st.sampled_from([0.5, 2.0, 7.0]))
def test_weight_scaling_invariance(gc, factor):
    g, c = gc
    scaled = build_csr(EdgeList(g.num_vertices, g.sources(), g.edges, g.weights * factor),
                       symmetrize=False)
    assert modularity(scaled, c) == pytest.approx(modularity(g, c), abs=1e-9)


@given(graph_and_membership())
def test_bounds(gc):
    g, c = gc
    assert -0.5 - 1e-12 <= modularity(g, c) <= 1.0


@given(graph_and_membership())
def test_aggregates_invariants(gc):
    g, c = gc
    agg = community_aggregates(g, c)
    assert np.all(agg.sigma_internal <= agg.sigma_total + 1e-9)
    assert agg.sigma_total.sum() == pytest.approx(2 * g.total_weight)


@settings(max_examples=200)
@given(graph_and_membership(), st.data())
def test_delta_matches_recomputation(gc, data):
    g, c = gc
    i = data.draw(st.integers(0, g.num_vertices - 1))
    target = data.draw(st.integers(0, g.num_vertices - 1))
    moved = c.copy()
    moved[i] = target
    dq = delta_modularity(*gather_move_inputs(g, c, i, target))
    assert dq == pytest.approx(modularity(g, moved) - modularity(g, c), abs=1e-9)


def test_delta_staying_is_zero(barbell):
    c = np.array([0, 0, 0, 1, 1, 1])
    assert delta_modularity(*gather_move_inputs(barbell, c, 2, 0)) == pytest.approx(0.0, abs=1e-15)


def test_count_communities():
    assert count_communities([3, 3, 7, 0]) == 3
