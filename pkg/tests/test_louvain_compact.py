import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from parlouvain import EdgeList, LouvainParams, build_csr, modularity, vertex_weights
from parlouvain.generators import planted_partition, random_graph
from parlouvain.louvain_compact import (CompactHashtable, HashtableFailure, PickLessSchedule,
                                        Status, SwitchDegrees, best_move, compact_louvain,
                                        compact_louvain_aggregate, compact_louvain_move, next_pow2,
                                        probe_slots, secondary_modulus)
from parlouvain.louvain_mc import louvain_aggregate

PROBINGS = ["linear", "quadratic", "double", "quadratic-double"]


@pytest.mark.parametrize("d,p1", [(1, 1), (2, 3), (3, 3), (4, 7), (7, 7), (8, 15), (1000, 1023)])
def test_capacity(d, p1):
    base, span, cap, p2 = CompactHashtable.view(10, d)
    assert (base, span, cap) == (20, 2 * d, p1)
    assert p2 == 2 * p1 + 1
    assert d <= cap <= max(span, 1)


@pytest.mark.parametrize("p1", [2**k - 1 for k in range(1, 16)])
def test_moduli_coprime(p1):
    assert next_pow2(p1) == p1 + 1
    assert math.gcd(p1, int(secondary_modulus(p1))) == 1


def test_probe_trace():
    assert probe_slots(10, 7, 15, 3) == [3, 4, 2]
    assert probe_slots(10, 7, 15, 3, "linear") == [3, 4, 5]
    assert probe_slots(10, 7, 15, 4, "quadratic") == [3, 4, 6, 3]
    assert probe_slots(10, 7, 15, 3, "double") == [3, 6, 2]


def test_collision_lands_on_second_probe():
    h = CompactHashtable(4)
    base, _, p1, p2 = h.view(0, 4)
    assert h.accumulate(base, p1, p2, 3, 1.0) is Status.DONE  # slot 3
    assert h.accumulate(base, p1, p2, 10, 2.0) is Status.DONE  # 10 % 7 == 3 is taken
    assert h.keys[4] == 10 and h.values[4] == 2.0


@pytest.mark.parametrize("probing", PROBINGS)
@pytest.mark.parametrize("shared", [False, True])
def test_accumulate_max_clear(probing, shared):
    h = CompactHashtable(5, probing=probing)
    base, span, p1, p2 = h.view(0, 5)
    for key, v in [(4, 1.0), (11, 2.0), (4, 2.5), (18, 0.5)]:
        assert h.accumulate(base, p1, p2, key, v, shared) is Status.DONE
    assert h.items(base, p1) == {4: 3.5, 11: 2.0, 18: 0.5}
    assert h.max(base, p1) == (4, 3.5)
    h.clear(base, span)
    assert h.items(base, p1) == {}


def test_max_tie_goes_to_lower_key():
    h = CompactHashtable(3)
    base, _, p1, p2 = h.view(0, 3)
    h.accumulate(base, p1, p2, 9, 1.0)
    h.accumulate(base, p1, p2, 2, 1.0)
    assert h.max(base, p1) == (2, 1.0)


def test_failure_when_full():
    h = CompactHashtable(1)
    base, _, p1, p2 = h.view(0, 1)
    assert h.accumulate(base, p1, p2, 0, 1.0) is Status.DONE
    assert h.accumulate(base, p1, p2, 1, 1.0) is Status.FAILED


def test_views_do_not_overlap():
    h = CompactHashtable(6)
    a = h.view(0, 2)
    b = h.view(2, 4)
    assert a[0] + a[1] <= b[0]
    h.accumulate(a[0], a[2], a[3], 5, 1.0)
    assert h.items(b[0], b[2]) == {}


@settings(max_examples=60)
@given(st.integers(1, 200), st.sampled_from(PROBINGS), st.data())
def test_matches_dict_under_sizing(d, probing, data):
    keys = data.draw(st.lists(st.integers(0, 10**6), min_size=1, max_size=d, unique=True))
    ops = data.draw(st.lists(st.tuples(st.sampled_from(keys), st.integers(1, 9)), max_size=3 * d))
    h = CompactHashtable(d, probing=probing)
    base, _, p1, p2 = h.view(0, d)
    ref = {}
    for key, v in ops:
        assert h.accumulate(base, p1, p2, key, float(v)) is Status.DONE
        ref[key] = ref.get(key, 0) + v
    assert h.items(base, p1) == ref


@pytest.mark.parametrize("rho,active", [(4, [2, 6, 10]), (2, [1, 3, 5, 7, 9]), (8, [4])])
def test_pick_less_schedule(rho, active):
    sched = PickLessSchedule(rho)
    assert [i for i in range(11) if sched.active(i)] == active


def test_pick_less_off():
    assert not any(PickLessSchedule(0).active(i) for i in range(100))
    with pytest.raises(ValueError):
        PickLessSchedule(3)


def _swap(rho, max_iterations=100):
    g = build_csr(EdgeList.from_triples(2, [(0, 1, 1.0)]))
    c = np.arange(2, dtype=np.uint32)
    k = vertex_weights(g)
    sigma = k.copy()
    hist = []
    it = compact_louvain_move(g, c, k, sigma, LouvainParams(thread_count=1,
                              max_iterations=max_iterations), PickLessSchedule(rho),
                              lockstep=True, history=hist)
    return it, c, hist


def test_swap_gadget_oscillates_without_pick_less():
    it, c, hist = _swap(0)
    assert it == 100 and hist == [1.0] * 100
    assert c.tolist() == [0, 1]


def test_swap_gadget_settles_with_pick_less():
    it, c, hist = _swap(4, max_iterations=20)
    assert it < 20 and hist[-1] == 0.0
    assert c.tolist() == [0, 0]


@pytest.mark.parametrize("threads", [1, 4])
def test_team_path_matches_serial(threads, rng):
    g = build_csr(random_graph(40, 600, seed=4, weights="int"))
    c = rng.integers(0, 10, g.num_vertices).astype(np.uint32)
    k = vertex_weights(g)
    sigma = np.bincount(c, weights=k, minlength=g.num_vertices)
    for i in range(g.num_vertices):
        a = best_move(g, c, k, sigma, i, team=False)
        b = best_move(g, c, k, sigma, i, team=True, threads=threads)
        assert a[0] == b[0]
        assert a[1] == pytest.approx(b[1], rel=1e-5, abs=1e-9)


@pytest.mark.parametrize("threads", [1, 3])
@pytest.mark.parametrize("switch", [1, 128])
def test_aggregate_matches_mc(threads, switch, rng):
    g = build_csr(random_graph(100, 500, seed=6, weights="int"))
    c = np.unique(rng.integers(0, 9, g.num_vertices), return_inverse=True)[1].astype(np.uint32)
    a = compact_louvain_aggregate(g, c, SwitchDegrees(switch, switch), threads)
    b = louvain_aggregate(g, c)

    def arcs(x):
        return sorted(zip(x.sources().tolist(), x.edges.tolist(), x.weights.tolist()))

    assert arcs(a) == arcs(b)


@pytest.mark.parametrize("threads", [1, 4])
@pytest.mark.parametrize("value_bits", [32, 64])
def test_barbell_end_to_end(barbell, threads, value_bits):
    res = compact_louvain(barbell, LouvainParams(thread_count=threads), value_bits=value_bits)
    assert res.membership.tolist() == [0, 0, 0, 1, 1, 1]
    assert res.modularity == pytest.approx(5 / 14)


@pytest.mark.parametrize("probing", PROBINGS)
def test_probing_modes_same_answer(probing):
    g = build_csr(random_graph(200, 1000, seed=8))
    ref = compact_louvain(g, LouvainParams(thread_count=1))
    res = compact_louvain(g, LouvainParams(thread_count=1), probing=probing)
    assert res.membership.tolist() == ref.membership.tolist()


def test_team_path_end_to_end():
    el, labels = planted_partition(4, 50, 0.5, 0.01, seed=2)
    g = build_csr(el)
    res = compact_louvain(g, LouvainParams(thread_count=2), sd=SwitchDegrees(8, 8))
    assert res.modularity == pytest.approx(modularity(g, res.membership))
    for b in range(4):
        assert len(set(res.membership[labels == b].tolist())) == 1


def test_hashtable_failure_surfaces(monkeypatch):
    import parlouvain.louvain_compact as lc

    def overflowing_kernel(*args):
        stats = args[-1]
        stats[:] = (0.0, 0, np.inf, 1)  # one scan reported an overflow

    monkeypatch.setattr(lc, "_cmove_serial", overflowing_kernel)
    g = build_csr(random_graph(30, 100, seed=1))
    with pytest.raises(HashtableFailure):
        compact_louvain(g, LouvainParams(thread_count=1))
