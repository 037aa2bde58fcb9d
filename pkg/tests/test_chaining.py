import copy

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fatconv.chaining import build_chain, chain_depth, increment_halved_norm, verify_chain
from fatconv.classes import SampleVector, random_class, restrict
from fatconv.errors import InvalidArgument
from fatconv.geometry import PACKING_EXACT_CAP, distance, greedy_net, packing_number_exact


def test_chain_depth_examples():
    assert chain_depth(1.0, 1 / 8) == 7
    assert chain_depth(1.0, 0.9) == 4
    assert chain_depth(4.0, 1.0) == 6
    with pytest.raises(InvalidArgument):
        chain_depth(1.0, 1.0)


def test_increment_halved_norm_examples():
    assert increment_halved_norm([1, 1, 0, 0], 2) == 2.0
    assert increment_halved_norm([0.3, 2.0, 0.3, 2.0], 2) == 0.0
    assert increment_halved_norm([3, 0, 1, 0], 2) == 4.0
    with pytest.raises(InvalidArgument):
        increment_halved_norm([1, 2, 3], 1)


def test_singleton_net_chain():
    net = greedy_net(np.array([[0.25, 0.75]]), 0.3 / 8)
    ch = build_chain(net, 1.0, 0.3)
    assert all(g == [0] for g in ch.levels)
    assert np.array_equal(ch.increments[0][0], [0.25, 0.75])
    assert all(np.array_equal(h, [[0.0, 0.0]]) for h in ch.increments[1:])
    assert verify_chain(ch, 1).passed


def test_two_point_chain_hand_trace():
    net = greedy_net(np.array([[0.0], [1.0]]), 0.5 / 8)
    ch = build_chain(net, 1.0, 0.5)
    assert ch.levels[0] == [0]
    assert ch.levels[1] == [0, 1]
    assert {tuple(h) for h in ch.increments[1]} == {(0.0,), (1.0,)}


def test_scale_mismatch_rejected():
    net = greedy_net(np.array([[0.0, 1.0]]), 0.1)
    with pytest.raises(InvalidArgument):
        build_chain(net, 1.0, 0.5)


def random_chain(rng):
    m = int(rng.integers(1, 9))
    n_points = int(rng.integers(1, 7))
    cls = random_class(rng, n_points, int(rng.integers(1, 33)), int(rng.choice([2, 3, 5, 9])))
    x = rng.integers(0, n_points, size=2 * m)
    r = restrict(cls, SampleVector.of(x.tolist()))
    eps = float(rng.choice([0.05, 0.125, 0.3, 0.5, 0.9]))
    net = greedy_net(r.vectors, eps / 8)
    return build_chain(net, cls.range_width, eps), m, net


def corrupt(chain, rng):
    """Double one non-zero increment that some decomposition uses."""
    bad = copy.deepcopy(chain)
    used = sorted({(j, s) for d in bad.decomposition for j, s in enumerate(d)
                   if np.any(bad.increments[j][s] != 0)})
    j, s = used[int(rng.integers(len(used)))]
    bad.increments[j][s] = 2 * bad.increments[j][s]
    return bad


@given(st.integers(0, 2**32 - 1))
def test_built_chains_verify(seed):
    ch, m, net = random_chain(np.random.default_rng(seed))
    rep = verify_chain(ch, m)
    assert rep.passed, rep.witnesses
    # top level is the whole net, and the depth is deep enough to force it
    assert ch.radius(ch.depth) <= ch.epsilon / 8
    assert sorted(ch.levels[-1]) == list(range(len(net)))
    for j in range(1, ch.depth + 1):
        assert set(ch.levels[j - 1]) <= set(ch.levels[j])
    assert len(ch.levels[0]) == 1


@given(st.integers(0, 2**32 - 1))
def test_level_net_and_separation(seed):
    ch, _, _ = random_chain(np.random.default_rng(seed))
    pts = ch.points
    for j, g in enumerate(ch.levels):
        rad = ch.radius(j)
        for f in range(len(pts)):
            assert distance(pts[f], pts[ch.projections[j][f]]) <= rad + 1e-12
            assert ch.projections[j][f] in g
        for a in g:
            for b in g:
                if a < b:
                    assert distance(pts[a], pts[b]) > rad - 1e-12


@given(st.integers(0, 2**32 - 1))
def test_increment_norm_relation_and_packing(seed):
    ch, m, _ = random_chain(np.random.default_rng(seed))
    pts = ch.points
    for j in range(1, ch.depth + 1):
        for g in ch.levels[j]:
            p = ch.projections[j - 1][g]
            h = pts[g] - pts[p]
            assert increment_halved_norm(h, m) <= 4 * m * distance(pts[g], pts[p]) ** 2 + 1e-12
    if len(pts) <= PACKING_EXACT_CAP:
        for j, hs in enumerate(ch.increments):
            assert len(hs) <= packing_number_exact(pts, ch.radius(j))


def test_build_is_deterministic():
    a = random_chain(np.random.default_rng(99))[0]
    b = random_chain(np.random.default_rng(99))[0]
    assert a.to_json() == b.to_json()


def test_mutations_are_caught():
    rng = np.random.default_rng(8)
    caught = 0
    while caught < 10:
        ch, m, net = random_chain(rng)
        if len(net) < 2:
            continue
        rep = verify_chain(corrupt(ch, rng), m)
        assert not (rep.decomposition_ok and rep.increment_norm_ok)
        assert "decomposition" in rep.witnesses or "increment_norm" in rep.witnesses
        caught += 1


def test_length_mismatch_rejected():
    ch, m, _ = random_chain(np.random.default_rng(1))
    with pytest.raises(InvalidArgument):
        verify_chain(ch, m + 1)
