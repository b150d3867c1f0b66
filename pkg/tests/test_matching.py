"""Blossom matcher: exactness against exhaustive search, input validation,
and backend parity between the compiled core and the pure-Python fallback.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmwpm.matching import (BACKEND, BRUTE_FORCE_MAX, MatchGraph, Matching,
                            brute_force_mwpm, mwpm)
from nmwpm.matching import _pure


def random_graph(rng, n, integer=False):
    w = rng.uniform(0.0, 10.0, size=(n, n))
    if integer:
        w = np.floor(w)
    w = np.triu(w, 1)
    return MatchGraph(n, w + w.T)


def test_graph_validation():
    with pytest.raises(ValueError):
        MatchGraph(4, np.zeros((3, 3)))           # shape mismatch
    bad = np.zeros((4, 4))
    bad[0, 1] = 1.0                               # asymmetric
    with pytest.raises(ValueError):
        MatchGraph(4, bad)
    nan = np.zeros((4, 4))
    nan[0, 1] = nan[1, 0] = float("nan")
    with pytest.raises(ValueError, match="NaN"):
        MatchGraph(4, nan)
    neg = np.zeros((4, 4))
    neg[0, 1] = neg[1, 0] = -1.0
    with pytest.raises(ValueError):
        MatchGraph(4, neg)


def test_matching_pairs_are_canonical():
    m = Matching.from_mate([1, 0, 3, 2])
    assert m.pairs == ((0, 1), (2, 3))
    assert m.partner() == {0: 1, 1: 0, 2: 3, 3: 2}


def test_two_vertices():
    g = MatchGraph(2, np.array([[0.0, 5.0], [5.0, 0.0]]))
    m = mwpm(g)
    assert m.pairs == ((0, 1),)
    assert m.total_weight(g) == 5.0


def test_square_prefers_cheap_diagonalless_pairing():
    # 0-1 and 2-3 cost 1+1; alternatives cost at least 4.
    w = np.array([
        [0.0, 1.0, 2.0, 9.0],
        [1.0, 0.0, 9.0, 2.0],
        [2.0, 9.0, 0.0, 1.0],
        [9.0, 2.0, 1.0, 0.0],
    ])
    m = mwpm(MatchGraph(4, w))
    assert m.pairs == ((0, 1), (2, 3))


def test_brute_force_is_independent_oracle():
    # Exhaustive (n-1)!! enumeration; serves as the ground truth for mwpm.
    rng = np.random.default_rng(0)
    g = random_graph(rng, 8)
    best = brute_force_mwpm(g)
    total = best.total_weight(g)
    # spot-check optimality against a few random perfect matchings
    for _ in range(50):
        perm = rng.permutation(8)
        pairs = tuple((perm[2 * i], perm[2 * i + 1]) for i in range(4))
        assert Matching(pairs).total_weight(g) >= total - 1e-12


def test_brute_force_refuses_large_graphs():
    g = MatchGraph(BRUTE_FORCE_MAX + 2,
                   np.zeros((BRUTE_FORCE_MAX + 2, BRUTE_FORCE_MAX + 2)))
    with pytest.raises(ValueError):
        brute_force_mwpm(g)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_mwpm_matches_brute_force_random(n):
    rng = np.random.default_rng(n)
    for trial in range(60):
        g = random_graph(rng, n, integer=(trial % 2 == 0))
        m = mwpm(g)
        ref = brute_force_mwpm(g)
        assert len(m.pairs) == n // 2
        assert math.isclose(m.total_weight(g), ref.total_weight(g),
                            rel_tol=0.0, abs_tol=1e-9)


def test_odd_vertex_count_rejected():
    g = MatchGraph(3, np.zeros((3, 3)))
    with pytest.raises(ValueError):
        mwpm(g)
    with pytest.raises(ValueError):
        brute_force_mwpm(g)


def test_empty_graph():
    g = MatchGraph(0, np.zeros((0, 0)))
    assert mwpm(g).pairs == ()
    assert brute_force_mwpm(g).pairs == ()


def test_zero_weights_still_perfect():
    g = MatchGraph(6, np.zeros((6, 6)))
    m = mwpm(g)
    assert len(m.pairs) == 3
    assert sorted(v for p in m.pairs for v in p) == list(range(6))


def test_duplicate_weights_deterministic():
    w = np.full((6, 6), 2.0)
    np.fill_diagonal(w, 0.0)
    g = MatchGraph(6, w)
    assert mwpm(g).pairs == mwpm(g).pairs


@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
@settings(max_examples=80, deadline=None)
def test_mwpm_optimal_property(half, seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, 2 * half)
    m = mwpm(g)
    ref = brute_force_mwpm(g)
    assert m.total_weight(g) <= ref.total_weight(g) + 1e-9


@pytest.mark.skipif(BACKEND != "cython",
                    reason="compiled core unavailable; nothing to compare")
def test_pure_backend_agrees_with_compiled_backend():
    rng = np.random.default_rng(99)
    for _ in range(40):
        n = int(rng.integers(1, 8)) * 2
        g = random_graph(rng, n)
        active = mwpm(g).total_weight(g)
        flip = float(g.weights.max()) + 1.0
        iu, ju = np.triu_indices(n, k=1)
        mate = _pure.solve(n, iu.tolist(), ju.tolist(),
                           (flip - g.weights[iu, ju]).tolist(),
                           maxcardinality=True)
        pure_total = Matching.from_mate(mate).total_weight(g)
        assert math.isclose(active, pure_total, abs_tol=1e-9)


def test_backend_is_reported():
    assert BACKEND in ("cython", "pure")


def test_total_weight_is_order_stable():
    # fsum over sorted pairs: permuting input pair order cannot change it.
    rng = np.random.default_rng(5)
    g = random_graph(rng, 10)
    m = mwpm(g)
    shuffled = Matching(tuple(reversed(m.pairs)))
    assert m.total_weight(g) == shuffled.total_weight(g)
