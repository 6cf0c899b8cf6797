import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dynkc.level import (build_level, sample_independent, sample_repeated_2k, select_radius,
                         terminal_level)
from dynkc.metric import MetricSpace
from dynkc.params import Params, coverage_rank

from conftest import line_metric, two_groups


def test_probability_clamps_to_one(rng):
    U = set(range(20))
    s = sample_independent(U, Params(k=2), 1024, rng)
    assert set(s.tolist()) == U


def test_single_point(rng):
    assert sample_independent({7}, Params(k=1, alpha=0.01), 10**6, rng).tolist() == [7]


def test_expected_sample_size():
    # alpha*k*log2 n = 4*2*10 = 80 points expected out of 10000
    sizes = [len(sample_independent(range(10000), Params(k=2), 1024, np.random.default_rng(s)))
             for s in range(200)]
    assert abs(np.mean(sizes) - 80) <= 0.15 * 80


def test_select_radius_on_a_line():
    m = line_metric(range(5))
    assert select_radius(m, range(5), [0], 0.5) == 2.0
    assert select_radius(m, range(5), range(5), 0.5) == 0.0
    assert select_radius(m, range(5), [0], 1.0) == 4.0


def test_coverage_rank_rounding():
    assert coverage_rank(0.1, 30) == 3
    assert coverage_rank(0.5, 5) == 3
    assert coverage_rank(0.01, 5) == 1


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=60), st.data())
def test_select_radius_matches_sorting(xs, data):
    m = line_metric(xs)
    n = len(xs)
    S = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=5, unique=True))
    beta = data.draw(st.floats(0.001, 1.0))
    d = np.sort(m.dist_matrix(range(n), sorted(S)).min(axis=1))
    assert select_radius(m, range(n), S, beta) == d[math.ceil(round(beta * n, 9)) - 1]


def test_repeated_2k_degenerate_round(rng):
    m = line_metric([0, 1, 5, 9])
    s, nu, ball = sample_repeated_2k(m, range(4), Params(k=2, sampler="repeated_2k"), 4, rng)
    assert s.tolist() == [0, 1, 2, 3] and nu == 0.0 and ball == {0, 1, 2, 3}


def test_repeated_2k_picks_the_best_subset():
    m = line_metric([0, 1, 10])
    p = Params(k=1, beta=1.0 - 1e-9, sampler="repeated_2k", c_trials=20)
    _, nu, _ = sample_repeated_2k(m, range(3), p, 8, np.random.default_rng(0))
    radii = [select_radius(m, range(3), pair, p.beta) for pair in ([0, 1], [0, 2], [1, 2])]
    assert nu == min(radii)


def test_repeated_2k_single_trial_is_one_generic_round():
    m = line_metric(np.arange(30.0) ** 1.5)
    p = Params(k=2, beta=0.3, sampler="repeated_2k", c_trials=0.01)
    s, nu, _ = sample_repeated_2k(m, range(30), p, 2, np.random.default_rng(3))
    want = np.sort(np.random.default_rng(3).choice(np.arange(30), size=4, replace=False))
    assert s.tolist() == want.tolist()
    assert nu == select_radius(m, range(30), want, 0.3)


@pytest.mark.parametrize("alpha", [4.0, 0.3])
def test_two_groups_radius(alpha):
    ok = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        m = two_groups(rng)
        lv = build_level(m, set(range(10)), Params(k=2, alpha=alpha, beta=0.5), 10, rng)
        ok += lv.nu <= 1.0
    assert ok >= 95


def test_level_invariants(rng):
    m = MetricSpace.euclidean(2)
    for i in range(300):
        m.add_point(i, rng.normal(size=2))
    U = set(range(300))
    p = Params(k=3, alpha=0.5, beta=0.2)
    lv = build_level(m, U, p, 300, rng)
    S = lv.S.centers()
    assert set(S) <= U and lv.B <= U
    d = m.dist_matrix(sorted(U), sorted(S)).min(axis=1)
    dd = dict(zip(sorted(U), d))
    assert lv.B == {q for q in U if dd[q] <= lv.nu}
    assert len(lv.B) >= p.beta * len(U)
    # minimality: the next realized value below nu covers too few
    below = d[d < lv.nu]
    if len(below):
        assert (d <= below.max()).sum() < p.beta * len(U)
    for q in lv.B:
        assert m.dist(q, lv.S.sigma[q]) == dd[q]
    assert lv.cnt == 0 and lv.n_base == 300


def test_coincident_samples_own_themselves():
    m = line_metric([0, 0, 0, 5])
    lv = build_level(m, {0, 1, 2, 3}, Params(k=5), 4, np.random.default_rng(0))
    for c in lv.S.centers():
        assert lv.S.sigma[c] == c


def test_terminal_level_is_identity():
    lv = terminal_level({1, 2})
    assert lv.terminal and lv.nu == 0.0 and lv.S.sigma == {1: 1, 2: 2}


def test_replace_deleted_keeps_slot():
    m = line_metric([0, 0.1, 0.2, 5])
    lv = build_level(m, {0, 1, 2, 3}, Params(k=1, alpha=0.01, beta=0.9), 4,
                     np.random.default_rng(1))
    c = lv.S.centers()[0]
    rest = lv.S.preimage(c) - {c}
    was, slot, new = lv.S.replace_deleted(c)
    assert was
    if rest:
        assert new == min(rest) and lv.S.slots[slot] == new
    lv.S.check()
