import math

import numpy as np
import pytest

from dynkc.level import Assignment
from dynkc.metric import MetricSpace
from dynkc.params import (Params, recourse_cap, size_bound_recourse, sync_budget, threshold,
                          t_max_recourse)
from dynkc.recourse import RecourseBicriteria
from dynkc.stream import AdversaryConfig, delete, generate_stream, insert

SMALL = Params(k=2, alpha=0.3)


def blob_metric(rng, n, dim=2):
    m = MetricSpace.euclidean(dim)
    centers = rng.uniform(0, 100, size=(5, dim))
    for i in range(n):
        m.add_point(i, centers[i % 5] + rng.normal(size=dim))
    return m


def test_small_n_is_one_terminal_level(rng):
    m = blob_metric(rng, 20)
    alg = RecourseBicriteria(m, Params(k=3), initial=range(20))
    assert alg.stack.t == 0 and alg.stack.levels[0].terminal
    assert alg.solution() == set(range(20))


def test_empty_and_single_start(rng):
    m = blob_metric(rng, 2)
    alg = RecourseBicriteria(m, Params(k=1))
    assert alg.solution() == set()
    alg.insert(0)
    assert alg.solution() == {0} and alg.stack.t == 0


def test_rebuild_partitions_and_level_count(rng):
    m = blob_metric(rng, 500)
    alg = RecourseBicriteria(m, SMALL, initial=range(500), check=True)
    st = alg.stack
    assert st.t >= 2
    assert st.t <= t_max_recourse(SMALL, 500)
    assert len(st.levels[-1].U) <= threshold(SMALL, 500)
    for j in range(st.t):
        lv, nxt = st.levels[j], st.levels[j + 1]
        assert nxt.U == lv.U - lv.B


def test_threshold_rule(rng):
    m = blob_metric(rng, 400)
    alg = RecourseBicriteria(m, SMALL, initial=range(400))
    st = alg.stack
    assert st.check_threshold(400) is None
    st.levels[2].cnt = st.levels[2].n_base  # over threshold
    st.levels[1].cnt = st.levels[1].n_base
    assert st.check_threshold(400) == 1


def test_inserts_force_a_rebuild():
    p = SMALL
    m = MetricSpace.euclidean(2)
    rng = np.random.default_rng(1)
    for i in range(300):
        m.add_point(i, rng.normal(size=2))
    alg = RecourseBicriteria(m, p, initial=range(300))
    before = len(alg.stack.rebuilds)
    need = math.floor(p.lam * threshold(p, 300)) + 1
    for i in range(300, 300 + need + 1):
        m.add_point(i, rng.normal(size=2))
        alg.insert(i)
    assert len(alg.stack.rebuilds) > before


def test_replacement_redirects_the_cluster():
    a = Assignment()
    a.add_center(5)
    a.assign(7, 5)
    a.assign(9, 5)
    was, slot, c = a.replace_deleted(5)
    assert was and c in (7, 9) and a.slots[slot] == c
    assert a.sigma[7] == a.sigma[9] == c
    a2 = Assignment()
    a2.add_center(1)
    assert a2.replace_deleted(1) == (True, 0, None)
    assert a2.replace_deleted(42) == (False, None, None)


def test_insertion_step_alone_changes_s_hat_by_one(rng):
    m = blob_metric(rng, 201)
    alg = RecourseBicriteria(m, SMALL, initial=range(200))
    alg.phase.S_hat.reset_delta()
    alg.P.add(200)
    alg.stack.insert(200)
    alg.phase.on_insert(200)
    assert alg.phase.S_hat.recourse() == 1


def test_delete_storm_keeps_support_live():
    cfg = AdversaryConfig("adaptive_delete_center", seed=3, n_init=300, n_updates=600,
                          delete_fraction=0.8, min_live=20)
    m = MetricSpace.euclidean(2)
    alg = RecourseBicriteria(m, SMALL, check=True)

    def fn(ev):
        alg.apply(ev)
        assert alg.solution() <= alg.P
        return alg.solution()

    generate_stream(cfg, fn)


def test_empty_phase_finishes_in_one_call(rng):
    m = blob_metric(rng, 1)
    alg = RecourseBicriteria(m, SMALL)
    alg.phase.sync()
    assert alg.phase.phase_ends >= 1


@pytest.mark.parametrize("budget", [1, 3, 10])
def test_phase_length_follows_the_budget(budget):
    rng = np.random.default_rng(budget)
    p = SMALL.with_(sync_budget=budget)
    m = blob_metric(rng, 400)
    alg = RecourseBicriteria(m, p, initial=range(400))
    ph = alg.phase
    # each phase touches at most |S_prev| + |I_prev| + |S_cur| occurrences
    for i in range(400, 700):
        m.add_point(i, rng.normal(size=2) * 30)
        work = len(ph.S_prev.centers()) + len(ph.I_prev) + len(ph.S_cur.centers())
        ends = ph.phase_ends
        alg.insert(i)
        if ph.phase_ends > ends:
            assert ph.phase_lengths[-1] <= math.ceil(work / budget) + 1 + len(ph.I_cur)


def test_size_bound_n100(rng):
    m = blob_metric(rng, 100)
    p = Params(k=3)
    alg = RecourseBicriteria(m, p, initial=range(100))
    assert alg.phase.S_hat.total <= size_bound_recourse(p, 100)


def test_recourse_cap_with_tiny_budget():
    p = SMALL.with_(sync_budget=2)
    cap = recourse_cap(p)
    assert cap == sync_budget(p) + 4
    m = MetricSpace.euclidean(2)
    alg = RecourseBicriteria(m, p, seed=1)
    worst = 0

    def fn(ev):
        nonlocal worst
        worst = max(worst, alg.apply(ev).recourse)
        return alg.solution()

    generate_stream(AdversaryConfig("adaptive_delete_center", 4, 300, 1500, 0.5), fn)
    assert worst <= cap


def test_unknown_delete_rejected(rng):
    m = blob_metric(rng, 3)
    alg = RecourseBicriteria(m, SMALL, initial=range(3))
    with pytest.raises(Exception):
        alg.apply(delete(17))
    with pytest.raises(Exception):
        alg.apply(insert(1, [0.0, 0.0]))


def test_sigma_hat_points_into_support():
    m = MetricSpace.euclidean(2)
    alg = RecourseBicriteria(m, SMALL, seed=2)

    def fn(ev):
        alg.apply(ev)
        sup = alg.solution()
        for q in alg.P:
            assert alg.sigma_hat()[q] in sup
        return sup

    generate_stream(AdversaryConfig("churn", 5, 200, 400), fn)
