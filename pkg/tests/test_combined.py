import numpy as np
import pytest

from dynkc.combined import Combined
from dynkc.metric import MetricSpace
from dynkc.params import Params, recourse_cap, rho
from dynkc.stream import AdversaryConfig, generate_stream

SMALL = Params(k=2, alpha=0.3)


def drive(alg, cfg, each):
    def fn(ev):
        each(alg, alg.apply(ev))
        return alg.solution()

    generate_stream(cfg, fn)


@pytest.mark.parametrize("outer", ["bicr-merged", "bicr-rec", "bicr-budget"])
def test_inner_tracks_the_support(outer):
    m = MetricSpace.euclidean(2)
    alg = Combined(m, SMALL, seed=1, check=True, sparsifier=outer)

    def each(a, r):
        assert a.inner.P == a.support()
        assert a.solution() <= a.support() <= a.P
        assert len(a.solution()) <= SMALL.k

    drive(alg, AdversaryConfig("churn", 1, 120, 120), each)


def test_recourse_bounded_by_outer_changes():
    m = MetricSpace.euclidean(2)
    alg = Combined(m, SMALL, seed=2)
    cap = recourse_cap(SMALL, rho(SMALL))
    prev = [alg.support()]

    def each(a, r):
        sup = a.support()
        changed = len(prev[0] ^ sup)
        prev[0] = sup
        assert a.last_inner_updates == changed
        assert r.recourse <= changed
        assert r.recourse <= cap
        assert a.max_inner_recourse <= 1

    drive(alg, AdversaryConfig("adaptive_delete_center", 2, 150, 150), each)


def test_unchanged_support_leaves_inner_alone():
    rng = np.random.default_rng(3)
    m = MetricSpace.euclidean(2)
    for i in range(20):
        m.add_point(i, rng.normal(size=2))
    # tiny n: the sparsifier publishes all of P, so a delete changes the support
    alg = Combined(m, Params(k=2), initial=range(20))
    e0 = m.evals
    alg.outer.phase.S_hat.reset_delta()
    assert alg._replay() == 0 and m.evals == e0


def test_work_adds_both_layers():
    m = MetricSpace.euclidean(2)
    alg = Combined(m, SMALL, seed=4)

    def each(a, r):
        assert r.work == a.last_outer_work + a.last_inner_work

    drive(alg, AdversaryConfig("oblivious_random", 4, 100, 80), each)
