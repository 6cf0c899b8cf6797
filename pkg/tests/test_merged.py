import numpy as np

from dynkc.merged import MergedBicriteria
from dynkc.metric import MetricSpace
from dynkc.params import Params, recourse_cap, rho, size_bound_merged
from dynkc.stream import AdversaryConfig, generate_stream

SMALL = Params(k=2, alpha=0.3)


def drive(alg, cfg, each=None):
    def fn(ev):
        r = alg.apply(ev)
        if each:
            each(alg, r)
        return alg.solution()

    generate_stream(cfg, fn)


def test_small_instance_publishes_everything():
    rng = np.random.default_rng(0)
    m = MetricSpace.euclidean(2)
    for i in range(25):
        m.add_point(i, rng.normal(size=2))
    alg = MergedBicriteria(m, Params(k=3), initial=range(25))
    assert alg.solution() == set(range(25))


def test_recourse_and_size_on_adaptive_stream():
    m = MetricSpace.euclidean(2)
    alg = MergedBicriteria(m, SMALL, seed=1, check=True)
    cap = recourse_cap(SMALL, rho(SMALL))
    worst = [0]

    def each(a, r):
        worst[0] = max(worst[0], r.recourse)
        assert r.recourse <= cap
        assert r.size <= size_bound_merged(SMALL, max(a.n, 1))
        assert a.solution() <= a.P

    drive(alg, AdversaryConfig("adaptive_delete_center", 1, 200, 150), each)
    assert worst[0] >= 1


def test_work_is_the_engines():
    m = MetricSpace.euclidean(2)
    alg = MergedBicriteria(m, SMALL, seed=2)

    def each(a, r):
        assert r.work == a.last_inner_work <= a.work_cap()

    drive(alg, AdversaryConfig("churn", 2, 150, 100), each)


def test_sigma_hat_lands_in_support():
    m = MetricSpace.euclidean(2)
    alg = MergedBicriteria(m, Params(k=2), seed=3)

    def each(a, r):
        sup = a.solution()
        sh = a.sigma_hat()
        assert all(sh[q] in sup for q in a.P)

    drive(alg, AdversaryConfig("oblivious_random", 3, 80, 120), each)


def test_same_seed_same_output():
    def run():
        m = MetricSpace.euclidean(2)
        alg = MergedBicriteria(m, SMALL, seed=4)
        out = []
        drive(alg, AdversaryConfig("oblivious_random", 4, 120, 60),
              lambda a, r: out.append((r.recourse, r.size, r.work)))
        return out, alg.multiset()

    assert run() == run()
