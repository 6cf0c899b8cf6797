"""Run every algorithm against the same adversary and compare what it costs.

    python demos/adversary_tour.py [--updates 400] [--k 3]

The adversary always deletes a current center, the worst case for recourse.
Each row shows the worst per-update recourse and the mean work, with the
final cost beside a Gonzalez baseline.
"""

import argparse
import time

from dynkc.metric import MetricSpace
from dynkc.oracles import cost, gonzalez
from dynkc.params import Params
from dynkc.registry import ALGOS, make_algo
from dynkc.stream import AdversaryConfig, generate_stream


def tour(name, params, cfg):
    metric = MetricSpace.euclidean(cfg.dim)
    alg = make_algo(name, metric, params, seed=cfg.seed)
    worst, work = 0, 0

    def fn(ev):
        nonlocal worst, work
        r = alg.apply(ev)
        worst = max(worst, r.recourse)
        work += r.work
        return alg.solution()

    t0 = time.perf_counter()
    events = generate_stream(cfg, fn)
    dt = time.perf_counter() - t0
    base = cost(metric, alg.P, gonzalez(metric, alg.P, params.k))
    return worst, work / len(events), cost(metric, alg.P, alg.solution()), base, dt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--updates", type=int, default=400)
    ap.add_argument("--n-init", type=int, default=200)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--alpha", type=float, default=0.3)
    a = ap.parse_args()
    params = Params(k=a.k, alpha=a.alpha)
    cfg = AdversaryConfig("adaptive_delete_center", 1, a.n_init, a.updates, 0.5)
    print(f"{'algorithm':<12} {'max rec':>7} {'work/upd':>9} {'cost':>8} {'gonzalez':>9} {'secs':>6}")
    for name in sorted(ALGOS):
        if name == "mpbi-static" and a.n_init > 300:
            continue  # rebuilds everything per update
        worst, work, c, base, dt = tour(name, params, cfg)
        print(f"{name:<12} {worst:>7} {work:>9.0f} {c:>8.2f} {base:>9.2f} {dt:>6.1f}")
    print("\nbicriteria rows report the cost of a sparsifier with many more than k points;")
    print("kcenter and combined hold at most k centers.")


if __name__ == "__main__":
    main()
