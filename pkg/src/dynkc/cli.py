"""dynkc command line: gen, run, verify.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import inspect
import os
import sys
import time
from pathlib import Path

from .core import Clusterer
from .metric import MetricError, MetricSpace
from .oracles import OPT_MAX_K, OPT_MAX_N, cost, opt_kcenter
from .params import ConfigError, Params
from .registry import ALGOS, make_algo
from .stream import (STRATEGIES, AdversaryConfig, StreamParseError, StreamValidationError,
                     generate_stream, read_stream, serialize_stream)
from .verify import SUITES

CSV_COLUMNS = ["update_idx", "op", "n", "solution_size", "recourse", "work_units",
               "cost", "opt_cost", "ratio", "wall_ns"]


class UsageError(Exception):
    pass


def _add_params(ap: argparse.ArgumentParser, k_required: bool) -> None:
    d = Params(k=1)
    g = ap.add_argument_group("algorithm parameters")
    g.add_argument("--k", type=int, required=k_required, default=None if k_required else 3)
    g.add_argument("--alpha", type=float, default=d.alpha)
    g.add_argument("--beta", type=float, default=d.beta)
    g.add_argument("--gamma", type=float, default=d.gamma)
    g.add_argument("--lam", type=float, default=d.lam)
    g.add_argument("--eps", type=float, default=d.eps)
    g.add_argument("--c-work", type=float, default=d.c_work)
    g.add_argument("--c-trials", type=float, default=d.c_trials)
    g.add_argument("--sampler", choices=["independent", "repeated_2k"], default=d.sampler)
    g.add_argument("--delta", type=float, default=d.delta)
    g.add_argument("--ratio-max", type=float, default=d.ratio_max)
    g.add_argument("--sync-budget", type=int, default=None)


def _params(a: argparse.Namespace) -> Params:
    return Params(k=a.k, alpha=a.alpha, beta=a.beta, gamma=a.gamma, lam=a.lam, eps=a.eps,
                  c_work=a.c_work, c_trials=a.c_trials, sampler=a.sampler, delta=a.delta,
                  ratio_max=a.ratio_max, sync_budget=a.sync_budget)


def _seed(a: argparse.Namespace) -> int:
    env = os.environ.get("DYNKC_SEED")
    if env is None:
        return a.seed
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"DYNKC_SEED must be an integer, got {env!r}")


def _validate(algo: str, p: Params) -> None:
    check = {"mpbi-static": p.check_level, "bicr-rec": p.check_recourse,
             "bicr-budget": p.check_budget, "bicr-merged": p.check_merged,
             "kcenter": p.check_kcenter}
    if algo == "combined":
        p.check_merged()
        p.check_kcenter()
    else:
        check[algo]()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dynkc", description="Fully dynamic k-center toolkit")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate an update stream")
    g.add_argument("--strategy", choices=STRATEGIES, default="oblivious_random")
    g.add_argument("--n-init", type=int, default=50)
    g.add_argument("--n-updates", type=int, default=200)
    g.add_argument("--delete-fraction", type=float, default=0.5)
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--blobs", type=int, default=5)
    g.add_argument("--spread", type=float, default=1.0)
    g.add_argument("--box", type=float, default=100.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--algo", choices=sorted(ALGOS), help="co-simulated algorithm (adaptive strategies)")
    g.add_argument("-o", "--out", help="output file (default stdout)")
    _add_params(g, k_required=False)

    r = sub.add_parser("run", help="replay a stream and write per-update metrics")
    r.add_argument("stream")
    r.add_argument("--algo", choices=sorted(ALGOS), required=True)
    r.add_argument("--metrics", help="CSV output (default stdout)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--cost-every", type=int, default=1, help="0 disables the cost columns")
    r.add_argument("--oracle", action="store_true", help="exact optimum while n is small")
    r.add_argument("--wall-clock", action="store_true", help="fill wall_ns (not reproducible)")
    r.add_argument("--check", action="store_true", help="assert invariants after every update")
    _add_params(r, k_required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--updates", type=int)
    v.add_argument("--streams", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--n", type=int)
    v.add_argument("--k", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", help="also write the report here")
    return ap


def cmd_gen(a: argparse.Namespace) -> int:
    cfg = AdversaryConfig(a.strategy, _seed(a), a.n_init, a.n_updates, a.delete_fraction,
                          dim=a.dim, n_blobs=a.blobs, spread=a.spread, box=a.box)
    fn = None
    if a.strategy != "oblivious_random":
        if a.algo is None:
            raise UsageError(f"--strategy {a.strategy} needs --algo to co-simulate")
        p = _params(a)
        _validate(a.algo, p)
        alg = make_algo(a.algo, MetricSpace.euclidean(a.dim), p, seed=_seed(a))

        def fn(ev):
            alg.apply(ev)
            return alg.solution()

    text = serialize_stream(generate_stream(cfg, fn), dim=a.dim)
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _metric_for(sf, stream_path: Path) -> MetricSpace:
    if sf.matrix is not None:
        path = Path(sf.matrix)
        if not path.is_absolute():
            path = stream_path.parent / path
        return MetricSpace.from_matrix_file(path)
    if sf.dim is None:
        raise UsageError("stream has neither a #dim nor a #matrix header")
    return MetricSpace.euclidean(sf.dim)


def replay(alg: Clusterer, events, out, cost_every: int = 1, oracle: bool = False,
           wall_clock: bool = False, k: int | None = None) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for idx, ev in enumerate(events, 1):
        t0 = time.perf_counter_ns()
        res = alg.apply(ev)
        wall = time.perf_counter_ns() - t0
        row = [idx, ev.op, alg.n, res.size, res.recourse, res.work, "", "", "", ""]
        if cost_every > 0 and idx % cost_every == 0:
            c = cost(alg.metric, alg.P, alg.solution())
            row[6] = repr(c)
            if oracle and alg.n <= OPT_MAX_N and k is not None and k <= OPT_MAX_K:
                R, _ = opt_kcenter(alg.metric, alg.P, k)
                row[7] = repr(R)
                row[8] = repr(c / R) if R > 0 else ("1.0" if c == 0 else "inf")
        if wall_clock:
            row[9] = wall
        w.writerow(row)


def cmd_run(a: argparse.Namespace) -> int:
    path = Path(a.stream)
    try:
        sf = read_stream(path.read_text())
    except OSError as e:
        raise UsageError(str(e))
    p = _params(a)
    _validate(a.algo, p)
    if a.cost_every < 0:
        raise UsageError("--cost-every must be >= 0")
    metric = _metric_for(sf, path)
    alg = make_algo(a.algo, metric, p, seed=_seed(a), check=a.check)
    if a.metrics:
        with open(a.metrics, "w", newline="") as fh:
            replay(alg, sf.events, fh, a.cost_every, a.oracle, a.wall_clock, p.k)
    else:
        replay(alg, sf.events, sys.stdout, a.cost_every, a.oracle, a.wall_clock, p.k)
    return 0


def suite_kwargs(fn, a: argparse.Namespace) -> dict:
    """Map the generic scale flags onto whatever the suite accepts."""
    names = inspect.signature(fn).parameters
    want = {"seed": a.seed}
    if a.updates is not None:
        want.update(updates=a.updates, kc_updates=a.updates)
    if a.streams is not None:
        want.update(streams=a.streams)
    if a.trials is not None:
        want.update(trials=a.trials, seq_states=a.trials, nu_builds=a.trials,
                    radius_trials=a.trials, mu_instances=min(a.trials, 50))
    if a.n is not None:
        want.update(n_init=a.n, max_n=a.n)
    if a.k is not None:
        want.update(k=a.k)
    return {k: v for k, v in want.items() if k in names}


def cmd_verify(a: argparse.Namespace) -> int:
    fn = SUITES[a.suite]
    rep = fn(**suite_kwargs(fn, a))
    text = rep.to_json()
    print(text)
    if a.json:
        Path(a.json).write_text(text + "\n")
    return 0 if rep.ok else 1


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)  # exits with 2 on usage errors
    try:
        return {"gen": cmd_gen, "run": cmd_run, "verify": cmd_verify}[a.cmd](a)
    except (UsageError, ConfigError, MetricError, StreamParseError, StreamValidationError,
            ValueError) as e:
        print(f"dynkc: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
