"""Bicriteria sparsifier with a worst-case work bound per update.

Rebuilder i re-runs the level construction from level i over a frozen
execution set, spending at most a fixed number of work units per update.
Frozen sets get lazy shadows that absorb every later insert and delete. The
smallest rebuilder that finishes hands its levels to the global structure.

Work units: one per distance evaluation, one per element per selection
pass, one per point in the sampling and ball scans.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Clusterer, UpdateResult, set_recourse
from .level import MAX_RESAMPLE, Assignment, sample_probability
from .metric import MetricSpace
from .params import (Params, coverage_rank, log2n, threshold, units_per_update,
                     work_cap)


class LazyLevel:
    """A finished level inside a rebuilder (or installed globally)."""

    __slots__ = ("lazy", "A", "nu", "terminal", "size")

    def __init__(self, lazy: set[int], A: Assignment, nu: float, terminal: bool, size: int):
        self.lazy = lazy
        self.A = A
        self.nu = nu
        self.terminal = terminal
        self.size = size  # |U^i_j| when it was frozen

    def on_delete(self, p: int) -> None:
        self.lazy.discard(p)
        if p in self.A.sigma:
            self.A.replace_deleted(p)


def _terminal(U: set[int]) -> LazyLevel:
    A = Assignment()
    for p in sorted(U):
        A.add_center(p)
    return LazyLevel(set(U), A, 0.0, True, len(U))


class _Select:
    """Resumable quickselect; one unit per element per partition pass."""

    def __init__(self, d: np.ndarray, rank: int, rng: np.random.Generator):
        self.arr = d
        self.rank = rank
        self.rng = rng
        self.result: float | None = None
        self._new_pass()

    def _new_pass(self) -> None:
        self.pivot = self.arr[self.rng.integers(len(self.arr))]
        self.pos = 0
        self.lo: list[np.ndarray] = []
        self.hi: list[np.ndarray] = []
        self.neq = 0

    def step(self, budget: int) -> int:
        used = 0
        while used < budget and self.result is None:
            take = min(budget - used, len(self.arr) - self.pos)
            chunk = self.arr[self.pos:self.pos + take]
            self.lo.append(chunk[chunk < self.pivot])
            self.hi.append(chunk[chunk > self.pivot])
            self.neq += int(np.count_nonzero(chunk == self.pivot))
            self.pos += take
            used += take
            if self.pos == len(self.arr):
                lo = np.concatenate(self.lo)
                if self.rank <= len(lo):
                    self.arr = lo
                elif self.rank <= len(lo) + self.neq:
                    self.result = float(self.pivot)
                    break
                else:
                    self.rank -= len(lo) + self.neq
                    self.arr = np.concatenate(self.hi)
                self._new_pass()
        return used


class _LevelJob:
    """Cursor over one level build: rounds of sample/distances/select, then
    the ball and assignment scan."""

    def __init__(self, fixed: np.ndarray, params: Params, n_global: int,
                 rng: np.random.Generator):
        self.u = fixed
        self.fixed_set = set(fixed.tolist())
        self.params = params
        self.rng = rng
        self.dead: set[int] = set()
        m = 2 * params.k
        if params.sampler == "repeated_2k":
            self.rounds = 1 if len(fixed) <= m else math.ceil(params.c_trials * log2n(n_global))
        else:
            self.rounds = 1
        self.prob = sample_probability(params, n_global, len(fixed))
        self.round = 0
        self.best = None
        self.A: Assignment | None = None
        self._start_round()

    def _start_round(self) -> None:
        self.stage = "sample"
        self.pos = 0
        self.mask: list[np.ndarray] = []
        self.retries = 0

    def step(self, budget: int) -> tuple[int, bool]:
        used = 0
        while used < budget:
            st = self.stage
            if st == "sample":
                used += self._sample(budget - used)
            elif st == "dist":
                used += self._dist(budget - used)
            elif st == "select":
                used += self.sel.step(budget - used)
                if self.sel.result is not None:
                    nu = self.sel.result
                    if self.best is None or nu < self.best[1]:
                        self.best = (self.s, nu, self.d, self.arg)
                    self.round += 1
                    if self.round < self.rounds:
                        self._start_round()
                    else:
                        self._start_ball()
            elif st == "ball":
                used += self._ball(budget - used)
                if self.stage == "done":
                    return used, True
        return used, False

    def _sample(self, budget: int) -> int:
        u = self.u
        if self.params.sampler == "repeated_2k":
            m = 2 * self.params.k
            if len(u) <= m:
                self.s = u
                self._start_dist()
                return 0
            take = min(budget, m)  # drawing the subset costs m units in one go
            if take < m:
                self.pos += take
                if self.pos < m:
                    return take
            self.s = np.sort(self.rng.choice(u, size=m, replace=False))
            self._start_dist()
            return take
        take = min(budget, len(u) - self.pos)
        self.mask.append(self.rng.random(take) < self.prob)
        self.pos += take
        if self.pos == len(u):
            s = u[np.concatenate(self.mask)]
            if len(s) == 0:
                self.retries += 1
                if self.retries < MAX_RESAMPLE:
                    self.pos = 0
                    self.mask = []
                    return take
                s = u[[self.rng.integers(len(u))]]
            self.s = s
            self._start_dist()
        return take

    def _start_dist(self) -> None:
        self.stage = "dist"
        self.pos = 0
        self.d = np.full(len(self.u), np.inf)
        self.arg = np.zeros(len(self.u), dtype=np.int64)

    def _dist(self, budget: int) -> int:
        u, s = self.u, self.s
        m = len(s)
        total = len(u) * m
        used = 0
        metric = self.metric
        while used < budget and self.pos < total:
            row, col = divmod(self.pos, m)
            left = budget - used
            if col == 0 and left >= m:
                rows = min(left // m, len(u) - row)
                blk = metric.dist_matrix(u[row:row + rows], s)
                j = np.argmin(blk, axis=1)
                self.d[row:row + rows] = blk[np.arange(rows), j]
                self.arg[row:row + rows] = s[j]
                took = rows * m
            else:
                take = min(left, m - col)
                vals = metric.dists(int(u[row]), s[col:col + take])
                j = int(np.argmin(vals))
                if vals[j] < self.d[row]:  # strict: earlier columns hold smaller ids
                    self.d[row] = vals[j]
                    self.arg[row] = s[col + j]
                took = take
            self.pos += took
            used += took
        if self.pos >= total:
            self.stage = "select"
            self.sel = _Select(self.d, coverage_rank(self.params.beta, len(u)), self.rng)
        return used

    def _start_ball(self) -> None:
        self.s, self.nu, self.d, self.arg = self.best
        self.A = Assignment()
        for c in self.s.tolist():
            self.A.add_center(c)
        self.stage = "ball"
        self.pos = 0

    def _ball(self, budget: int) -> int:
        take = min(budget, len(self.u) - self.pos)
        lo, hi = self.pos, self.pos + take
        inb = self.d[lo:hi] <= self.nu
        A = self.A
        for p, c in zip(self.u[lo:hi][inb].tolist(), self.arg[lo:hi][inb].tolist()):
            if p not in A.index:
                A.assign(p, c)
        self.pos = hi
        if self.pos == len(self.u):
            # deletions that arrived mid-build: plain members first, then centers
            for p in sorted(self.dead, key=lambda x: (x in A.index, x)):
                if p in A.sigma:
                    A.replace_deleted(p)
            self.stage = "done"
        return take


class Rebuilder:
    """Budgeted re-run of the level construction from level i."""

    def __init__(self, i: int, U: set[int], metric: MetricSpace, params: Params,
                 rng: np.random.Generator, n_global: int, update_idx: int,
                 terminal: bool = False):
        self.i = i
        self.metric = metric
        self.params = params
        self.rng = rng
        self.levels: list[LazyLevel] = []
        self.lazy = U  # shadow of the set currently being processed
        self.job: _LevelJob | None = None
        self.completed = False
        self.units = 0
        self.start_size = len(U)
        self.started = update_idx
        self.finished: int | None = None
        self.shrink: list[tuple[int, int]] = []
        self._advance(n_global, update_idx, terminal)

    @property
    def t_i(self) -> int:
        return self.i + len(self.levels) - 1

    def _advance(self, n_global: int, update_idx: int, force: bool = False) -> None:
        if force or len(self.lazy) <= threshold(self.params, n_global):
            self.levels.append(_terminal(self.lazy))
            self.lazy = set()
            self.job = None
            self.completed = True
            self.finished = update_idx
            return
        fixed = np.array(sorted(self.lazy), dtype=np.int64)
        self.job = _LevelJob(fixed, self.params, n_global, self.rng)
        self.job.metric = self.metric

    def on_insert(self, p: int) -> None:
        for lv in self.levels:
            lv.lazy.add(p)
        if not self.completed:
            self.lazy.add(p)

    def on_delete(self, p: int) -> None:
        for lv in self.levels:
            lv.on_delete(p)
        if not self.completed:
            self.lazy.discard(p)
            if p in self.job.fixed_set:
                self.job.dead.add(p)

    def step(self, budget: int, n_global: int, update_idx: int) -> int:
        used = 0
        while not self.completed and used < budget:
            u, done = self.job.step(budget - used)
            used += u
            if done:
                job = self.job
                lv = LazyLevel(self.lazy, job.A, job.nu, False, len(job.u))
                self.levels.append(lv)
                self.lazy = self.lazy - job.A.sigma.keys()
                self.shrink.append((len(job.u), len(self.lazy)))
                self._advance(n_global, update_idx)
        self.units += used
        return used

    def shadows(self) -> list[set[int]]:
        out = [lv.lazy for lv in self.levels]
        if not self.completed:
            out.append(self.lazy)
        return out


class BudgetBicriteria(Clusterer):
    name = "bicr-budget"

    def __init__(self, metric: MetricSpace, params: Params, initial=(), seed: int = 0,
                 check: bool = False):
        super().__init__(metric)
        params.check_budget()
        self.params = params
        self.seed = seed
        self.P = set(initial)
        self.update_idx = 0
        self.checking = check
        self.bd_log: list[dict] = []
        self.shrink_log: list[tuple[int, int]] = []
        self.rngs: dict[int, np.random.Generator] = {}
        self.last_work = 0
        self.max_t = 0
        # one-shot static build for the initial set
        from .recourse import RebuildStack
        stack = RebuildStack(metric, params, self._rng(-1))
        stack.levels[0].U = set(self.P)
        stack.rebuild_from(0, self.n)
        self.glevels: list[LazyLevel] = []
        for lv in stack.levels:
            self.glevels.append(LazyLevel(set(), lv.S, lv.nu, lv.terminal, len(lv.U)))
        self.provenance = list(range(len(self.glevels)))
        self.bds = [self._new_bd(j, set(lv.U)) for j, lv in enumerate(stack.levels)]

    def _rng(self, j: int) -> np.random.Generator:
        if j not in self.rngs:
            self.rngs[j] = np.random.default_rng([self.seed, j + 1])
        return self.rngs[j]

    def _new_bd(self, j: int, U: set[int], terminal: bool = False) -> Rebuilder:
        return Rebuilder(j, U, self.metric, self.params, self._rng(j), self.n,
                         self.update_idx, terminal)

    @property
    def t(self) -> int:
        return len(self.glevels) - 1

    def _retire(self, bd: Rebuilder, interrupted: bool) -> None:
        self.bd_log.append(dict(i=bd.i, size=bd.start_size, start=bd.started,
                                end=bd.finished, units=bd.units, interrupted=interrupted))
        self.shrink_log.extend(bd.shrink)

    def insert(self, p: int) -> UpdateResult:
        self.P.add(p)
        for bd in self.bds:
            bd.on_insert(p)
        return self._update(p, True)

    def delete(self, p: int) -> UpdateResult:
        self.P.remove(p)
        for lv in self.glevels:
            if p in lv.A.sigma:
                lv.A.replace_deleted(p)
                break
        for bd in self.bds:
            bd.on_delete(p)
        return self._update(p, False)

    def _update(self, p: int, inserted: bool) -> UpdateResult:
        self.update_idx += 1
        before = set(self.centers())
        n = self.n
        budget = units_per_update(self.params, n)
        evals0 = self.metric.evals
        work = 0
        for bd in self.bds:
            if not bd.completed:
                work += bd.step(budget, n, self.update_idx)
        done = [bd for bd in self.bds if bd.completed]
        if not done:
            raise RuntimeError("no rebuilder reports completion")
        src = done[0]
        i, t = src.i, src.t_i
        self.glevels[i:] = src.levels
        self.provenance[i:] = [i] * (t - i + 1)
        shadows = [lv.lazy for lv in src.levels]
        for bd in self.bds[i:]:
            self._retire(bd, interrupted=not bd.completed)
        self.bds[i:] = [self._new_bd(j, set(shadows[j - i])) for j in range(i, t + 1)]
        last = self.bds[t]
        if last.completed:
            self.glevels[t] = last.levels[0]
            self.provenance[t] = t
        else:
            seed = {p} if inserted else set()
            # the new last level holds at most the one inserted point
            nb = self._new_bd(t + 1, seed, terminal=True)
            self.bds.append(nb)
            self.glevels.append(nb.levels[0])
            self.provenance.append(t + 1)
        self.max_t = max(self.max_t, self.t)
        self.last_work = work
        if self.checking:
            self.check()
        after = set(self.centers())
        assert self.metric.evals - evals0 <= work
        return UpdateResult(set_recourse(before, after), work, len(after))

    def centers(self) -> list[int]:
        out = []
        for lv in self.glevels:
            out.extend(lv.A.centers())
        return out

    def solution(self) -> set[int]:
        return set(self.centers())

    def snapshot(self) -> Assignment:
        a = Assignment()
        for lv in self.glevels:
            a.extend(lv.A)
        return a

    def max_nu(self) -> float:
        return max(lv.nu for lv in self.glevels)

    def work_cap(self) -> int:
        return work_cap(self.params, self.n)

    def check(self) -> None:
        seen: set[int] = set()
        for lv in self.glevels:
            lv.A.check()
            B = lv.A.sigma.keys()
            assert not (seen & B), "balls overlap"
            seen |= B
        assert seen == self.P, "balls do not partition P"
        assert self.provenance[self.t] == self.t
        prev = None
        for bd in self.bds:
            sh = bd.shadows()[0]
            if prev is not None:
                assert sh <= prev, "lazy sets not nested"
            prev = sh


def solution_cost_bound_check(alg: BudgetBicriteria) -> tuple[float, float]:
    """(cost(S), 2*max nu) by full scan; the first must not exceed the second."""
    S = sorted(alg.centers())
    P = sorted(alg.P)
    if not P:
        return 0.0, 0.0
    d, _ = alg.metric.nearest(P, S, count=False)
    cost = float(d.max())
    bound = 2 * alg.max_nu()
    assert cost <= bound, (cost, bound)
    return cost, bound
