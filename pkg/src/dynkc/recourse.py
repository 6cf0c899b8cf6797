"""Bicriteria sparsifier with O(1) worst-case recourse.

A stack of levels is rebuilt from the lowest level whose update counter
overflows. The published multiset S_hat trails the stack's S through
transition phases: phase l first adds the frozen target S^(l), then removes
the previous target and the points inserted during the previous phase, a
bounded number of steps per update.
"""

from __future__ import annotations

import numpy as np

from .core import Clusterer, TrackedMultiset, UpdateResult
from .level import Assignment, LevelState, build_level, terminal_level
from .metric import MetricSpace
from .params import Params, phase_length_bound, recourse_cap, sync_budget, threshold


class RebuildStack:
    """Levels 0..t with execution sets, counters and per-level assignments."""

    def __init__(self, metric: MetricSpace, params: Params, rng: np.random.Generator):
        self.metric = metric
        self.params = params
        self.rng = rng
        self.levels: list[LevelState] = [terminal_level(set())]
        self.level_of: dict[int, int] = {}
        self.rebuilds: list[tuple[int, int]] = []  # (level, n at rebuild)

    @property
    def t(self) -> int:
        return len(self.levels) - 1

    def rebuild_from(self, i: int, n_global: int) -> None:
        U = set(self.levels[i].U)
        del self.levels[i:]
        thr = threshold(self.params, n_global)
        j = i
        while len(U) > thr:
            lv = build_level(self.metric, U, self.params, n_global, self.rng)
            for p in lv.S.sigma:
                self.level_of[p] = j
            self.levels.append(lv)
            U = U - lv.S.sigma.keys()
            j += 1
        self.levels.append(terminal_level(U))
        for p in U:
            self.level_of[p] = j
        self.rebuilds.append((i, n_global))

    def insert(self, p: int) -> None:
        for lv in self.levels:
            lv.U.add(p)
            lv.cnt += 1
        self.levels[-1].S.add_center(p)
        self.level_of[p] = self.t

    def delete(self, p: int) -> tuple[bool, int | None, int | None]:
        i = self.level_of.pop(p)
        for lv in self.levels[:i + 1]:
            lv.U.discard(p)
            lv.cnt += 1
        return self.levels[i].S.replace_deleted(p)

    def check_threshold(self, n_global: int) -> int | None:
        lam = self.params.lam
        for i, lv in enumerate(self.levels):
            if lv.cnt > lam * lv.n_base:
                self.rebuild_from(i, n_global)
                return i
        return None

    def centers(self) -> list[int]:
        out = []
        for lv in self.levels:
            out.extend(lv.S.centers())
        return out

    def snapshot(self) -> Assignment:
        a = Assignment()
        for lv in self.levels:
            a.extend(lv.S)
        return a

    def max_nu(self) -> float:
        return max(lv.nu for lv in self.levels)

    def check(self, live: set[int]) -> None:
        seen: set[int] = set()
        for j, lv in enumerate(self.levels):
            lv.S.check()
            B = lv.S.sigma.keys()
            assert not (seen & B), "balls overlap"
            seen |= B
            assert B <= lv.U
            if j + 1 < len(self.levels):
                assert self.levels[j + 1].U <= lv.U
        assert seen == live, "balls do not partition P"


class PhaseState:
    """Transition-phase bookkeeping and the lazily synchronized multiset."""

    def __init__(self, source, budget: int):
        snap = source.snapshot()
        self.source = source
        self.budget = budget
        self.ell = 0
        self.sub = 1
        self.pos = 0
        self.S_prev = snap
        self.S_cur = snap.copy()
        self.I_prev: set[int] = set()
        self.I_cur: set[int] = set()
        self.delset: list[int] = []
        self.sigma_hat: dict[int, int] = dict(snap.sigma)
        self.S_hat = TrackedMultiset(snap.centers())
        self.phase_calls = 0
        self.phase_lengths: list[int] = []
        self.phase_ends = 0

    def on_insert(self, p: int) -> None:
        self.I_cur.add(p)
        self.S_hat.add(p)
        self.sigma_hat[p] = p

    def _replace(self, A: Assignment, p: int, mirror: bool, follow: bool) -> None:
        rem = set(A.preimage(p)) if p in A else None
        was_center, _, c = A.replace_deleted(p)
        if not was_center or c is None:
            return
        if mirror and p in self.S_hat:
            self.S_hat.remove_one(p)
            self.S_hat.add(c)
        if follow:
            for q in rem:
                if q != p:
                    self.sigma_hat[q] = c

    def on_delete(self, p: int) -> None:
        if self.sub == 1:
            self._replace(self.S_prev, p, mirror=True, follow=True)
        slot = self.S_cur.index.get(p)
        added = slot is not None and (self.sub == 2 or slot < self.pos)
        # only an occurrence already synced into S_hat is swapped there
        self._replace(self.S_cur, p, mirror=added, follow=self.sub == 2)
        self.I_prev.discard(p)
        self.I_cur.discard(p)
        self.S_hat.remove_all(p)
        self.sigma_hat.pop(p, None)

    def _end_subphase1(self) -> None:
        self.sigma_hat = dict(self.S_cur.sigma)
        for q in self.I_prev | self.I_cur:
            self.sigma_hat.setdefault(q, q)
        self.sub = 2
        self.pos = 0
        self.delset = self.S_prev.centers() + sorted(self.I_prev)

    def _end_phase(self) -> None:
        self.phase_lengths.append(self.phase_calls)
        self.phase_calls = 0
        self.phase_ends += 1
        self.ell += 1
        self.S_prev = self.S_cur
        self.S_cur = self.source.snapshot()
        self.I_prev = self.I_cur
        self.I_cur = set()
        self.sub = 1
        self.pos = 0
        self.delset = []

    def sync(self) -> int:
        """Advance by at most `budget` changes of S_hat; stops at phase end."""
        used = 0
        self.phase_calls += 1
        while True:
            if self.sub == 1:
                slots = self.S_cur.slots
                if self.pos >= len(slots):
                    self._end_subphase1()
                    continue
                x = slots[self.pos]
                if x is not None:
                    if used == self.budget:
                        break
                    self.S_hat.add(x)
                    used += 1
                self.pos += 1
            else:
                if self.pos >= len(self.delset):
                    self._end_phase()
                    break
                x = self.delset[self.pos]
                if x in self.S_hat:
                    if used == self.budget:
                        break
                    self.S_hat.remove_one(x)
                    used += 1
                self.pos += 1
        return used

    def check(self, live: set[int]) -> None:
        sup = self.S_hat.counts.keys()
        assert sup <= live, "S_hat holds a deleted point"
        assert self.I_cur <= sup, "P3"
        if self.sub == 1:
            assert set(self.S_prev.centers()) <= sup, "P1 (target)"
            assert self.I_prev <= sup, "P1 (inserted)"
        else:
            assert set(self.S_cur.centers()) <= sup, "P2 (target)"
            assert self.I_cur <= sup, "P2 (inserted)"
        if self.sub == 1 and self.pos == 0 and self.phase_calls == 0 and self.ell > 0:
            # a phase just ended: S_hat equals S^(l-1) plus I^(l-1), once each
            want = set(self.S_prev.centers()) | self.I_prev
            assert set(sup) == want, "phase end support"
            assert all(v == 1 for v in self.S_hat.counts.values()), "phase end counts"


class RecourseBicriteria(Clusterer):
    name = "bicr-rec"

    def __init__(self, metric: MetricSpace, params: Params, initial=(), seed: int = 0,
                 check: bool = False):
        super().__init__(metric)
        params.check_recourse()
        self.params = params
        self.rng = np.random.default_rng(seed)
        self.stack = RebuildStack(metric, params, self.rng)
        self.P = set(initial)
        self.stack.levels[0].U = set(self.P)
        self.stack.rebuild_from(0, self.n)
        self.phase = PhaseState(self.stack, sync_budget(params))
        self.cap = recourse_cap(params)
        self.checking = check
        self.last_rebuild: int | None = None

    def _finish(self, evals0: int) -> UpdateResult:
        self.last_rebuild = self.stack.check_threshold(self.n)
        self.phase.sync()
        if self.checking:
            self.check()
        r = self.phase.S_hat.recourse()
        self.phase.S_hat.reset_delta()
        return UpdateResult(r, self.metric.evals - evals0, self.phase.S_hat.total)

    def insert(self, p: int) -> UpdateResult:
        evals0 = self.metric.evals
        self.P.add(p)
        self.stack.insert(p)
        self.phase.on_insert(p)
        return self._finish(evals0)

    def delete(self, p: int) -> UpdateResult:
        evals0 = self.metric.evals
        self.P.remove(p)
        self.stack.delete(p)
        self.phase.on_delete(p)
        return self._finish(evals0)

    def solution(self) -> set[int]:
        return self.phase.S_hat.support()

    def multiset(self) -> dict[int, int]:
        return dict(self.phase.S_hat.counts)

    def sigma_hat(self) -> dict[int, int]:
        return self.phase.sigma_hat

    def inner_solution(self) -> list[int]:
        return self.stack.centers()

    def size_bound(self) -> float:
        from .params import size_bound_recourse
        return size_bound_recourse(self.params, self.n)

    def phase_bound(self) -> float:
        return phase_length_bound(self.params, self.n)

    def check(self) -> None:
        self.stack.check(self.P)
        self.phase.check(self.P)
