"""Sparsifier followed by the dynamic k-center algorithm on its support."""

from __future__ import annotations

from .budget import BudgetBicriteria
from .core import Clusterer, UpdateResult, set_recourse
from .kcenter import KCenter
from .merged import MergedBicriteria
from .metric import MetricSpace
from .params import Params
from .recourse import RecourseBicriteria

SPARSIFIERS = {
    "bicr-merged": MergedBicriteria,
    "bicr-rec": RecourseBicriteria,
    "bicr-budget": BudgetBicriteria,
}


class Combined(Clusterer):
    """The inner instance sees the support of S_hat as a plain set. After each
    outer update the support delta is replayed into it, deletions first."""

    name = "combined"

    def __init__(self, metric: MetricSpace, params: Params, initial=(), seed: int = 0,
                 check: bool = False, sparsifier: str = "bicr-merged"):
        super().__init__(metric)
        self.params = params
        self.outer = SPARSIFIERS[sparsifier](metric, params, initial, seed=seed, check=check)
        self.P = self.outer.P
        self.inner = KCenter(metric, params, sorted(self.outer.solution()), check=check)
        self.checking = check
        self.last_outer_work = 0
        self.last_inner_work = 0
        self.last_inner_updates = 0
        self.max_inner_recourse = 0
        if hasattr(self.outer, "phase"):
            self.outer.phase.S_hat.reset_delta()

    def _replay(self) -> int:
        gone, new = self._support_delta()
        updates = 0
        for q in gone:
            r = self.inner.delete(q)
            self.max_inner_recourse = max(self.max_inner_recourse, r.recourse)
            updates += 1
        for q in new:
            r = self.inner.insert(q)
            self.max_inner_recourse = max(self.max_inner_recourse, r.recourse)
            updates += 1
        return updates

    def _support_delta(self) -> tuple[list[int], list[int]]:
        want = self.outer.solution()
        have = self.inner.P
        return sorted(have - want), sorted(want - have)

    def _update(self, fn, p: int) -> UpdateResult:
        before = self.solution()
        r = fn(p)
        evals0 = self.metric.evals
        self.last_inner_updates = self._replay()
        self.last_outer_work = r.work
        self.last_inner_work = self.metric.evals - evals0
        if self.checking:
            self.check()
        after = self.solution()
        return UpdateResult(set_recourse(before, after), r.work + self.last_inner_work, len(after))

    def insert(self, p: int) -> UpdateResult:
        return self._update(self.outer.insert, p)

    def delete(self, p: int) -> UpdateResult:
        return self._update(self.outer.delete, p)

    def solution(self) -> set[int]:
        return self.inner.solution()

    def support(self) -> set[int]:
        return self.outer.solution()

    def check(self) -> None:
        assert self.inner.P == self.outer.solution(), "inner universe drifted"
        assert self.inner.solution() <= self.P
