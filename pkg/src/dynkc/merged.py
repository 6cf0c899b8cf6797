"""Final bicriteria sparsifier: the budgeted engine supplies S, the
transition-phase machinery publishes S_hat with O(1) recourse."""

from __future__ import annotations

from .budget import BudgetBicriteria
from .core import Clusterer, UpdateResult
from .metric import MetricSpace
from .params import (Params, recourse_cap, rho, size_bound_merged, sync_budget,
                     threshold, work_cap)
from .recourse import PhaseState


class MergedBicriteria(Clusterer):
    name = "bicr-merged"

    def __init__(self, metric: MetricSpace, params: Params, initial=(), seed: int = 0,
                 check: bool = False):
        super().__init__(metric)
        params.check_merged()
        self.params = params
        self.rho = rho(params)
        self.upd = BudgetBicriteria(metric, params, initial, seed)
        self.P = self.upd.P  # shared live set
        self.phase = PhaseState(self.upd, sync_budget(params, self.rho))
        self.cap = recourse_cap(params, self.rho)
        self.checking = check
        self.rho_violations = 0
        self.last_inner_work = 0

    def insert(self, p: int) -> UpdateResult:
        evals0 = self.metric.evals
        r = self.upd.insert(p)
        self.phase.on_insert(p)
        return self._finish(r, evals0)

    def delete(self, p: int) -> UpdateResult:
        evals0 = self.metric.evals
        r = self.upd.delete(p)
        self.phase.on_delete(p)
        return self._finish(r, evals0)

    def _finish(self, r: UpdateResult, evals0: int) -> UpdateResult:
        if r.size > self.rho * threshold(self.params, self.n):
            self.rho_violations += 1
        self.phase.sync()
        if self.checking:
            self.check()
        rec = self.phase.S_hat.recourse()
        self.phase.S_hat.reset_delta()
        self.last_inner_work = r.work
        # lazy sync touches no distances, so work is the engine's
        return UpdateResult(rec, r.work, self.phase.S_hat.total)

    def solution(self) -> set[int]:
        return self.phase.S_hat.support()

    def multiset(self) -> dict[int, int]:
        return dict(self.phase.S_hat.counts)

    def sigma_hat(self) -> dict[int, int]:
        return self.phase.sigma_hat

    def inner_solution(self) -> list[int]:
        return self.upd.centers()

    def size_bound(self) -> float:
        return size_bound_merged(self.params, self.n)

    def work_cap(self) -> int:
        return work_cap(self.params, self.n)

    def check(self) -> None:
        self.upd.check()
        self.phase.check(self.P)
