"""Baseline: recompute the whole level stack from scratch after every update."""

from __future__ import annotations

import numpy as np

from .core import Clusterer, UpdateResult, set_recourse
from .metric import MetricSpace
from .params import Params
from .recourse import RebuildStack


class StaticMPBi(Clusterer):
    name = "mpbi-static"

    def __init__(self, metric: MetricSpace, params: Params, initial=(), seed: int = 0,
                 check: bool = False):
        super().__init__(metric)
        params.check_level()
        self.params = params
        self.seed = seed
        self.checking = check
        self.updates = 0
        self.P = set(initial)
        self.stack = self._build()

    def _build(self) -> RebuildStack:
        # fresh generator per rebuild so the output depends only on (seed, update count)
        st = RebuildStack(self.metric, self.params, np.random.default_rng([self.seed, self.updates]))
        st.levels[0].U = set(self.P)
        st.rebuild_from(0, self.n)
        return st

    def _update(self) -> UpdateResult:
        evals0 = self.metric.evals
        before = self.solution()
        self.updates += 1
        self.stack = self._build()
        if self.checking:
            self.stack.check(self.P)
        after = self.solution()
        return UpdateResult(set_recourse(before, after), self.metric.evals - evals0, len(after))

    def insert(self, p: int) -> UpdateResult:
        self.P.add(p)
        return self._update()

    def delete(self, p: int) -> UpdateResult:
        self.P.remove(p)
        return self._update()

    def solution(self) -> set[int]:
        return set(self.stack.centers())

    def max_nu(self) -> float:
        return self.stack.max_nu()
