"""One level of the sampling-based bicriteria construction.

A level samples S from its execution set U, picks the smallest radius nu whose
closed ball around S covers a beta fraction of U, and assigns every ball
member to its nearest sample point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metric import MetricSpace
from .params import Params, coverage_rank, log2n

MAX_RESAMPLE = 64


class Assignment:
    """Centers kept in stable slots plus an explicit member set per center.

    Deleting a center refills its slot in place with a member of its cluster,
    so positions survive replacement.
    """

    def __init__(self):
        self.slots: list[int | None] = []
        self.index: dict[int, int] = {}
        self.sigma: dict[int, int] = {}
        self.members: dict[int, set[int]] = {}

    def add_center(self, c: int) -> None:
        self.index[c] = len(self.slots)
        self.slots.append(c)
        self.members[c] = {c}
        self.sigma[c] = c

    def assign(self, p: int, c: int) -> None:
        self.sigma[p] = c
        self.members[c].add(p)

    def __contains__(self, c: int) -> bool:
        return c in self.index

    def __len__(self) -> int:
        return len(self.index)

    def centers(self) -> list[int]:
        return [c for c in self.slots if c is not None]

    def preimage(self, c: int) -> set[int]:
        return self.members.get(c, set())

    def replace_deleted(self, p: int) -> tuple[bool, int | None, int | None]:
        """Drop deleted point p. Returns (was_center, slot, replacement)."""
        c0 = self.sigma.pop(p, None)
        if c0 is None:
            return False, None, None
        self.members[c0].discard(p)
        if c0 != p:
            return False, None, None
        slot = self.index.pop(p)
        rem = self.members.pop(p)
        if not rem:
            self.slots[slot] = None
            return True, slot, None
        c = min(rem)
        self.slots[slot] = c
        self.index[c] = slot
        self.members[c] = rem
        for q in rem:
            self.sigma[q] = c
        return True, slot, c

    def copy(self) -> "Assignment":
        a = Assignment()
        a.slots = list(self.slots)
        a.index = dict(self.index)
        a.sigma = dict(self.sigma)
        a.members = {c: set(m) for c, m in self.members.items()}
        return a

    def extend(self, other: "Assignment") -> None:
        for c in other.centers():
            self.index[c] = len(self.slots)
            self.slots.append(c)
            self.members[c] = set(other.members[c])
        self.sigma.update(other.sigma)

    def check(self, metric: MetricSpace | None = None) -> None:
        for c, i in self.index.items():
            assert self.slots[i] == c
            assert self.sigma[c] == c, c
        for p, c in self.sigma.items():
            assert p in self.members[c]
        assert sum(len(m) for m in self.members.values()) == len(self.sigma)


@dataclass
class LevelState:
    U: set[int]
    S: Assignment
    nu: float
    n_base: int
    cnt: int = 0
    terminal: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def B(self) -> set[int]:
        return set(self.S.sigma)


def _as_sorted(U) -> np.ndarray:
    if isinstance(U, np.ndarray):
        return np.sort(U.astype(np.int64))
    return np.array(sorted(U), dtype=np.int64)


def sample_probability(params: Params, n_global: int, size: int) -> float:
    return min(params.alpha * params.k * log2n(n_global) / size, 1.0)


def sample_independent(U, params: Params, n_global: int, rng: np.random.Generator) -> np.ndarray:
    u = _as_sorted(U)
    if len(u) == 0:
        raise ValueError("empty execution set")
    prob = sample_probability(params, n_global, len(u))
    for _ in range(MAX_RESAMPLE):
        s = u[rng.random(len(u)) < prob]
        if len(s):
            return s
    return u[[rng.integers(len(u))]]


def radius_of(d: np.ndarray, beta: float) -> float:
    """ceil(beta*|U|)-th smallest of the distances d (linear-time select)."""
    r = coverage_rank(beta, len(d))
    return float(np.partition(d, r - 1)[r - 1])


def select_radius(metric: MetricSpace, U, S, beta: float) -> float:
    u = _as_sorted(U)
    s = _as_sorted(S)
    if len(u) == 0 or len(s) == 0:
        raise ValueError("select_radius needs nonempty U and S")
    d, _ = metric.nearest(u, s)
    return radius_of(d, beta)


def _best_round(metric: MetricSpace, u: np.ndarray, params: Params, n_global: int,
                rng: np.random.Generator):
    m = 2 * params.k
    rounds = 1 if len(u) <= m else math.ceil(params.c_trials * log2n(n_global))
    best = None
    for _ in range(rounds):
        s = u if len(u) <= m else np.sort(rng.choice(u, size=m, replace=False))
        d, arg = metric.nearest(u, s)
        nu = radius_of(d, params.beta)
        if best is None or nu < best[1]:
            best = (s, nu, d, arg)
    return best


def sample_repeated_2k(metric: MetricSpace, U, params: Params, n_global: int,
                       rng: np.random.Generator):
    """Best of ceil(c_trials*log n) uniform 2k-subsets.

    Returns (sample, radius, ball) of the round with the smallest radius,
    first round on ties.
    """
    u = _as_sorted(U)
    s, nu, d, _ = _best_round(metric, u, params, n_global, rng)
    return s, nu, set(u[d <= nu].tolist())


def _assemble(u: np.ndarray, s: np.ndarray, nu: float, d: np.ndarray, arg: np.ndarray,
              n_base: int) -> LevelState:
    S = Assignment()
    for c in s.tolist():
        S.add_center(c)  # sample points always own themselves
    inball = d <= nu
    for p, c in zip(u[inball].tolist(), arg[inball].tolist()):
        if p not in S.index:
            S.assign(p, c)
    return LevelState(set(u.tolist()), S, nu, n_base)


def build_level(metric: MetricSpace, U, params: Params, n_global: int,
                rng: np.random.Generator) -> LevelState:
    u = _as_sorted(U)
    if len(u) == 0:
        raise ValueError("empty execution set")
    if params.sampler == "repeated_2k":
        s, nu, d, arg = _best_round(metric, u, params, n_global, rng)
    else:
        s = sample_independent(u, params, n_global, rng)
        d, arg = metric.nearest(u, s)
        nu = radius_of(d, params.beta)
    return _assemble(u, s, nu, d, arg, len(u))


def terminal_level(U, n_base: int | None = None) -> LevelState:
    S = Assignment()
    for p in sorted(U):
        S.add_center(p)
    return LevelState(set(U), S, 0.0, len(U) if n_base is None else n_base, terminal=True)
