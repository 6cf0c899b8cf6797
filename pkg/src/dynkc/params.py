"""Configuration, constraint checks and the shared size formulas."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Params:
    k: int
    alpha: float = 4.0
    beta: float = 0.1
    gamma: float = 0.5
    lam: float = 0.02
    eps: float = 0.01
    c_work: float = 1.0
    c_trials: float = 3.0
    sampler: str = "independent"  # or "repeated_2k"
    delta: float = 0.5            # radius ladder step of the k-center layer
    ratio_max: float = 16.0
    sync_budget: int | None = None  # overrides the lazy-sync budget (tests only)

    def with_(self, **kw) -> "Params":
        return replace(self, **kw)

    def check_level(self) -> None:
        if self.k < 1:
            raise ConfigError("k must be positive")
        if self.alpha <= 0:
            raise ConfigError("alpha must be positive")
        if not 0 < self.beta < 1:
            raise ConfigError("beta must lie in (0,1)")
        if self.sampler not in ("independent", "repeated_2k"):
            raise ConfigError(f"unknown sampler {self.sampler!r}")
        if self.c_trials <= 0:
            raise ConfigError("c_trials must be positive")

    def check_recourse(self) -> None:
        self.check_level()
        if not 0 < self.lam < 1 / 6:
            raise ConfigError("lambda must lie in (0, 1/6)")
        if not self.beta < self.gamma < 1 - 6 * self.lam:
            raise ConfigError("need beta < gamma < 1 - 6*lambda")

    def check_budget(self) -> None:
        self.check_level()
        if not 0 < self.eps < 1 / 6:
            raise ConfigError("epsilon must lie in (0, 1/6)")
        if not self.beta - self.eps > 0 or not self.beta > 5 * self.eps:
            raise ConfigError("need beta > 5*epsilon")
        if self.c_work <= 0:
            raise ConfigError("c_work must be positive")

    def check_merged(self) -> None:
        self.check_budget()
        if not 0 < self.lam:
            raise ConfigError("lambda must be positive")
        if not self.lam + self.eps < 1 / 6:
            raise ConfigError("need lambda + epsilon < 1/6")
        if not 0 < self.gamma < 1 - 6 * (self.lam + self.eps):
            raise ConfigError("need 0 < gamma < 1 - 6*(lambda + epsilon)")

    def check_kcenter(self) -> None:
        if self.k < 1:
            raise ConfigError("k must be positive")
        if self.delta <= 0:
            raise ConfigError("delta must be positive")


def log2n(n: int) -> float:
    """log2 n floored at 1, so thresholds stay positive for tiny n."""
    return max(math.log2(n), 1.0) if n > 0 else 1.0


def log2nk(n: int, k: int) -> float:
    return max(math.log2(n / k), 1.0) if n > 0 else 1.0


def threshold(p: Params, n: int) -> float:
    """Terminal-level size alpha*k*log n*log(n/k)."""
    return p.alpha * p.k * log2n(n) * log2nk(n, p.k)


def coverage_rank(beta: float, size: int) -> int:
    """Smallest integer rank r with r >= beta*size.

    beta*size is rounded to 9 places first so that 0.1*30 counts as 3, not 4.
    """
    return max(1, math.ceil(round(beta * size, 9)))


def sync_budget(p: Params, rho: float = 1.0) -> int:
    if p.sync_budget is not None:
        return p.sync_budget
    return math.ceil(round(32 * rho / (p.lam * p.lam), 9))


def recourse_cap(p: Params, rho: float = 1.0) -> int:
    """Per-update multiset recourse cap: sync budget plus the replacement paths.

    A deletion can remove two copies of p and mirror two replacements, so the
    replacement paths contribute up to 4, one more than the often quoted 3.
    """
    return sync_budget(p, rho) + 4


def level_decay(p: Params) -> float:
    """-log2(1 - beta + 5 eps), the per-level shrink exponent."""
    return -math.log2(1 - p.beta + 5 * p.eps)


def t_max(p: Params, n: int) -> float:
    n = max(n, 1)
    return 2 + math.log2(2 * n / p.k) / level_decay(p) if 2 * n > p.k else 2.0


def t_max_recourse(p: Params, n: int) -> float:
    n = max(n, 1)
    q = -math.log2(1 - p.beta)
    return 2 + math.log2(2 * n / p.k) / q if 2 * n > p.k else 2.0


def units_per_update(p: Params, n: int) -> int:
    return math.ceil(p.c_work * (p.alpha * p.k / p.eps) * log2n(n) * log2nk(n, p.k))


def work_cap(p: Params, n: int) -> int:
    """Hard per-update unit cap (t_max + 1) * units_per_update."""
    return math.floor(t_max(p, n) + 1) * units_per_update(p, n)


def rho(p: Params) -> float:
    """Size constant of the budgeted engine's output, |S| <= rho * threshold.

    Each internal level samples alpha*k*log n points on average, which is
    threshold/log(n/k). With t <= 2 + (1 + log(n/k))/decay levels that sums to
    at most (2 + 2/decay) thresholds once log(n/k) >= 1; add one for the
    terminal level, double for sampling fluctuation, and add 2 of headroom.
    """
    return 2 * (3 + 2 / level_decay(p)) + 2


def size_bound_recourse(p: Params, n: int) -> float:
    return (6 + 4 * p.lam) * threshold(p, n)


def size_bound_merged(p: Params, n: int) -> float:
    return 2 * (rho(p) + p.lam) * threshold(p, n)


def phase_length_bound(p: Params, n: int) -> float:
    return p.lam * threshold(p, n)
