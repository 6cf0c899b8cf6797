"""Name -> algorithm constructor, shared by the CLI and the verify suites."""

from __future__ import annotations

from .budget import BudgetBicriteria
from .combined import Combined
from .core import Clusterer
from .kcenter import KCenter
from .merged import MergedBicriteria
from .metric import MetricSpace
from .params import Params
from .recourse import RecourseBicriteria
from .static import StaticMPBi

ALGOS = {
    "mpbi-static": StaticMPBi,
    "bicr-rec": RecourseBicriteria,
    "bicr-budget": BudgetBicriteria,
    "bicr-merged": MergedBicriteria,
    "kcenter": KCenter,
    "combined": Combined,
}

BICRITERIA = ("bicr-rec", "bicr-budget", "bicr-merged")


def make_algo(name: str, metric: MetricSpace, params: Params, seed: int = 0,
              check: bool = False, initial=()) -> Clusterer:
    if name not in ALGOS:
        raise KeyError(f"unknown algorithm {name!r}")
    if name == "kcenter":
        return KCenter(metric, params, initial, check=check)
    return ALGOS[name](metric, params, initial, seed=seed, check=check)

