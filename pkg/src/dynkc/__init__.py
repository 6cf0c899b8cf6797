"""Fully dynamic k-center clustering with bounded recourse and work."""

from .budget import BudgetBicriteria
from .combined import Combined
from .core import Clusterer, UpdateResult
from .kcenter import KCenter
from .merged import MergedBicriteria
from .metric import MetricSpace
from .params import ConfigError, Params
from .recourse import RecourseBicriteria
from .registry import ALGOS, make_algo
from .static import StaticMPBi
from .stream import AdversaryConfig, UpdateEvent, delete, generate_stream, insert

__all__ = [
    "ALGOS", "AdversaryConfig", "BudgetBicriteria", "Clusterer", "Combined", "ConfigError",
    "KCenter", "MergedBicriteria", "MetricSpace", "Params", "RecourseBicriteria",
    "StaticMPBi", "UpdateEvent", "UpdateResult", "delete", "generate_stream", "insert",
    "make_algo",
]
__version__ = "0.1.0"
