"""Random Subspace EDA for maximum-likelihood fitting of multimodal models."""

__version__ = "0.1.0"

from .algorithm import RsEdaConfig, RunTrace, fit_gaussian, optimize
from .baseline import EmnaConfig, emna_optimize
from .core import Bounds, Objective, Pps, Solution, clamp_to_bounds, pps_update, truncation_select
from .estimators import EMNA, KeplerianRV, RandomSubspaceEDA, RVModelSelector

__all__ = [
    "Bounds",
    "EMNA",
    "EmnaConfig",
    "KeplerianRV",
    "Objective",
    "Pps",
    "RVModelSelector",
    "RandomSubspaceEDA",
    "RsEdaConfig",
    "RunTrace",
    "Solution",
    "clamp_to_bounds",
    "emna_optimize",
    "fit_gaussian",
    "optimize",
    "pps_update",
    "truncation_select",
]
