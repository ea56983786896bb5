"""Photovoltaic equivalent-circuit parameter extraction.

Single and double diode models, a differential evolution fitter, and an
interval branch-and-bound method that encloses the global minimum of the
least-squares objective.
"""

from .benchmarks import CASES, DE_SETTINGS, TYPICAL_DE_THETA, default_bounds
from .certify import (BnbConfig, BnbResult, bound_objective, certify_epsilon, embed_sdm_in_ddm,
                      run_bnb)
from .data import IVDataset, load_benchmark, load_csv
from .de import DEConfig, FitResult, run_de
from .harness import RunStats, emit_report, reconstruct_curve, run_batch
from .interval import Interval, IntervalBox, box_bisect, box_width, iv_arith, iv_exp, iv_sq
from .model import (DdmParams, EvaluationOverflowError, OperatingCondition, SdmParams,
                    ddm_current, module_current, sdm_current)
from .objective import ModelKind, ParamBounds, format_rmse_5sig, rmse, rmse_from_sse, sse

__version__ = "0.1.0"

__all__ = [
    "BnbConfig", "BnbResult", "CASES", "DE_SETTINGS", "DEConfig", "DdmParams",
    "EvaluationOverflowError", "FitResult", "IVDataset", "Interval", "IntervalBox",
    "ModelKind", "OperatingCondition", "ParamBounds", "RunStats", "SdmParams", "TYPICAL_DE_THETA",
    "bound_objective", "box_bisect", "box_width", "certify_epsilon", "ddm_current",
    "default_bounds", "embed_sdm_in_ddm", "emit_report", "format_rmse_5sig", "iv_arith", "iv_exp", "iv_sq",
    "load_benchmark", "load_csv", "module_current", "reconstruct_curve", "rmse",
    "rmse_from_sse", "run_batch", "run_bnb", "run_de", "sdm_current", "sse",
]
