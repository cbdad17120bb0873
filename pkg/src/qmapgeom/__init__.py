"""Numerical geometry of q-map quaternionic Kähler metrics: metric, isometries, twistor data and fiber volumes."""

from .cubic import CubicError, CubicForm, CurveId, load_cubic, preset
from .isometries import Gen, L1Element, L2Element, SL2Element
from .numkernel import Dual, NumericError
from .qk_metric import ChartLayout, DomainError, IIAPoint, metric_fs, metric_tree

__version__ = "0.1.0"

__all__ = [
    "ChartLayout", "CubicError", "CubicForm", "CurveId", "DomainError", "Dual", "Gen", "IIAPoint", "L1Element",
    "L2Element", "NumericError", "SL2Element", "load_cubic", "metric_fs", "metric_tree", "preset",
]
