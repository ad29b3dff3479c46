"""Flat fronts in hyperbolic 3-space from hypergeometric Schwarz maps.

Modules: ``specfun`` (Gamma, 2F1), ``hgode`` (SL-form and holomorphic
lifts), ``maps`` (S, DS, normalization, ramification, winding), ``hyp3``
(fronts, parallel families, caustics), ``mesh`` (grids and OBJ/SVG export),
``figures`` and ``cli``.
"""

from .errors import (ClearanceError, ConvergenceError, DomainError, EmptyGridError,
                     FlatFrontError, ParameterError, PoleError, StepSizeError, UmbilicError)
from .params import HGParams, relaxed_params

__version__ = "0.1.0"

__all__ = [
    "HGParams", "relaxed_params",
    "FlatFrontError", "ParameterError", "PoleError", "DomainError", "ConvergenceError",
    "ClearanceError", "StepSizeError", "UmbilicError", "EmptyGridError",
]
