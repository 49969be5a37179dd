"""Perturbative construction of self-similar profiles for small a."""

from .majorant import catalan, majorant_radius, majorant_sequence
from .operators import (SMOOTH, Branch, ConsistencyError, InverseKernel, apply_L,
                        consistency_value, invert_L, split_inverse, ts_operator)
from .state import (SeriesState, build_rhs, build_series, decay_exponent, evaluate_profile,
                    extend, holder_exponent, lambda_of, new_state, save_archive, select_lambda,
                    to_line)

__all__ = [
    "Branch", "SMOOTH", "ConsistencyError", "InverseKernel", "SeriesState", "apply_L",
    "consistency_value", "invert_L", "split_inverse", "ts_operator", "build_rhs",
    "select_lambda", "extend", "new_state", "build_series", "evaluate_profile", "lambda_of",
    "holder_exponent", "decay_exponent", "save_archive", "to_line", "majorant_radius",
    "majorant_sequence", "catalan",
]
