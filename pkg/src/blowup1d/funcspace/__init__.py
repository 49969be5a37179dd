"""Function representations and singular-integral transforms."""

from .halfline import (HalfLineFunction, KernelPiece, apply_piece, hilbert_alpha,
                       hilbert_alpha_at, hilbert_alpha_at_zero, lambda_inv_alpha,
                       operator_norm_estimate, piece_difference_from_zero,
                       sobolev_norm_tilde, weighted_average_lambda)
from .hardy import hardy_average, power_cutoff, sharp_constant
from .identities import KINDS as IDENTITY_KINDS
from .identities import identity_residual
from .line import LineFunction, sobolev_norm
from .pair import ComplexPair
from .periodic import PeriodicFunction
from .pv import PvQuadrature, pv_cot_constant


def hilbert(f):
    """Hilbert transform of a LineFunction or PeriodicFunction."""
    return f.hilbert()


def lambda_inv(f):
    """z -> int_0^z Hf(s) ds."""
    return f.lambda_inv()


__all__ = [
    "LineFunction", "PeriodicFunction", "HalfLineFunction", "ComplexPair", "KernelPiece",
    "PvQuadrature", "hilbert", "lambda_inv", "hilbert_alpha", "hilbert_alpha_at",
    "hilbert_alpha_at_zero", "lambda_inv_alpha", "weighted_average_lambda", "apply_piece",
    "piece_difference_from_zero", "pv_cot_constant", "identity_residual", "IDENTITY_KINDS",
    "hardy_average", "power_cutoff", "sharp_constant", "sobolev_norm", "sobolev_norm_tilde",
    "operator_norm_estimate",
]
