"""Theta-function monodromy data of the rank-two q-difference problem with four
singular points: coefficients, the monodromy quadric, its Segre embedding and
the torus-action combinatorics behind it.
"""

from .coeffs import (InterpCoeffs, QuadricCoeffs, delta, discriminant, gamma_constants,
                     interp_coeffs, interp_coeffs_oracle, quadric_coeffs)
from .params import ParamSet, complete_x4, random_params, ref_params, validate
from .quadric import Proj1Point, Quad4Point, classify, eval_form, pencil_membership
from .theta import PrecisionPolicy, T, t_ratio, theta

__all__ = [
    "InterpCoeffs", "QuadricCoeffs", "delta", "discriminant", "gamma_constants",
    "interp_coeffs", "interp_coeffs_oracle", "quadric_coeffs",
    "ParamSet", "complete_x4", "random_params", "ref_params", "validate",
    "Proj1Point", "Quad4Point", "classify", "eval_form", "pencil_membership",
    "PrecisionPolicy", "T", "t_ratio", "theta",
]

__version__ = "0.1.0"
