"""Sigma functions of plane Weierstrass curves.

The pipeline runs from numerical semigroups and Young diagrams through
W-normalized differentials and the fundamental second-kind form to period
matrices, Riemann theta functions and the sigma function.
"""

from .curve import WCurve, load_curve, parse_curve
from .errors import ValidationError, VerificationError, WSigmaError
from .kleinforms import differential_bases, nuI_basis, nuII_basis, pi_integral, third_kind
from .periods import abel_map, homology_cycles, period_matrices, riemann_constant
from .schur import epsilon_sign, schur_in_u, schur_polynomial
from .semigroup import build_semigroup, natural_index, young_diagram
from .series import expand_at_infinity
from .thetasigma import SigmaContext, ThetaCharacteristic, build_context, sigma, theta, verify_suite

__version__ = "0.1.0"

__all__ = [
    "WCurve",
    "load_curve",
    "parse_curve",
    "WSigmaError",
    "ValidationError",
    "VerificationError",
    "differential_bases",
    "nuI_basis",
    "nuII_basis",
    "pi_integral",
    "third_kind",
    "abel_map",
    "homology_cycles",
    "period_matrices",
    "riemann_constant",
    "epsilon_sign",
    "schur_in_u",
    "schur_polynomial",
    "build_semigroup",
    "natural_index",
    "young_diagram",
    "expand_at_infinity",
    "SigmaContext",
    "ThetaCharacteristic",
    "build_context",
    "sigma",
    "theta",
    "verify_suite",
]
