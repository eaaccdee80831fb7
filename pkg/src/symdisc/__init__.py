"""Certified invariant-metric computations on the symmetrized polydisc.

The package splits into four layers: :mod:`symdisc.polyalg` (weighted
polynomials and torus pullbacks), :mod:`symdisc.symcore` (the domain
itself: symmetrization, membership, reduction maps),
:mod:`symdisc.certopt` (certified torus optimization), and
:mod:`symdisc.metrics` (the metric quantities and claim verifiers).
:mod:`symdisc.cli` exposes everything as the ``symdisc`` command.
"""

from .certopt import (Certificate, Interval1D, bb_maximize, circle_ratio_max,
                      critical_scan, grid_certify, minimize_1d,
                      multistart_max)
from .metrics import (GammaBounds, SeparationReport, VerificationError,
                      boundary_quad_max, certify_quartic_competitor,
                      g3_separation_report, gamma2_bounds, kappa_sandwich,
                      p_distance, poincare, quad_min_closed_form,
                      quartic_competitor_poly, reiffen2_cross_bound,
                      reiffen2_lower, rho, verify_even_extremals,
                      verify_gamma2_lower, verify_gamma2_upper,
                      verify_taylor_strict)
from .polyalg import (ExpSum, QuasiHomPoly, eval_poly, newton_power_sum,
                      pullback_torus, waring_coefficient)
from .symcore import (MembershipVerdict, RootFindingError, classify_point,
                      f_lambda, gz_taylor, membership_via_flambda,
                      pk_polynomial, sym_map)

__version__ = "0.1.0"

__all__ = [
    "Certificate", "Interval1D", "bb_maximize", "circle_ratio_max",
    "critical_scan", "grid_certify", "minimize_1d", "multistart_max",
    "GammaBounds", "SeparationReport", "VerificationError",
    "boundary_quad_max", "certify_quartic_competitor",
    "g3_separation_report", "gamma2_bounds", "kappa_sandwich",
    "p_distance", "poincare", "quad_min_closed_form",
    "quartic_competitor_poly", "reiffen2_cross_bound", "reiffen2_lower",
    "rho", "verify_even_extremals", "verify_gamma2_lower",
    "verify_gamma2_upper", "verify_taylor_strict",
    "ExpSum", "QuasiHomPoly", "eval_poly", "newton_power_sum",
    "pullback_torus", "waring_coefficient",
    "MembershipVerdict", "RootFindingError", "classify_point", "f_lambda",
    "gz_taylor", "membership_via_flambda", "pk_polynomial", "sym_map",
    "__version__",
]
