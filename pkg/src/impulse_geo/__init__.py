"""Numerical geodesics of impulsive N-fronted wave geometries.

The package integrates geodesics of product geometries carrying a
regularized impulse ``f(x) delta_eps(u)`` on the null hypersurface
``u = 0``, certifies the crossing of the impulse strip by a fixed-point
contraction bound, and measures convergence of the regularized geodesics
to the broken background geodesics of the sharp limit.
"""

from .artifacts import TOOL_VERSION as __version__
from .dynamics import (GeodesicPath, GeodesicState, InitialData,
                       integrate_impulsive_geodesic, lagrangian_energy, rhs)
from .errors import (CertificateViolation, ChartDomainError, ConfigError,
                     ImpulseGeoError, IntegrationFailure, NumericalError,
                     ShootingFailure)
from .existence import (ExistenceCertificate, alpha_bound, certify,
                        estimate_sup_norms, picard_solve,
                        weissinger_budget, weissinger_coefficient)
from .geometry import (ManifoldModel, background_geodesic, distance_estimate,
                       euclidean, from_metric, hyperbolic_half_plane,
                       sphere_stereographic)
from .limits import (ConvergenceTable, LimitGeodesic, convergence_study,
                     inner_scale_error, limit_geodesic)
from .profiles import (DeltaNet, WaveProfile, asymmetric_net, classify_growth,
                       constant_profile, gaussian_bump_profile,
                       linear_profile, metric_gradient, mollifier_net,
                       quadratic_form_profile, radial_power_profile,
                       signed_net, verify_strict_delta_net)
from .scenarios import builtin_models, builtin_nets, builtin_scenarios

__all__ = [
    "__version__",
    # geometry
    "ManifoldModel", "euclidean", "hyperbolic_half_plane",
    "sphere_stereographic", "from_metric", "background_geodesic",
    "distance_estimate",
    # profiles and nets
    "WaveProfile", "constant_profile", "linear_profile",
    "quadratic_form_profile", "radial_power_profile",
    "gaussian_bump_profile", "metric_gradient", "DeltaNet", "mollifier_net",
    "asymmetric_net", "signed_net", "verify_strict_delta_net",
    "classify_growth",
    # dynamics
    "GeodesicState", "GeodesicPath", "InitialData", "rhs",
    "integrate_impulsive_geodesic", "lagrangian_energy",
    # existence
    "ExistenceCertificate", "estimate_sup_norms", "alpha_bound", "certify",
    "picard_solve", "weissinger_coefficient", "weissinger_budget",
    # limits
    "LimitGeodesic", "limit_geodesic", "inner_scale_error",
    "ConvergenceTable", "convergence_study",
    # scenarios
    "builtin_models", "builtin_nets", "builtin_scenarios",
    # errors
    "ImpulseGeoError", "ChartDomainError", "ConfigError", "NumericalError",
    "IntegrationFailure", "CertificateViolation", "ShootingFailure",
]
