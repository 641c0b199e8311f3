"""Self-dual conformal metrics from the hyperbolic ansatz: curvature, positivity
certificates and a finite-difference curvature oracle."""

from .ansatz import Configuration, Gauge, GaugeData, PotentialData, collinear_config, gauge, potential
from .curvature import (
    CurvatureReport,
    classify,
    eig_sym4,
    evaluate,
    orthonormal_rescale,
    ricci_frame,
    scalar_curv,
    schouten_q,
)
from .hyperbolic import HPoint, dist, dr_covector, green, dgreen, hess_dist, star_wedge

__all__ = [
    "Configuration",
    "CurvatureReport",
    "Gauge",
    "GaugeData",
    "HPoint",
    "PotentialData",
    "classify",
    "collinear_config",
    "dgreen",
    "dist",
    "dr_covector",
    "eig_sym4",
    "evaluate",
    "gauge",
    "green",
    "hess_dist",
    "orthonormal_rescale",
    "potential",
    "ricci_frame",
    "scalar_curv",
    "schouten_q",
    "star_wedge",
]

__version__ = "0.1.0"
