"""Explicit two-center analysis with the gauge ``f = -(r1 + r2)/2``.

At a point off the geodesic segment joining the centers, the unit covectors
``dr1`` and ``dr2`` span a plane with moving frame

    e1 = (dr1 + dr2)/|dr1 + dr2|,  e2 = (dr1 - dr2)/|dr1 - dr2|,  e3 = e1 x e2,

and ``dr1 = cos(phi) e1 + sin(phi) e2``, ``dr2 = cos(phi) e1 - sin(phi) e2``
with ``phi`` in ``[0, pi/2]`` (half the angle between ``dr1`` and ``dr2``).
In that frame the Schouten tensor depends only on ``r1``, ``r2`` and ``phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ansatz import Configuration, Gauge, fields
from .curvature import eig_sym4, schouten_q
from .hyperbolic import HPoint, coth, dist, dr_covector

MARGIN = 1e-9


class DegenerateFrameError(ValueError):
    """``dr1 = +-dr2``: the two-center frame is undefined at this point."""

    def __init__(self, msg, phi):
        super().__init__(msg)
        self.phi = phi


@dataclass(frozen=True)
class TwoCenterFrame:
    r1: float
    r2: float
    phi: float
    alpha: float
    beta: float
    gamma: float
    frame: np.ndarray  # rows e1, e2, e3 in {dx/z, dy/z, dz/z} components


def abg(r1: float, r2: float):
    """``(alpha, beta, gamma)`` for radii ``r1``, ``r2``."""
    if not (r1 > 0 and r2 > 0):
        raise ValueError("radii must be positive")
    c1, c2 = coth(r1), coth(r2)
    # c - 1 written as 2/expm1(2r) to survive large r
    d1, d2 = 2.0 / math.expm1(2 * r1), 2.0 / math.expm1(2 * r2)
    alpha = d1 + d2
    beta = (d1 * (c1 + 1.0) + d2 * (c2 + 1.0)) / (c1 + c2)
    return alpha, beta, d1 - d2


def conformal_factor(r1: float, r2: float) -> float:
    """``e^{-2f} V^{-1} = 2 e^{r1+r2} / (coth r1 + coth r2)``."""
    return 2.0 * math.exp(r1 + r2) / (coth(r1) + coth(r2))


def phi_at(p, p1, p2) -> float:
    p, p1, p2 = HPoint.of(p), HPoint.of(p1), HPoint.of(p2)
    d1, d2 = dr_covector(p, p1), dr_covector(p, p2)
    # atan2 of the two half-lengths is well conditioned at both ends
    return math.atan2(np.linalg.norm(d1 - d2), np.linalg.norm(d1 + d2))


def two_center_frame(p, p1, p2, tol: float = 1e-10) -> TwoCenterFrame:
    p, p1, p2 = HPoint.of(p), HPoint.of(p1), HPoint.of(p2)
    d1, d2 = dr_covector(p, p1), dr_covector(p, p2)
    s, d = d1 + d2, d1 - d2
    ns, nd = np.linalg.norm(s), np.linalg.norm(d)
    phi = math.atan2(nd, ns)
    if ns < tol or nd < tol:
        raise DegenerateFrameError(f"dr1 = +-dr2 at {tuple(p)}", phi)
    e1, e2 = s / ns, d / nd
    frame = np.array([e1, e2, np.cross(e1, e2)])
    r1, r2 = dist(p, p1), dist(p, p2)
    return TwoCenterFrame(r1, r2, phi, *abg(r1, r2), frame=frame)


def q_components(r1: float, r2: float, phi: float) -> np.ndarray:
    """Schouten components in the two-center frame (conformal normalisation)."""
    if not 0.0 <= phi <= math.pi / 2 + 1e-12:
        raise ValueError(f"phi must lie in [0, pi/2], got {phi}")
    a, b, g = abg(r1, r2)
    s2, c2 = math.sin(phi) ** 2, math.cos(phi) ** 2
    q = np.zeros((4, 4))
    q[0, 0] = (a + 1.0) * s2 + b * c2
    q[1, 1] = (a - b) * c2 - s2
    # (a + 1) - (b + 1) cos^2, rearranged to avoid cancelling near 1
    q[2, 2] = (a - b) + (b + 1.0) * s2
    q[3, 3] = s2 + b * c2
    q[2, 3] = q[3, 2] = g * math.sin(phi) * math.cos(phi)
    return q


def pipeline_q_in_frame(cfg: Configuration, p, frame: np.ndarray) -> np.ndarray:
    """General Schouten tensor at ``p`` rotated into the rows of ``frame``."""
    pd, gd = fields(cfg, p)
    T = np.eye(4)
    T[:3, :3] = frame
    return T @ schouten_q(pd, gd) @ T.T


@dataclass(frozen=True)
class MuCertificate:
    mu: np.ndarray
    mu13: float
    mu12: float
    lower: float
    bound: float
    det_excess: float
    passed: bool


def mu_certificate(r1: float, r2: float, phi: float, margin: float = MARGIN) -> MuCertificate:
    """Eigenvalues of the g-normalised Schouten matrix and the bounds on them.

    ``lower`` is ``alpha e^{r1+r2}/(coth r1 + coth r2)`` and ``bound`` the
    weaker ``2/(1 + e^{-(r1+r2)})``; both must stay below ``mu1 + mu3``.
    """
    q = q_components(r1, r2, phi)
    mu = eig_sym4(conformal_factor(r1, r2) * q)
    a, b, g = abg(r1, r2)
    s2, c2 = math.sin(phi) ** 2, math.cos(phi) ** 2
    lower = a * math.exp(r1 + r2) / (coth(r1) + coth(r2))
    bound = 2.0 / (1.0 + math.exp(-(r1 + r2)))
    block = q[2:, 2:] - s2 * np.eye(2)
    det_excess = float(np.linalg.det(block) - (b * b - g * g) * s2 * c2)
    mu13 = float(mu[0] + mu[2])
    mu12 = float(mu[0] + mu[1])
    scale = 1.0 + abs(mu13)
    passed = (
        mu13 > 1.0 - margin
        and mu13 > lower - margin * scale
        and mu12 >= -margin
        and det_excess > -margin * (1.0 + abs(b * b))
    )
    return MuCertificate(mu, mu13, mu12, lower, bound, det_excess, bool(passed))


def two_center_config(separation: float) -> Configuration:
    """``p1 = (0,0,1)``, ``p2 = (0,0,e^sep)`` with the mean-distance gauge."""
    return Configuration(((0.0, 0.0, 1.0), (0.0, 0.0, math.exp(separation))), Gauge.mean_distance())
