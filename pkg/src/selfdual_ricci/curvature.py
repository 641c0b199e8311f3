"""Closed-form Ricci, scalar and Schouten curvature of ``e^{2f}(V h + V^{-1} theta^2)``.

Frame conventions
-----------------
Components are first produced in the *adapted* frame ``{e1, e2, e3, e4}``
with ``e1..e3 = {dx/z, dy/z, dz/z}`` and ``e4 = V^{-1} theta``; this frame is
orthonormal for ``h + (V^{-1} theta)^2``, i.e. for ``e^{-2f} V^{-1} g``.
:func:`orthonormal_rescale` multiplies by ``e^{-2f} V^{-1}`` to obtain
components in a g-orthonormal frame, on which :func:`classify` operates.

``x . y`` (symmetric product) is ``(x (x) y + y (x) x) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ansatz import Configuration, GaugeData, PotentialData, fields
from .hyperbolic import HPoint, star_wedge

SQRT3 = math.sqrt(3.0)


def _sym(a, b):
    return 0.5 * (np.outer(a, b) + np.outer(b, a))


def ricci_frame(pd: PotentialData, gd: GaugeData) -> np.ndarray:
    """Ricci tensor in the adapted frame."""
    V, dV = pd.V, pd.dV
    df, Ddf, lapf = gd.df, gd.Ddf, gd.lapf
    df2 = float(df @ df)
    vdf = float(dV @ df) / V
    out = np.empty((4, 4))
    out[:3, :3] = (
        (-2.0 - lapf - 2.0 * df2 - vdf) * np.eye(3)
        - 2.0 * Ddf
        + 2.0 * np.outer(df, df)
        + 2.0 * _sym(dV, df) / V
    )
    out[3, 3] = -lapf - 2.0 * df2 + vdf
    cross = -star_wedge(dV, df) / V
    out[:3, 3] = cross
    out[3, :3] = cross
    return out


def scalar_curv(pd: PotentialData, gd: GaugeData) -> float:
    return 6.0 * math.exp(-2.0 * gd.f) / pd.V * (-1.0 - gd.lapf - float(gd.df @ gd.df))


def schouten_q(pd: PotentialData, gd: GaugeData) -> np.ndarray:
    """``Q = Ric - (s/6) g`` in the adapted frame, assembled from ``psi = d log V``."""
    psi = pd.dV / pd.V
    df, Ddf = gd.df, gd.Ddf
    df2 = float(df @ df)
    pdf = float(psi @ df)
    out = np.empty((4, 4))
    out[:3, :3] = (
        (-1.0 - df2 - pdf) * np.eye(3) - 2.0 * Ddf + 2.0 * np.outer(df, df) + 2.0 * _sym(psi, df)
    )
    out[3, 3] = 1.0 - df2 + pdf
    cross = -star_wedge(psi, df)
    out[:3, 3] = cross
    out[3, :3] = cross
    return out


def metric_frame(pd: PotentialData, gd: GaugeData) -> np.ndarray:
    """Components of g itself in the adapted frame: ``e^{2f} V Id``."""
    return math.exp(2.0 * gd.f) * pd.V * np.eye(4)


def orthonormal_rescale(t: np.ndarray, pd: PotentialData, gd: GaugeData) -> np.ndarray:
    return np.asarray(t) * (math.exp(-2.0 * gd.f) / pd.V)


def eig_sym4(t, tol: float = 1e-13, max_sweeps: int = 50) -> np.ndarray:
    """Ascending eigenvalues of symmetric matrices by cyclic Jacobi rotation.

    Accepts a single ``(k, k)`` matrix or a stack ``(..., k, k)``; the stack
    is rotated in lockstep.
    """
    a = np.array(t, dtype=float)
    single = a.ndim == 2
    if single:
        a = a[None]
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    k = a.shape[-1]
    batch = a.shape[:-2]
    a = a.reshape(-1, k, k)
    scale = np.sqrt((a * a).sum(axis=(1, 2)))
    scale[scale == 0] = 1.0
    iu = np.triu_indices(k, 1)
    rows = np.arange(a.shape[0])
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * (a[:, iu[0], iu[1]] ** 2).sum(axis=1))
        if np.all(off <= tol * scale):
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[:, p, q]
                active = np.abs(apq) > 1e-300
                if not active.any():
                    continue
                safe = np.where(active, apq, 1.0)
                theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                t_ = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t_[theta == 0] = 1.0
                t_ = np.where(active, t_, 0.0)
                c = 1.0 / np.hypot(t_, 1.0)
                s = t_ * c
                J = np.broadcast_to(np.eye(k), a.shape).copy()
                J[rows, p, p] = c
                J[rows, q, q] = c
                J[rows, p, q] = s
                J[rows, q, p] = -s
                a = np.swapaxes(J, 1, 2) @ a @ J
    ev = np.sort(np.diagonal(a, axis1=1, axis2=2), axis=1).reshape(*batch, k)
    return ev[0] if single else ev


@dataclass(frozen=True)
class CurvatureReport:
    ric_prime: np.ndarray
    s: float
    eigs: np.ndarray
    q_eigs: np.ndarray
    lam: Optional[np.ndarray]
    positive_ricci: bool
    strongly_positive: bool
    ric_operator_nonneg: bool
    gb_integrand: float
    ric0_norm: float
    point: Optional[tuple] = None

    @property
    def flags(self) -> dict:
        return {
            "positive_ricci": self.positive_ricci,
            "strongly_positive": self.strongly_positive,
            "ric_operator_nonneg": self.ric_operator_nonneg,
        }

    def to_json(self) -> dict:
        return {
            "point": None if self.point is None else [float(c) for c in self.point],
            "s": float(self.s),
            "eigs": [float(e) for e in self.eigs],
            "q_eigs": [float(e) for e in self.q_eigs],
            "flags": self.flags,
            "gb_integrand": float(self.gb_integrand),
        }


def classify(ric_prime, s: float, point=None) -> CurvatureReport:
    """Positivity flags of a g-orthonormal Ricci matrix with scalar curvature ``s``."""
    ric_prime = np.asarray(ric_prime, dtype=float)
    eigs = eig_sym4(ric_prime)
    q_eigs = eigs - s / 6.0
    # hypot rescales internally, so tiny spectra do not underflow to |Ric0| = 0
    ric0 = math.hypot(*(eigs - s / 4.0))
    ric0_sq = ric0 * ric0
    return CurvatureReport(
        ric_prime=ric_prime,
        s=float(s),
        eigs=eigs,
        q_eigs=q_eigs,
        lam=eigs / s if s != 0 else None,
        positive_ricci=bool(eigs[0] > 0),
        # eigs[0] > 0 is implied in exact arithmetic; it settles rounding ties on the boundary
        strongly_positive=bool(s > 0 and ric0 < s / (2.0 * SQRT3) and eigs[0] > 0),
        ric_operator_nonneg=bool(q_eigs[0] + q_eigs[1] >= 0),
        gb_integrand=s * s / 12.0 - ric0_sq,
        ric0_norm=ric0,
        point=None if point is None else tuple(point),
    )


def ricci_prime(cfg: Configuration, p) -> tuple:
    """``(Ric', s)`` at ``p``: g-orthonormal Ricci matrix and scalar curvature."""
    pd, gd = fields(cfg, p)
    return orthonormal_rescale(ricci_frame(pd, gd), pd, gd), scalar_curv(pd, gd)


def evaluate(cfg: Configuration, p) -> CurvatureReport:
    p = HPoint.of(p)
    ric, s = ricci_prime(cfg, p)
    return classify(ric, s, point=tuple(p))
