"""Finite-difference curvature of explicit 4-dimensional chart metrics.

This module does not use any of the closed-form curvature formulas. It
builds the ansatz metric ``e^{2f}(V h + V^{-1} theta^2)`` in coordinates,
differentiates its components numerically, and forms Christoffel symbols,
the Riemann tensor, Ricci, scalar and Weyl curvature from the textbook
coordinate expressions.

Two charts are available:

``half_space``
    Coordinates ``(x, y, z, t)`` over the upper half space for centers on the
    z-axis, with ``theta = dt + w(rho, z) dvarphi`` where ``rho`` and
    ``varphi`` are polar coordinates in the (x, y)-plane.
``hopf``
    For a single center: geodesic polar coordinates ``r`` and Euler angles
    ``(vartheta, varphi, psi)`` on the 3-sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .ansatz import Configuration, fields, gauge as gauge_data, potential
from .ansatz import MEAN_DISTANCE, SINGLE_DISTANCE, ZERO
from .curvature import ricci_frame
from .hyperbolic import HPoint, dist

QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-13


# ---------------------------------------------------------------------------
# connection form for axisymmetric potentials


def _axis_partials(centers_z, rho: float, z: float):
    """Coordinate partials ``(V_rho, V_z)`` at cylindrical ``(rho, z)``."""
    v_rho = 0.0
    v_z = 0.0
    for c in centers_z:
        e2 = rho * rho + (z - c) ** 2
        u = e2 / (2.0 * z * c)
        sh = math.sqrt(u * (u + 2.0))
        g = -0.5 / (sh * sh * sh)  # G'(r) / sinh r
        v_rho += g * rho / (z * c)
        v_z += g * ((z - c) / (z * c) - e2 / (2.0 * z * z * c))
    return v_rho, v_z


@dataclass(frozen=True)
class ThetaPotential:
    """``w(rho, z)`` with ``d(w dvarphi) = *dV``.

    The gauge constant is fixed by ``w = 0`` on the axis above the topmost
    center. Values are computed by adaptive quadrature of

        dw/drho = rho V_z / z,    dw/dz = -rho V_rho / z

    along a radial segment at a fixed height ``z_ref`` above all centers
    followed by a vertical segment, which never meets the axis.
    """

    centers_z: tuple
    z_ref: float

    def w_rho(self, rho: float, z: float) -> float:
        return rho * _axis_partials(self.centers_z, rho, z)[1] / z

    def w_z(self, rho: float, z: float) -> float:
        return -rho * _axis_partials(self.centers_z, rho, z)[0] / z

    def _radial(self, rho: float, z: float) -> float:
        if rho == 0.0:
            return 0.0
        val, _ = integrate.quad(
            lambda s: self.w_rho(s, z), 0.0, rho, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200
        )
        return val

    def _vertical(self, rho: float, z0: float, z1: float) -> float:
        if rho == 0.0 or z0 == z1:
            return 0.0
        lo, hi = min(z0, z1), max(z0, z1)
        pts = [c for c in self.centers_z if lo < c < hi]
        val, _ = integrate.quad(
            lambda s: self.w_z(rho, s),
            z0,
            z1,
            epsabs=QUAD_EPSABS,
            epsrel=QUAD_EPSREL,
            limit=400,
            points=pts or None,
        )
        return val

    def __call__(self, rho: float, z: float) -> float:
        if not self.centers_z:
            return 0.0
        return self._radial(rho, self.z_ref) + self._vertical(rho, self.z_ref, z)

    def radial_from_axis(self, rho: float, z: float) -> float:
        """Alternative path: straight out from the axis at height ``z``.

        Needs the axis value, taken as ``-(number of centers above z)``.
        """
        above = sum(1 for c in self.centers_z if c > z)
        return -above + self._radial(rho, z)

    def axis_jumps(self, rho_factor: float = 0.5) -> list:
        """Increase of the axis value of ``w`` across each center, going up.

        Each jump is the integral of ``dw`` around the loop axis -> out at
        the lower height -> up at radius ``rho`` -> back to the axis, i.e.
        the flux of ``*dV`` through a surface of revolution around one center.
        """
        cs = sorted(self.centers_z)
        heights = [cs[0] * 0.5] + [math.sqrt(a * b) for a, b in zip(cs, cs[1:])] + [cs[-1] * 2.0]
        jumps = []
        for c, lo, hi in zip(cs, heights, heights[1:]):
            rho = rho_factor * c
            up = self._vertical(rho, lo, hi)
            jumps.append(up - self._radial(rho, hi) + self._radial(rho, lo))
        return jumps


def theta_potential(cfg: Configuration) -> ThetaPotential:
    if any(abs(c.x) > 0 or abs(c.y) > 0 for c in cfg.centers):
        raise ValueError("theta_potential needs every center on the z-axis")
    zs = tuple(c.z for c in cfg.centers)
    z_ref = 2.0 * max(zs) if zs else 1.0
    return ThetaPotential(zs, z_ref)


# ---------------------------------------------------------------------------
# chart metrics


@dataclass(frozen=True)
class ChartMetric:
    """Metric components as a function of 4 chart coordinates.

    ``orientation`` is +1 when the coordinate order is positively oriented.
    """

    components: Callable[[np.ndarray], np.ndarray]
    orientation: int = 1
    domain: Callable[[np.ndarray], bool] = field(default=lambda q: True)
    name: str = ""

    def __call__(self, q) -> np.ndarray:
        return self.components(np.asarray(q, dtype=float))

    def rescaled(self, f: Callable[[np.ndarray], float], name: str = "") -> "ChartMetric":
        """``e^{2f}`` times this metric."""
        comps = self.components
        return ChartMetric(
            lambda q: math.exp(2.0 * f(q)) * comps(q), self.orientation, self.domain, name or self.name
        )

    def flipped(self) -> "ChartMetric":
        return ChartMetric(self.components, -self.orientation, self.domain, self.name + " (flipped)")


def _theta_coeffs(tp: ThetaPotential, q) -> np.ndarray:
    x, y = q[0], q[1]
    rho2 = x * x + y * y
    w = tp(math.sqrt(rho2), q[2])
    return np.array([-w * y / rho2, w * x / rho2, 0.0, 1.0])


def adapted_coframe(cfg: Configuration, tp: ThetaPotential, q) -> np.ndarray:
    """Rows: ``dx/z, dy/z, dz/z, V^{-1} theta`` in half-space chart components."""
    z = q[2]
    V = potential(cfg, HPoint(q[0], q[1], z)).V
    P = np.zeros((4, 4))
    P[0, 0] = P[1, 1] = P[2, 2] = 1.0 / z
    P[3] = _theta_coeffs(tp, q) / V
    return P


def build_chart_metric(cfg: Configuration, chart: str = "half_space", with_gauge: bool = True) -> ChartMetric:
    """Explicit chart metric for ``cfg``; ``with_gauge=False`` drops ``e^{2f}``."""
    if chart == "half_space":
        tp = theta_potential(cfg)
        centers = cfg.centers

        def comps(q):
            p = HPoint(q[0], q[1], q[2])
            P = adapted_coframe(cfg, tp, q)
            scale = potential(cfg, p).V
            if with_gauge:
                scale *= math.exp(2.0 * gauge_data(cfg, p).f)
            return scale * (P.T @ P)

        def domain(q):
            if not q[2] > 0 or q[0] * q[0] + q[1] * q[1] == 0.0:
                return False
            p = HPoint(q[0], q[1], q[2])
            return all(dist(p, c) > 1e-6 for c in centers)

        # theta ^ v_h = dt ^ dx ^ dy ^ dz / z^3 = -dx ^ dy ^ dz ^ dt / z^3
        return ChartMetric(comps, -1, domain, f"half_space n={cfg.n} {cfg.gauge.kind}")
    if chart == "hopf":
        if cfg.n != 1:
            raise ValueError("the Hopf chart is only available for a single center")
        kind = cfg.gauge.kind
        if kind in (SINGLE_DISTANCE, MEAN_DISTANCE):
            fr = -1.0
        elif kind == ZERO:
            fr = 0.0
        else:
            raise ValueError(f"the Hopf chart supports radial gauges only, not {kind!r}")
        if not with_gauge:
            fr = 0.0

        def comps(q):
            r, th, ph, _ = q
            V = -1.0 / math.expm1(-2.0 * r)
            sh2 = math.sinh(r) ** 2
            g = np.zeros((4, 4))
            g[0, 0] = V
            g[1, 1] = V * sh2
            g[2, 2] = V * sh2 * math.sin(th) ** 2
            # theta = (dpsi + cos(vartheta) dvarphi)/2
            a = np.array([0.0, 0.0, 0.5 * math.cos(th), 0.5])
            g += np.outer(a, a) / V
            return math.exp(2.0 * fr * r) * g

        def domain(q):
            return q[0] > 0 and math.sin(q[1]) > 0

        # theta ^ v_h is a negative multiple of dr ^ dvartheta ^ dvarphi ^ dpsi
        return ChartMetric(comps, -1, domain, f"hopf {kind}")
    raise ValueError(f"unknown chart {chart!r}")


def fubini_study_polar(q) -> np.ndarray:
    """Fubini-Study metric in ``(rho, vartheta, varphi, psi)``.

    ``d rho^2 + sin^2 rho (sigma1^2 + sigma2^2 + cos^2 rho sigma3^2)`` with
    ``sigma1^2 + sigma2^2 = (dvartheta^2 + sin^2 vartheta dvarphi^2)/4`` and
    ``sigma3 = (dpsi + cos vartheta dvarphi)/2`` up to sign.
    """
    rho, th, _, _ = q
    s2 = math.sin(rho) ** 2
    g = np.zeros((4, 4))
    g[0, 0] = 1.0
    g[1, 1] = 0.25 * s2
    g[2, 2] = 0.25 * s2 * math.sin(th) ** 2
    a = np.array([0.0, 0.0, 0.5 * math.cos(th), 0.5])
    g += s2 * math.cos(rho) ** 2 * np.outer(a, a)
    return g


def flat_metric() -> ChartMetric:
    return ChartMetric(lambda q: np.eye(4), 1, lambda q: True, "flat")


# ---------------------------------------------------------------------------
# finite-difference curvature


def _metric_derivs(m: ChartMetric, q: np.ndarray, h: float):
    cache = {}

    def g(offset):
        key = tuple(np.round(offset / h).astype(int))
        if key not in cache:
            pt = q + offset
            if not m.domain(pt):
                raise ValueError(f"stencil point {pt} leaves the chart domain")
            cache[key] = m(pt)
        return cache[key]

    E = np.eye(4) * h
    zero = np.zeros(4)
    g0 = g(zero)
    d1 = np.empty((4, 4, 4))
    d2 = np.empty((4, 4, 4, 4))
    for a in range(4):
        gp, gm = g(E[a]), g(-E[a])
        d1[a] = (gp - gm) / (2 * h)
        d2[a, a] = (gp - 2 * g0 + gm) / (h * h)
        for b in range(a):
            d2[a, b] = d2[b, a] = (
                g(E[a] + E[b]) - g(E[a] - E[b]) - g(-E[a] + E[b]) + g(-E[a] - E[b])
            ) / (4 * h * h)
    return g0, d1, d2


def metric_derivatives(m: ChartMetric, q, step: float = 1e-3, richardson: bool = True):
    """``(g, dg, ddg)`` with ``dg[a] = d_a g`` and ``ddg[a, b] = d_a d_b g``."""
    q = np.asarray(q, dtype=float)
    g0, d1, d2 = _metric_derivs(m, q, step)
    if richardson:
        _, d1b, d2b = _metric_derivs(m, q, 2 * step)
        d1 = (4 * d1 - d1b) / 3
        d2 = (4 * d2 - d2b) / 3
    return g0, d1, d2


@dataclass(frozen=True)
class FDCurvature:
    metric: np.ndarray
    christoffel: np.ndarray  # Gamma^a_{bc}
    riemann: np.ndarray  # R_{abcd}, Ric_{bd} = g^{ac} R_{abcd}
    ricci: np.ndarray
    scalar: float
    weyl: np.ndarray
    weyl_plus: float
    weyl_minus: float
    bianchi_residual: float
    weyl_trace_residual: float


def christoffel(g, dg):
    """Second-kind symbols ``Gamma^a_{bc}`` from ``dg[c, a, b] = d_c g_{ab}``."""
    first = 0.5 * (np.einsum("cab->abc", dg) + np.einsum("bac->abc", dg) - np.einsum("abc->abc", dg))
    return np.einsum("ad,dbc->abc", np.linalg.inv(g), first)


_PAIRS = list(combinations(range(4), 2))


def _hodge_matrix():
    # *(e_a ^ e_b) = sum_{c<d} eps_{abcd} e_c ^ e_d
    S = np.zeros((6, 6))
    for i, (a, b) in enumerate(_PAIRS):
        for j, (c, d) in enumerate(_PAIRS):
            perm = [a, b, c, d]
            if len(set(perm)) == 4:
                inv = sum(1 for x in range(4) for y in range(x + 1, 4) if perm[x] > perm[y])
                S[j, i] = -1.0 if inv % 2 else 1.0
    return S


HODGE = _hodge_matrix()


def oriented_frame(g: np.ndarray, orientation: int) -> np.ndarray:
    """Columns form a g-orthonormal basis, positively oriented."""
    L = np.linalg.cholesky(g)
    M = np.linalg.inv(L).T
    if np.linalg.det(M) * orientation < 0:
        M[:, 0] *= -1.0
    return M


def weyl_split(weyl: np.ndarray, g: np.ndarray, orientation: int):
    """Norms of the self-dual and anti-self-dual parts of the Weyl tensor."""
    M = oriented_frame(g, orientation)
    W = np.einsum("abcd,aA,bB,cC,dD->ABCD", weyl, M, M, M, M)
    op = np.array([[W[a, b, c, d] for (c, d) in _PAIRS] for (a, b) in _PAIRS])
    Pp = 0.5 * (np.eye(6) + HODGE)
    Pm = 0.5 * (np.eye(6) - HODGE)
    return float(np.linalg.norm(Pp @ op @ Pp)), float(np.linalg.norm(Pm @ op @ Pm))


def fd_curvature(m: ChartMetric, q, step: float = 1e-3, richardson: bool = True) -> FDCurvature:
    q = np.asarray(q, dtype=float)
    g, dg, ddg = metric_derivatives(m, q, step, richardson)
    gi = np.linalg.inv(g)
    Gam = christoffel(g, dg)
    # R_{abcd} = 1/2 (g_{ad,bc} + g_{bc,ad} - g_{ac,bd} - g_{bd,ac})
    #           + g_{ef} (Gam^e_{bc} Gam^f_{ad} - Gam^e_{bd} Gam^f_{ac})
    second = 0.5 * (
        np.einsum("bcad->abcd", ddg)
        + np.einsum("adbc->abcd", ddg)
        - np.einsum("bdac->abcd", ddg)
        - np.einsum("acbd->abcd", ddg)
    )
    quad = np.einsum("ef,ebc,fad->abcd", g, Gam, Gam) - np.einsum("ef,ebd,fac->abcd", g, Gam, Gam)
    R = second + quad
    ric = np.einsum("ac,abcd->bd", gi, R)
    ric = 0.5 * (ric + ric.T)
    s = float(np.einsum("bd,bd->", gi, ric))
    W = (
        R
        - 0.5
        * (
            np.einsum("ac,bd->abcd", g, ric)
            - np.einsum("ad,bc->abcd", g, ric)
            - np.einsum("bc,ad->abcd", g, ric)
            + np.einsum("bd,ac->abcd", g, ric)
        )
        + s / 6.0 * (np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g))
    )
    bianchi = R + np.einsum("acdb->abcd", R) + np.einsum("adbc->abcd", R)
    scale = 1.0 + np.abs(R).max()
    wp, wm = weyl_split(W, g, m.orientation)
    return FDCurvature(
        metric=g,
        christoffel=Gam,
        riemann=R,
        ricci=ric,
        scalar=s,
        weyl=W,
        weyl_plus=wp,
        weyl_minus=wm,
        bianchi_residual=float(np.abs(bianchi).max() / scale),
        weyl_trace_residual=float(np.abs(np.einsum("ac,abcd->bd", gi, W)).max() / scale),
    )


def selfduality_residual(m: ChartMetric, q, step: float = 1e-3) -> float:
    """``|W-| / (|W+| + |W-|)``; near 0 for a self-dual metric."""
    c = fd_curvature(m, q, step)
    return c.weyl_minus / (c.weyl_plus + c.weyl_minus + np.finfo(float).eps)


def chart_hessian(f: Callable[[np.ndarray], float], g0: ChartMetric, q, step: float = 1e-3):
    """``(df, nabla df)`` of a chart function by Richardson-extrapolated differences."""
    q = np.asarray(q, dtype=float)

    def derivs(h):
        E = np.eye(4) * h
        f0 = f(q)
        d1 = np.empty(4)
        d2 = np.empty((4, 4))
        for a in range(4):
            fp, fm = f(q + E[a]), f(q - E[a])
            d1[a] = (fp - fm) / (2 * h)
            d2[a, a] = (fp - 2 * f0 + fm) / (h * h)
            for b in range(a):
                d2[a, b] = d2[b, a] = (
                    f(q + E[a] + E[b]) - f(q + E[a] - E[b]) - f(q - E[a] + E[b]) + f(q - E[a] - E[b])
                ) / (4 * h * h)
        return d1, d2

    d1, d2 = derivs(step)
    d1b, d2b = derivs(2 * step)
    d1 = (4 * d1 - d1b) / 3
    d2 = (4 * d2 - d2b) / 3
    g, dg, _ = metric_derivatives(g0, q, step)
    Gam = christoffel(g, dg)
    return d1, d2 - np.einsum("cab,c->ab", Gam, d1), g


def chart_laplacian(f, g0: ChartMetric, q, step: float = 1e-3) -> float:
    """Trace of ``nabla df`` (the sign convention with ``lap log z = -2`` on H^3)."""
    _, hess, g = chart_hessian(f, g0, q, step)
    return float(np.einsum("ab,ab->", np.linalg.inv(g), hess))


def conformal_rescale_ricci(ric0: np.ndarray, f, g0: ChartMetric, q, step: float = 1e-3) -> np.ndarray:
    """Ricci tensor of ``e^{2f} g0`` from that of ``g0``.

    ``Ric0 - 2 nabla df + 2 df^2 - (lap f + 2 |df|^2) g0`` with
    ``lap = trace nabla d``.
    """
    df, hess, g = chart_hessian(f, g0, q, step)
    gi = np.linalg.inv(g)
    lap = float(np.einsum("ab,ab->", gi, hess))
    norm2 = float(df @ gi @ df)
    return np.asarray(ric0) - 2 * hess + 2 * np.outer(df, df) - (lap + 2 * norm2) * g


def pipeline_ricci_chart(cfg: Configuration, q, tp: Optional[ThetaPotential] = None) -> np.ndarray:
    """Closed-form Ricci tensor at ``q`` in half-space chart components."""
    q = np.asarray(q, dtype=float)
    tp = tp or theta_potential(cfg)
    pd, gd = fields(cfg, HPoint(q[0], q[1], q[2]))
    P = adapted_coframe(cfg, tp, q)
    return P.T @ ricci_frame(pd, gd) @ P


def gauge_function(cfg: Configuration) -> Callable[[np.ndarray], float]:
    """``f`` of the configuration's gauge as a function of half-space chart coordinates."""
    return lambda q: gauge_data(cfg, HPoint(q[0], q[1], q[2])).f


def sample_chart_points(cfg: Configuration, count: int, seed: int = 0, min_dist: float = 0.15):
    """Random half-space chart points away from the axis and the centers."""
    rng = np.random.default_rng(seed)
    zs = [c.z for c in cfg.centers] or [1.0]
    zlo, zhi = 0.5 * min(zs), 2.0 * max(zs)
    out = []
    while len(out) < count:
        rho = rng.uniform(0.2, 1.5) * math.sqrt(zlo * zhi)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        z = math.exp(rng.uniform(math.log(zlo), math.log(zhi)))
        p = HPoint(rho * math.cos(ang), rho * math.sin(ang), z)
        if cfg.centers and min(dist(p, c) for c in cfg.centers) < min_dist:
            continue
        out.append(np.array([p.x, p.y, p.z, rng.uniform(-1.0, 1.0)]))
    return out


@dataclass(frozen=True)
class OracleReport:
    config: dict
    samples: int
    step: float
    max_ricci_rel: float
    max_selfduality: float
    max_bianchi: float
    seed: int

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "samples": self.samples,
            "step": self.step,
            "max_ricci_rel": self.max_ricci_rel,
            "max_selfduality": self.max_selfduality,
            "max_bianchi": self.max_bianchi,
            "seed": self.seed,
        }


def compare_with_pipeline(cfg: Configuration, samples: int = 20, step: float = 1e-3, seed: int = 0) -> OracleReport:
    """Maximum discrepancies between the closed form and the finite-difference oracle."""
    m = build_chart_metric(cfg)
    tp = theta_potential(cfg)
    worst = 0.0
    sd = 0.0
    bianchi = 0.0
    for q in sample_chart_points(cfg, samples, seed):
        c = fd_curvature(m, q, step)
        ref = pipeline_ricci_chart(cfg, q, tp)
        worst = max(worst, float(np.linalg.norm(c.ricci - ref) / np.linalg.norm(ref)))
        sd = max(sd, float(c.weyl_minus / (c.weyl_plus + c.weyl_minus + np.finfo(float).eps)))
        bianchi = max(bianchi, c.bianchi_residual)
    return OracleReport(cfg.to_json(), samples, step, worst, sd, bianchi, seed)
