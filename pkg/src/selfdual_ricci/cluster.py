"""Three-center machinery: the orbifold model and the near-cluster estimates.

Orbifold model
    ``n`` coincident centers, ``V = 1 + n G(r)``, ``f = -r``. The Ricci
    tensor is ``zeta [dr^2 + (V^{-1} theta)^2] + eta (h - dr^2)`` in the
    adapted frame.

Near-cluster model
    For three geodesically collinear centers and ``f = -(r1 + r2 + r3)/3``,
    ``6 V Ric`` is dominated, close to the centers, by a form ``R-hat`` whose
    components in a frame with ``e1 || sum_j dr_j`` depend only on the radii
    and the angles ``phi_j`` of ``dr_j = cos(phi_j) e1 + sin(phi_j) e2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .ansatz import Configuration, Gauge, fields
from .curvature import eig_sym4, orthonormal_rescale, ricci_frame
from .hyperbolic import HPoint, dist, dr_covector, sphere_point, star_wedge

CONSTRAINT_TOL = 1e-10


# ---------------------------------------------------------------------------
# orbifold limit


def _cm1(r: float) -> float:
    # coth r - 1, stable for large r
    return 2.0 / math.expm1(2.0 * r)


def orbifold_ricci(n: int, r: float):
    """``(zeta, eta)``: adapted-frame Ricci eigenvalues of the orbifold model."""
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n}")
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    d = _cm1(r)
    c = d + 1.0
    pre = d / (2.0 + n * d)
    zeta = pre * (4.0 + 3.0 * n * c - n)
    # eta = pre (8 + 3nc - 5n), written as zeta minus a non-negative gap so zeta >= eta survives rounding
    return zeta, zeta - pre * 4.0 * (n - 1)


def orbifold_ricci_prime(n: int, r: float):
    """Same eigenvalues in a g-orthonormal frame (times ``e^{2r}/V``)."""
    zeta, eta = orbifold_ricci(n, r)
    d = _cm1(r)
    # e^{2r} / V written without overflow-prone cancellation
    factor = math.exp(2.0 * r) / (1.0 + 0.5 * n * d)
    return zeta * factor, eta * factor


@dataclass(frozen=True)
class OrbifoldVerdict:
    n: int
    positive_everywhere: bool  # eta > 0 at every finite r
    boundary_eta: float  # g-normalised eta as r -> infinity
    boundary_zeta: float
    limit_eta_over_zeta: float
    min_eta_over_zeta: float  # over the scanned grid
    witness_r: Optional[float]
    verdict: str  # "positive" | "nonnegative" | "negative"


def orbifold_positivity(n: int, r_grid: Optional[Sequence[float]] = None) -> OrbifoldVerdict:
    """Sign analysis of the orbifold Ricci tensor.

    ``eta`` has the sign of ``(8 - 2n) + 3n (coth r - 1)``, increasing as
    ``r`` decreases, so its infimum over ``r > 0`` is the boundary value
    ``8 - 2n``. The grid scan is an independent check of that argument.
    """
    if r_grid is None:
        r_grid = np.geomspace(1e-3, 18.0, 4000)
    ratios = []
    scan_positive = True
    witness = None
    for r in r_grid:
        zeta, eta = orbifold_ricci(n, float(r))
        ratios.append(eta / zeta)
        if not eta > 0:
            scan_positive = False
            if witness is None:
                witness = float(r)
    boundary_eta, boundary_zeta = 8.0 - 2.0 * n, 4.0 + 2.0 * n
    symbolic_positive = boundary_eta >= 0
    if not symbolic_positive and witness is None:
        # zero of eta at coth r = (5n - 8)/(3n); anything farther out is negative
        witness = math.atanh(3.0 * n / (5.0 * n - 8.0)) + 1.0
    positive = scan_positive and symbolic_positive
    if positive and boundary_eta > 0:
        verdict = "positive"
    elif positive:
        verdict = "nonnegative"
    else:
        verdict = "negative"
    return OrbifoldVerdict(
        n=int(n),
        positive_everywhere=positive,
        boundary_eta=boundary_eta,
        boundary_zeta=boundary_zeta,
        limit_eta_over_zeta=boundary_eta / boundary_zeta,
        min_eta_over_zeta=float(min(ratios)),
        witness_r=witness,
        verdict=verdict,
    )


# ---------------------------------------------------------------------------
# near-cluster components


@dataclass(frozen=True)
class ClusterFrameData:
    r: tuple
    phi: tuple
    kappa: float = field(init=False)

    def __post_init__(self):
        r = tuple(float(x) for x in self.r)
        phi = tuple(float(x) for x in self.phi)
        if len(r) != 3 or len(phi) != 3:
            raise ValueError("cluster data needs three radii and three angles")
        if min(r) <= 0:
            raise ValueError("radii must be positive")
        if abs(sum(math.sin(x) for x in phi)) > CONSTRAINT_TOL:
            raise ValueError("angles violate sum_j sin(phi_j) = 0")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "kappa", sum(math.cos(x) for x in phi))


def realize_cluster_frame(p, centers: Sequence[HPoint], tol: float = 1e-12):
    """Cluster frame data at ``p`` and the frame rows ``e1, e2, e3``.

    ``e1`` is along ``sum_j dr_j``; ``e2`` completes the plane of the ``dr_j``.
    """
    p = HPoint.of(p)
    drs = np.array([dr_covector(p, c) for c in centers])
    total = drs.sum(axis=0)
    nt = np.linalg.norm(total)
    if nt < tol:
        raise ValueError(f"sum of dr_j vanishes at {tuple(p)}")
    e1 = total / nt
    perp = drs - np.outer(drs @ e1, e1)
    k = int(np.argmax(np.linalg.norm(perp, axis=1)))
    if np.linalg.norm(perp[k]) > 1e-9:
        e2 = perp[k] / np.linalg.norm(perp[k])
    else:
        trial = np.eye(3)[int(np.argmin(np.abs(e1)))]
        e2 = trial - (trial @ e1) * e1
        e2 /= np.linalg.norm(e2)
    frame = np.array([e1, e2, np.cross(e1, e2)])
    phi = np.arctan2(drs @ e2, drs @ e1)
    radii = [dist(p, c) for c in centers]
    return ClusterFrameData(tuple(radii), tuple(phi)), frame


def rhat(data: ClusterFrameData) -> np.ndarray:
    """Component table of ``R-hat`` in the cluster frame."""
    r = np.array(data.r)
    phi = np.array(data.phi)
    k = data.kappa
    c, s = np.cos(phi), np.sin(phi)
    w = 1.0 / r**2
    R = np.zeros((4, 4))
    R[0, 0] = (w * (2 + k * c + 2 * s * s)).sum()
    R[1, 1] = (w * (2 - k * c + 2 * c * c)).sum()
    R[0, 1] = (w * (k - 2 * c) * s).sum()
    R[2, 2] = (w * (4 - k * c)).sum()
    R[3, 3] = (w * (2 + k * c)).sum()
    R[2, 3] = (w * k * s).sum()
    for j, l in combinations(range(len(r)), 2):
        u = 1.0 / (r[j] * r[l])
        R[0, 0] += 2 * u * (2 + s[j] ** 2 + s[l] ** 2)
        R[1, 1] += 2 * u * (2 + c[j] ** 2 + c[l] ** 2)
        R[0, 1] -= 2 * u * (c[j] * s[j] + c[l] * s[l])
        R[2, 2] += 8 * u
        R[3, 3] += 4 * u
    R[1, 0] = R[0, 1]
    R[3, 2] = R[2, 3]
    return R


def rhat_asymptotic(p, centers: Sequence[HPoint]) -> np.ndarray:
    """The leading-order form behind :func:`rhat`, in the fixed adapted frame.

    Built tensorially from ``S = sum 1/r_j``, ``A = sum dr_j / r_j^2`` and
    ``B = sum dr_j`` without choosing a cluster frame.
    """
    p = HPoint.of(p)
    rs = np.array([dist(p, c) for c in centers])
    drs = np.array([dr_covector(p, c) for c in centers])
    S = (1.0 / rs).sum()
    A = (drs / rs[:, None] ** 2).sum(axis=0)
    B = drs.sum(axis=0)
    AB = float(A @ B)
    out = np.zeros((4, 4))
    blk = (2 * S * S - AB) * np.eye(3)
    for rj, d in zip(rs, drs):
        blk += 2 * S / rj * (np.eye(3) - np.outer(d, d))
    blk += np.outer(A, B) + np.outer(B, A)
    out[:3, :3] = blk
    out[3, 3] = 2 * S * S + AB
    cross = -star_wedge(A, B)
    out[:3, 3] = cross
    out[3, :3] = cross
    return out


def bound_functions(phi, theta, form: str = "simplified") -> dict:
    """Lower-bound coefficients of the quadratic forms of ``R-hat``.

    ``phi`` has trailing axis of length 3 (any leading shape); ``theta``
    broadcasts against the leading shape. ``form="definition"`` evaluates the
    defining trigonometric combinations instead of the reduced ones.
    Returns arrays ``a``, ``b`` (per center) and ``a_pairs``, ``b_pairs``
    (pairs ordered (0,1), (0,2), (1,2)).
    """
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)[..., None]
    if np.abs(np.sin(phi).sum(axis=-1)).max() > CONSTRAINT_TOL:
        raise ValueError("angles violate sum_j sin(phi_j) = 0")
    pairs = ((0, 1), (0, 2), (1, 2))
    if form == "simplified":
        a = []
        b = []
        for j in range(3):
            others = [k for k in range(3) if k != j]
            a.append(3 + sum(np.cos(phi[..., j] + phi[..., k] - 2 * theta[..., 0]) for k in others))
            b.append(3 - sum(np.cos(phi[..., j] - phi[..., k] + 2 * theta[..., 0]) for k in others))
        a = np.stack(a, axis=-1)
        b = np.stack(b, axis=-1)
        t2 = 2 * theta[..., 0]
        a_pairs = np.stack(
            [6 - np.cos(2 * phi[..., j] - t2) - np.cos(2 * phi[..., k] - t2) for j, k in pairs], axis=-1
        )
    elif form == "definition":
        kappa = np.cos(phi).sum(axis=-1, keepdims=True)
        ct, st = np.cos(theta), np.sin(theta)
        c, s = np.cos(phi), np.sin(phi)
        a = (
            ct**2 * (2 + kappa * c + 2 * s**2)
            + st**2 * (2 - kappa * c + 2 * c**2)
            + 2 * ct * st * (kappa - 2 * c) * s
        )
        b = ct**2 * (4 - kappa * c) + 2 * ct * st * kappa * s + st**2 * (2 + kappa * c)
        a_pairs = np.stack(
            [
                2 * ct[..., 0] ** 2 * (2 + s[..., j] ** 2 + s[..., k] ** 2)
                + 2 * st[..., 0] ** 2 * (2 + c[..., j] ** 2 + c[..., k] ** 2)
                - 4 * st[..., 0] * ct[..., 0] * (c[..., j] * s[..., j] + c[..., k] * s[..., k])
                for j, k in pairs
            ],
            axis=-1,
        )
    else:
        raise ValueError(f"unknown form {form!r}")
    t = theta[..., 0]
    b_pairs = np.broadcast_to((8 * np.cos(t) ** 2 + 4 * np.sin(t) ** 2)[..., None], a_pairs.shape)
    return {"a": a, "b": b, "a_pairs": a_pairs, "b_pairs": np.array(b_pairs)}


def admissible_triples(count: int) -> np.ndarray:
    """``count`` angle triples with ``sum sin = 0`` spread over the torus.

    ``phi1, phi2`` run over a square grid; ``phi3`` takes both solutions of
    ``sin(phi3) = -(sin(phi1) + sin(phi2))`` where one exists.
    """
    m = 8
    while True:
        g = np.linspace(-math.pi, math.pi, m, endpoint=False) + math.pi / m
        p1, p2 = np.meshgrid(g, g, indexing="ij")
        s = np.sin(p1) + np.sin(p2)
        ok = np.abs(s) <= 1.0
        p1, p2, s = p1[ok], p2[ok], s[ok]
        t3a = -np.arcsin(s)
        t3b = math.pi + np.arcsin(s)
        trip = np.concatenate(
            [np.stack([p1, p2, t3a], axis=-1), np.stack([p1, p2, t3b], axis=-1)]
        )
        if len(trip) >= count:
            idx = np.linspace(0, len(trip) - 1, count).round().astype(int)
            return trip[idx]
        m *= 2


def bound_grid_minima(n_theta: int = 1000, n_phi: int = 1000) -> dict:
    """Minima of the bound functions over a ``theta x triples`` grid."""
    phis = admissible_triples(n_phi)
    thetas = np.linspace(0.0, math.pi, n_theta, endpoint=False)
    out = {"a": np.inf, "b": np.inf, "a_pairs": np.inf, "b_pairs": np.inf}
    for chunk in np.array_split(thetas, max(1, n_theta // 100)):
        vals = bound_functions(phis[None, :, :], chunk[:, None])
        for key in out:
            out[key] = min(out[key], float(vals[key].min()))
    return out


def is_collinear(centers: Sequence[HPoint], tol: float = 1e-9) -> bool:
    """Whether the centers lie on one geodesic (triangle equality for every triple)."""
    centers = [HPoint.of(c) for c in centers]
    for a, b, c in combinations(centers, 3):
        d = sorted([dist(a, b), dist(b, c), dist(a, c)])
        if d[2] - d[0] - d[1] > tol * (1.0 + d[2]) or d[0] + d[1] - d[2] > tol * (1.0 + d[2]):
            return False
    return True


@dataclass(frozen=True)
class ClusterCertificate:
    config: dict
    epsilon: float
    samples: int
    min_eig_margin: float  # min over samples of (min eig R-hat) / (sum 1/r_j)^2 - 1
    min_v2_margin: float  # min over samples of (min eig R-hat) / V^2 - 1
    pipeline_min_ricci: float  # min eigenvalue of the g-orthonormal Ricci matrix
    discrepancy_constant: float  # max |6 V Ric - R-hat| / V, adapted frame
    seed: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "epsilon": self.epsilon,
            "samples": self.samples,
            "min_eig_margin": self.min_eig_margin,
            "min_v2_margin": self.min_v2_margin,
            "pipeline_min_ricci": self.pipeline_min_ricci,
            "discrepancy_constant": self.discrepancy_constant,
            "seed": self.seed,
            "passed": self.passed,
        }


def ball_samples(centers: Sequence[HPoint], epsilon: float, samples: int, core: float = 1e-3, seed: int = 0):
    """Points in the geodesic ``epsilon``-balls, radius log-uniform above ``core * epsilon``."""
    rng = np.random.default_rng(seed)
    which = np.arange(samples) % len(centers)
    radius = epsilon * np.exp(rng.uniform(math.log(core), 0.0, samples))
    polar = np.arccos(rng.uniform(-1.0, 1.0, samples))
    azimuth = rng.uniform(0.0, 2.0 * math.pi, samples)
    return [sphere_point(centers[j], rho, a, b) for j, rho, a, b in zip(which, radius, polar, azimuth)]


def cluster_certificate(
    cfg: Configuration, epsilon: float, samples: int = 10_000, seed: int = 0, core: float = 1e-3
) -> ClusterCertificate:
    """Sampled check that ``R-hat`` dominates both ``(sum 1/r_j)^2`` and ``V^2``.

    Also evaluates the full curvature pipeline (mean-distance gauge) at the
    same points.
    """
    if cfg.n != 3:
        raise ValueError("the cluster certificate needs exactly three centers")
    if not is_collinear(cfg.centers):
        raise ValueError("centers are not geodesically collinear")
    if not 0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 1/2)")
    work = cfg.with_gauge(Gauge.mean_distance())
    min_margin = np.inf
    min_v2 = np.inf
    min_ric = np.inf
    disc = 0.0
    points = ball_samples(cfg.centers, epsilon, samples, core, seed)
    for p in points:
        data, frame = realize_cluster_frame(p, cfg.centers)
        R = rhat(data)
        lo = float(eig_sym4(R)[0])
        S2 = sum(1.0 / r for r in data.r) ** 2
        pd, gd = fields(work, p)
        min_margin = min(min_margin, lo / S2 - 1.0)
        min_v2 = min(min_v2, lo / pd.V**2 - 1.0)
        ric = ricci_frame(pd, gd)
        min_ric = min(min_ric, float(eig_sym4(orthonormal_rescale(ric, pd, gd))[0]))
        disc = max(disc, float(np.abs(6.0 * pd.V * ric - rhat_asymptotic(p, cfg.centers)).max()) / pd.V)
    passed = min_margin > 0 and min_v2 > 0 and min_ric > 0
    return ClusterCertificate(
        config=cfg.to_json(),
        epsilon=float(epsilon),
        samples=int(samples),
        min_eig_margin=float(min_margin),
        min_v2_margin=float(min_v2),
        pipeline_min_ricci=float(min_ric),
        discrepancy_constant=float(disc),
        seed=int(seed),
        passed=bool(passed),
    )
