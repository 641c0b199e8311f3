"""Hyperbolic 3-space in the upper-half-space model.

Points are ``HPoint(x, y, z)`` with ``z > 0`` and metric
``h = (dx^2 + dy^2 + dz^2) / z^2``. Every covector or bilinear form returned
here is expressed in the h-orthonormal coframe ``{dx/z, dy/z, dz/z}`` at the
base point, as a plain numpy array of shape ``(3,)`` or ``(3, 3)``. The
orientation is ``dx ^ dy ^ dz / z^3``, so the Hodge star of a wedge of two
covectors is their cross product.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple, Sequence

import numpy as np


class HPoint(NamedTuple):
    x: float
    y: float
    z: float

    @classmethod
    def of(cls, p) -> "HPoint":
        """Coerce a 3-sequence to a validated point."""
        if isinstance(p, HPoint):
            q = p
        else:
            x, y, z = (float(c) for c in p)
            q = cls(x, y, z)
        if not q.z > 0 or not all(math.isfinite(c) for c in q):
            raise ValueError(f"not a point of the upper half space: {tuple(q)}")
        return q

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


def dist(p: HPoint, q: HPoint) -> float:
    """Hyperbolic distance.

    Uses ``sinh(r/2) = |p - q| / (2 sqrt(z_p z_q))``, which stays accurate for
    nearby points where ``arccosh`` would lose half the digits.
    """
    dx, dy, dz = p.x - q.x, p.y - q.y, p.z - q.z
    e2 = dx * dx + dy * dy + dz * dz
    if e2 == 0.0:
        return 0.0
    return 2.0 * math.asinh(math.sqrt(e2) / (2.0 * math.sqrt(p.z * q.z)))


def dr_covector(p: HPoint, center: HPoint) -> np.ndarray:
    """Unit covector ``d r`` at ``p``, where ``r`` is the distance from ``center``."""
    r = dist(p, center)
    if r == 0.0:
        raise ValueError("dr is undefined at the center itself")
    dx, dy, dz = p.x - center.x, p.y - center.y, p.z - center.z
    e2 = dx * dx + dy * dy + dz * dz
    zc = center.z
    s = math.sinh(r)
    return np.array([dx / zc, dy / zc, dz / zc - e2 / (2.0 * p.z * zc)]) / s


def hess_dist(p: HPoint, center: HPoint) -> np.ndarray:
    """Hessian ``D dr = coth r (h - dr^2)`` of the distance function."""
    r = dist(p, center)
    if r == 0.0:
        raise ValueError("the distance Hessian is undefined at the center")
    d = dr_covector(p, center)
    return (np.eye(3) - np.outer(d, d)) / math.tanh(r)


def star_wedge(a, b) -> np.ndarray:
    """``*(a ^ b)`` for covectors in the same oriented orthonormal frame."""
    return np.cross(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def green(r: float) -> float:
    """Green's function ``(coth r - 1)/2``, normalised so that ``d*dG = -2 pi delta``."""
    if not r > 0:
        raise ValueError(f"Green's function needs r > 0, got {r}")
    return 1.0 / math.expm1(2.0 * r)


def dgreen(r: float) -> float:
    """Radial derivative ``-1 / (2 sinh^2 r)``."""
    if not r > 0:
        raise ValueError(f"Green's function needs r > 0, got {r}")
    s = math.sinh(r)
    return -0.5 / (s * s)


def coth(r: float) -> float:
    return 1.0 / math.tanh(r)


def sphere_point(center: HPoint, radius: float, polar: float, azimuth: float) -> HPoint:
    """Point on the geodesic sphere of given radius about ``center``.

    The sphere is the Euclidean sphere with centre ``(x0, y0, z0 cosh R)`` and
    radius ``z0 sinh R``; ``polar`` is measured from the upward vertical.
    """
    sh, ch = math.sinh(radius), math.cosh(radius)
    sp = math.sin(polar)
    return HPoint(
        center.x + center.z * sh * sp * math.cos(azimuth),
        center.y + center.z * sh * sp * math.sin(azimuth),
        center.z * (ch + sh * math.cos(polar)),
    )


def sphere_flux(
    covector: Callable[[HPoint], np.ndarray],
    center: HPoint,
    radius: float,
    order: int = 64,
) -> float:
    """Integral of ``*w`` over the outward-oriented geodesic sphere.

    ``covector`` returns the frame components of the 1-form ``w``. Product
    Gauss-Legendre rule in the cosine of the hyperbolic polar angle,
    trapezoid in azimuth.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    n_az = 2 * order
    az = 2.0 * math.pi * np.arange(n_az) / n_az
    sh, ch, t = math.sinh(radius), math.cosh(radius), math.tanh(radius)
    R = center.z * sh
    total = 0.0
    # Euclidean cos(polar) u against hyperbolic cos(polar) v; without this
    # the integrand piles up near the bottom of large spheres
    us = (nodes - t) / (1.0 - t * nodes)
    jac = (1.0 - t * t) / (1.0 - t * nodes) ** 2
    for u, wu in zip(us, weights * jac):
        sp = math.sqrt(max(0.0, 1.0 - u * u))
        for phi in az:
            normal = np.array([sp * math.cos(phi), sp * math.sin(phi), u])
            p = HPoint(
                center.x + R * normal[0],
                center.y + R * normal[1],
                center.z * ch + R * normal[2],
            )
            # *_h = (1/z) *_flat on 1-forms; frame components c give
            # coordinate components c / z.
            coord = np.asarray(covector(p)) / p.z
            total += wu * (coord @ normal) / p.z * R * R
    return total * (2.0 * math.pi / n_az)


def fd_frame_gradient(F: Callable[[HPoint], float], p: HPoint, step: float = 1e-5) -> np.ndarray:
    """Frame components of ``dF`` by central differences (step relative to z)."""
    h = step * p.z
    out = np.empty(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        out[i] = (F(HPoint(*(p.as_array() + e))) - F(HPoint(*(p.as_array() - e)))) / (2 * h)
    return p.z * out


def fd_frame_hessian(F: Callable[[HPoint], float], p: HPoint, step: float = 1e-4) -> np.ndarray:
    """Frame components of the h-Hessian ``D dF`` by central differences.

    Coordinate Hessian minus the Christoffel term of the half-space metric,
    then rescaled by ``z^2``.
    """
    h = step * p.z
    x0 = p.as_array()

    def at(v):
        return F(HPoint(*v))

    f0 = at(x0)
    grad = np.empty(3)
    hess = np.empty((3, 3))
    for i in range(3):
        ei = np.zeros(3)
        ei[i] = h
        fp, fm = at(x0 + ei), at(x0 - ei)
        grad[i] = (fp - fm) / (2 * h)
        hess[i, i] = (fp - 2 * f0 + fm) / (h * h)
        for j in range(i):
            ej = np.zeros(3)
            ej[j] = h
            hess[i, j] = hess[j, i] = (
                at(x0 + ei + ej) - at(x0 + ei - ej) - at(x0 - ei + ej) + at(x0 - ei - ej)
            ) / (4 * h * h)
    z = p.z
    # Gamma^c_ab d_c F for h = delta / z^2
    gam = np.eye(3) * grad[2] / z
    gam[:, 2] -= grad / z
    gam[2, :] -= grad / z
    return z * z * (hess - gam)


def collinear_centers(separations: Sequence[float]) -> list[HPoint]:
    """Centers on the z-axis at heights ``exp(cumulative separation)``."""
    out = [HPoint(0.0, 0.0, 1.0)]
    height = 0.0
    for s in separations:
        if not s > 0:
            raise ValueError(f"separations must be positive, got {s}")
        height += s
        out.append(HPoint(0.0, 0.0, math.exp(height)))
    return out
