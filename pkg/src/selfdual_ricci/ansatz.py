"""Harmonic potential and conformal gauge of the hyperbolic ansatz.

A :class:`Configuration` is a finite set of centers in hyperbolic 3-space
together with a :class:`Gauge`. It determines

* the potential ``V = 1 + sum_j G(r_j)`` and its differential, and
* the conformal factor ``f`` of ``g = e^{2f} (V h + V^{-1} theta^2)`` with
  ``df``, the Hessian ``D df`` and ``lap f = trace(D df)``.

All 1-forms and bilinear forms are frame components in ``{dx/z, dy/z, dz/z}``.
"""

from __future__ import annotations

import importlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .hyperbolic import (
    HPoint,
    collinear_centers,
    dgreen,
    dist,
    dr_covector,
    fd_frame_gradient,
    fd_frame_hessian,
    green,
)

POLE_RADIUS = 1e-8

ZERO = "zero"
MEAN_DISTANCE = "mean_distance"
SINGLE_DISTANCE = "single_distance"
LOG_Z = "log_z"
CUSTOM = "custom"
_KINDS = (ZERO, MEAN_DISTANCE, SINGLE_DISTANCE, LOG_Z, CUSTOM)


class GaugeConsistencyError(ValueError):
    """A custom gauge whose derivatives disagree with its values."""


@dataclass(frozen=True)
class Gauge:
    """Choice of conformal factor ``f``.

    Use the constructors: :meth:`zero`, :meth:`mean_distance`,
    :meth:`single_distance`, :meth:`log_z`, :meth:`custom`.
    """

    kind: str
    index: Optional[int] = None
    f: Optional[Callable[[HPoint], float]] = field(default=None, compare=False)
    df: Optional[Callable[[HPoint], Any]] = field(default=None, compare=False)
    ddf: Optional[Callable[[HPoint], Any]] = field(default=None, compare=False)
    source: Optional[str] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown gauge kind {self.kind!r}")
        if self.kind == SINGLE_DISTANCE and (self.index is None or self.index < 0):
            raise ValueError("single_distance gauge needs a non-negative center index")
        if self.kind == CUSTOM and not all(callable(c) for c in (self.f, self.df, self.ddf)):
            raise ValueError("custom gauge needs callables f, df and ddf")

    @classmethod
    def zero(cls) -> "Gauge":
        return cls(ZERO)

    @classmethod
    def mean_distance(cls) -> "Gauge":
        return cls(MEAN_DISTANCE)

    @classmethod
    def single_distance(cls, index: int = 0) -> "Gauge":
        return cls(SINGLE_DISTANCE, index=int(index))

    @classmethod
    def log_z(cls) -> "Gauge":
        return cls(LOG_Z)

    @classmethod
    def custom(cls, f, df, ddf, source: Optional[str] = None) -> "Gauge":
        """User gauge. ``df`` and ``ddf`` return frame components."""
        return cls(CUSTOM, f=f, df=df, ddf=ddf, source=source)

    def to_json(self):
        if self.kind == SINGLE_DISTANCE:
            return {SINGLE_DISTANCE: self.index}
        if self.kind == CUSTOM:
            if self.source is None:
                raise ValueError("custom gauge built from callables has no import path to serialise")
            return {CUSTOM: self.source}
        return self.kind

    @classmethod
    def from_json(cls, obj) -> "Gauge":
        if isinstance(obj, str):
            if obj in (ZERO, MEAN_DISTANCE, LOG_Z):
                return cls(obj)
            if obj == SINGLE_DISTANCE:
                return cls.single_distance(0)
            raise ValueError(f"unknown gauge {obj!r}")
        if isinstance(obj, dict) and len(obj) == 1:
            ((key, val),) = obj.items()
            if key == SINGLE_DISTANCE:
                return cls.single_distance(int(val))
            if key == CUSTOM:
                return _import_custom(str(val))
        raise ValueError(f"cannot parse gauge {obj!r}")


def _import_custom(path: str) -> Gauge:
    # "package.module:attr", attr exposing f, df, ddf
    mod_name, _, attr = path.partition(":")
    target = importlib.import_module(mod_name)
    if attr:
        for part in attr.split("."):
            target = getattr(target, part)
    return Gauge.custom(target.f, target.df, target.ddf, source=path)


@dataclass(frozen=True)
class PotentialData:
    V: float
    dV: np.ndarray


@dataclass(frozen=True)
class GaugeData:
    f: float
    df: np.ndarray
    Ddf: np.ndarray
    lapf: float


@dataclass(frozen=True)
class Configuration:
    """Ordered centers plus a gauge. Immutable."""

    centers: tuple = ()
    gauge: Gauge = field(default_factory=Gauge.zero)

    def __post_init__(self):
        centers = tuple(HPoint.of(c) for c in self.centers)
        object.__setattr__(self, "centers", centers)
        for i, a in enumerate(centers):
            for b in centers[:i]:
                if dist(a, b) < POLE_RADIUS:
                    raise ValueError(f"coincident centers {tuple(a)} and {tuple(b)}")
        g = self.gauge
        if g.kind == MEAN_DISTANCE and not centers:
            raise ValueError("mean_distance gauge needs at least one center")
        if g.kind == SINGLE_DISTANCE and g.index >= len(centers):
            raise ValueError(f"single_distance index {g.index} out of range for {len(centers)} centers")
        if g.kind == CUSTOM:
            _validate_custom(self)

    @property
    def n(self) -> int:
        return len(self.centers)

    def with_gauge(self, gauge: Gauge) -> "Configuration":
        return Configuration(self.centers, gauge)

    def to_json(self) -> dict:
        return {"centers": [list(c) for c in self.centers], "gauge": self.gauge.to_json()}

    @classmethod
    def from_json(cls, obj) -> "Configuration":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple(obj.get("centers", [])), Gauge.from_json(obj.get("gauge", ZERO)))


def collinear_config(separations: Sequence[float], gauge: Optional[Gauge] = None) -> Configuration:
    """Centers on one vertical geodesic with the given consecutive separations."""
    return Configuration(tuple(collinear_centers(separations)), gauge or Gauge.mean_distance())


def _radii(cfg: Configuration, p: HPoint) -> list:
    rs = [dist(p, c) for c in cfg.centers]
    if rs and min(rs) < POLE_RADIUS:
        raise ValueError(f"point {tuple(p)} lies on a center")
    return rs


def potential(cfg: Configuration, p: HPoint) -> PotentialData:
    p = HPoint.of(p)
    rs = _radii(cfg, p)
    V = 1.0
    dV = np.zeros(3)
    for c, r in zip(cfg.centers, rs):
        V += green(r)
        dV += dgreen(r) * dr_covector(p, c)
    return PotentialData(V, dV)


def _distance_gauge(p: HPoint, centers) -> GaugeData:
    n = len(centers)
    f = 0.0
    df = np.zeros(3)
    Ddf = np.zeros((3, 3))
    for c in centers:
        r = dist(p, c)
        if r < POLE_RADIUS:
            raise ValueError(f"point {tuple(p)} lies on a center")
        d = dr_covector(p, c)
        f -= r
        df -= d
        Ddf -= (np.eye(3) - np.outer(d, d)) / math.tanh(r)
    f, df, Ddf = f / n, df / n, Ddf / n
    return GaugeData(f, df, Ddf, float(np.trace(Ddf)))


def gauge(cfg: Configuration, p: HPoint) -> GaugeData:
    p = HPoint.of(p)
    g = cfg.gauge
    if g.kind == ZERO:
        return GaugeData(0.0, np.zeros(3), np.zeros((3, 3)), 0.0)
    if g.kind == LOG_Z:
        return GaugeData(math.log(p.z), np.array([0.0, 0.0, 1.0]), np.diag([-1.0, -1.0, 0.0]), -2.0)
    if g.kind == MEAN_DISTANCE:
        return _distance_gauge(p, cfg.centers)
    if g.kind == SINGLE_DISTANCE:
        return _distance_gauge(p, cfg.centers[g.index : g.index + 1])
    Ddf = np.asarray(g.ddf(p), dtype=float).reshape(3, 3)
    Ddf = 0.5 * (Ddf + Ddf.T)
    return GaugeData(float(g.f(p)), np.asarray(g.df(p), dtype=float).reshape(3), Ddf, float(np.trace(Ddf)))


def fields(cfg: Configuration, p: HPoint):
    """``(potential(cfg, p), gauge(cfg, p))``."""
    return potential(cfg, p), gauge(cfg, p)


def _validate_custom(cfg: Configuration, n_points: int = 8, tol: float = 1e-5, seed: int = 0) -> None:
    g = cfg.gauge
    rng = np.random.default_rng(seed)
    checked = 0
    while checked < n_points:
        p = HPoint(*rng.uniform(-1.0, 1.0, 2), float(np.exp(rng.uniform(-0.7, 0.7))))
        if cfg.centers and min(dist(p, c) for c in cfg.centers) < 0.05:
            continue
        checked += 1
        df = np.asarray(g.df(p), dtype=float).reshape(3)
        ddf = np.asarray(g.ddf(p), dtype=float).reshape(3, 3)
        df_fd = fd_frame_gradient(g.f, p)
        ddf_fd = fd_frame_hessian(g.f, p)
        scale = 1.0 + np.abs(df).max()
        if np.abs(df - df_fd).max() > tol * scale:
            raise GaugeConsistencyError(f"custom df disagrees with finite differences of f at {tuple(p)}")
        scale = 1.0 + np.abs(ddf).max()
        if np.abs(ddf - ddf_fd).max() > 10 * tol * scale:
            raise GaugeConsistencyError(f"custom Ddf disagrees with finite differences of f at {tuple(p)}")
