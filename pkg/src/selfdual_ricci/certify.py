"""Grid certification sweeps and their reports.

A sweep evaluates the closed-form curvature on geodesic-adapted grids
(log-spaced radii around each center, angular grid on each geodesic
sphere, seeded jitter inside each cell) and records, per requested check,
the worst value and where it occurred.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ansatz import Configuration
from .cluster import cluster_certificate, orbifold_positivity
from .curvature import classify, evaluate, ricci_prime
from .hyperbolic import HPoint, dist, sphere_point
from .two_center import DegenerateFrameError, pipeline_q_in_frame, q_components, two_center_frame

MARGIN = 1e-9
CHECKS = ("positivity", "strong", "ric-operator", "mu-bound", "cluster", "orbifold", "oracle")
CSV_FIELDS = (
    "x", "y", "z", "s", "eig1", "eig2", "eig3", "eig4",
    "positive_ricci", "strongly_positive", "ric_operator_nonneg",
)  # fmt: skip
MAX_LISTED_FAILURES = 20


class SpecError(ValueError):
    """Invalid sweep specification (exit code 2)."""


@dataclass(frozen=True)
class SweepSpec:
    config: Configuration
    rmax: float = 4.0
    eps: float = 1e-3
    grid: int = 12
    checks: tuple = ("positivity",)
    seed: int = 0
    cluster_eps: float = 0.05
    cluster_samples: int = 10_000
    oracle_samples: int = 20
    oracle_step: float = 1e-3

    def __post_init__(self):
        if self.grid < 2:
            raise SpecError("grid count must be at least 2")
        if not 0 < self.eps < self.rmax:
            raise SpecError("need 0 < eps < rmax")
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise SpecError(f"unknown checks {unknown}; choose from {CHECKS}")
        if not self.checks:
            raise SpecError("no checks requested")
        n = self.config.n
        if "mu-bound" in self.checks and n != 2:
            raise SpecError("mu-bound applies to two-center configurations only")
        if "cluster" in self.checks and n != 3:
            raise SpecError("cluster applies to three-center configurations only")
        if n == 0 and "orbifold" in self.checks:
            raise SpecError("orbifold check needs at least one center")
        if "oracle" in self.checks and any(c.x != 0 or c.y != 0 for c in self.config.centers):
            raise SpecError("oracle check needs every center on the z-axis")

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "rmax": self.rmax,
            "eps": self.eps,
            "grid": self.grid,
            "checks": list(self.checks),
            "seed": self.seed,
        }


def sweep_points(cfg: Configuration, rmax: float, eps: float, grid: int, seed: int = 0) -> list:
    """Geodesic-adapted sample points, deterministic for a given seed.

    Points closer than ``eps`` to any center (up to rounding) are dropped. With no centers the
    grid is built around ``(0, 0, 1)``.
    """
    rng = np.random.default_rng(seed)
    hubs = cfg.centers or (HPoint(0.0, 0.0, 1.0),)
    log_r = np.linspace(math.log(eps), math.log(rmax), grid)
    dlog = log_r[1] - log_r[0]
    u_edges = np.linspace(-1.0, 1.0, grid + 1)
    az_edges = np.linspace(0.0, 2.0 * math.pi, grid + 1)
    pts = []
    for hub in hubs:
        for lr in log_r:
            for k in range(grid):
                for m in range(grid):
                    jr, ju, ja = rng.uniform(-0.5, 0.5, 3)
                    rad = math.exp(min(max(lr + jr * dlog, log_r[0]), log_r[-1]))
                    u = u_edges[k] + (0.5 + ju) * (u_edges[k + 1] - u_edges[k])
                    az = az_edges[m] + (0.5 + ja) * (az_edges[m + 1] - az_edges[m])
                    p = sphere_point(hub, rad, math.acos(u), az)
                    # radii are clamped to eps; the slack keeps rounding from dropping them
                    if cfg.centers and min(dist(p, c) for c in cfg.centers) < eps * (1.0 - 1e-9):
                        continue
                    pts.append(p)
    return pts


@dataclass
class CheckResult:
    name: str
    passed: bool = True
    minimum: float = math.inf
    argmin: Optional[list] = None
    failures: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def update(self, value: float, ok: bool, point) -> None:
        if value < self.minimum:
            self.minimum = float(value)
            self.argmin = [float(c) for c in point]
        if not ok:
            self.passed = False
            if len(self.failures) < MAX_LISTED_FAILURES:
                self.failures.append({"point": [float(c) for c in point], "value": float(value)})

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "min": None if math.isinf(self.minimum) else self.minimum,
            "argmin": self.argmin,
            "failures": self.failures,
            **self.detail,
        }


@dataclass(frozen=True)
class SweepReport:
    spec: dict
    points: int
    checks: dict
    passed: bool
    rows: list = field(default_factory=list, compare=False)

    def to_json(self) -> dict:
        return {
            "spec": self.spec,
            "points": self.points,
            "checks": {k: v.to_json() for k, v in sorted(self.checks.items())},
            "passed": self.passed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for rep in self.rows:
            w.writerow(
                [repr(float(c)) for c in rep.point]
                + [repr(float(rep.s))]
                + [repr(float(e)) for e in rep.eigs]
                + [int(rep.positive_ricci), int(rep.strongly_positive), int(rep.ric_operator_nonneg)]
            )
        return buf.getvalue()


def run_sweep(spec: SweepSpec) -> SweepReport:
    cfg = spec.config
    checks = {name: CheckResult(name) for name in spec.checks}
    pointwise = {"positivity", "strong", "ric-operator", "mu-bound"} & set(spec.checks)
    rows = []
    pts = sweep_points(cfg, spec.rmax, spec.eps, spec.grid, spec.seed) if pointwise else []
    if "mu-bound" in checks:
        checks["mu-bound"].detail["closed_form_max_diff"] = 0.0
        checks["mu-bound"].detail["degenerate_points"] = 0
    for p in pts:
        ric, s = ricci_prime(cfg, p)
        rep = classify(ric, s, point=tuple(p))
        rows.append(rep)
        if "positivity" in checks:
            checks["positivity"].update(rep.eigs[0], rep.eigs[0] > 0, p)
        if "strong" in checks:
            gap = rep.s / (2.0 * math.sqrt(3.0)) - rep.ric0_norm
            checks["strong"].update(gap, rep.strongly_positive, p)
        if "ric-operator" in checks:
            v = rep.q_eigs[0] + rep.q_eigs[1]
            checks["ric-operator"].update(v, v >= -MARGIN, p)
        if "mu-bound" in checks:
            c = checks["mu-bound"]
            v = rep.q_eigs[0] + rep.q_eigs[2]
            c.update(v, v >= 1.0 - MARGIN, p)
            try:
                fr = two_center_frame(p, *cfg.centers)
            except DegenerateFrameError:
                c.detail["degenerate_points"] += 1
                continue
            a = pipeline_q_in_frame(cfg, p, fr.frame)
            b = q_components(fr.r1, fr.r2, fr.phi)
            diff = float(np.abs(a - b).max() / (1.0 + np.abs(b).max()))
            c.detail["closed_form_max_diff"] = max(c.detail["closed_form_max_diff"], diff)
            if diff > 1e-10:
                c.update(v, False, p)
    if "cluster" in checks:
        cert = cluster_certificate(cfg, spec.cluster_eps, spec.cluster_samples, seed=spec.seed)
        c = checks["cluster"]
        c.passed = cert.passed
        c.minimum = cert.min_eig_margin
        c.detail.update(cert.to_json())
    if "orbifold" in checks:
        v = orbifold_positivity(cfg.n)
        c = checks["orbifold"]
        c.passed = v.verdict == "positive"
        c.minimum = v.min_eta_over_zeta
        c.detail.update(
            {
                "verdict": v.verdict,
                "witness_r": v.witness_r,
                "limit_eta_over_zeta": v.limit_eta_over_zeta,
                "boundary_eta": v.boundary_eta,
            }
        )
    if "oracle" in checks:
        from .oracle import compare_with_pipeline

        rep = compare_with_pipeline(cfg, spec.oracle_samples, spec.oracle_step, seed=spec.seed)
        c = checks["oracle"]
        c.passed = rep.max_ricci_rel < 1e-3 and rep.max_selfduality < 1e-3
        c.minimum = -rep.max_ricci_rel
        c.detail.update(rep.to_json())
    passed = all(c.passed for c in checks.values())
    return SweepReport(spec.to_json(), len(pts), checks, passed, rows)


def evaluate_point(cfg: Configuration, point) -> dict:
    return evaluate(cfg, point).to_json()
