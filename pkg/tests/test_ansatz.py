import json
import math

import numpy as np
import pytest

from selfdual_ricci.ansatz import (
    Configuration,
    Gauge,
    GaugeConsistencyError,
    collinear_config,
    fields,
    gauge,
    potential,
)
from selfdual_ricci.hyperbolic import HPoint, coth, dist, fd_frame_gradient, fd_frame_hessian, sphere_point

import custom_gauges
from conftest import point_away, random_config

R_HALF_LN3 = 0.5 * math.log(3.0)


def test_empty_potential():
    pd = potential(Configuration(()), HPoint(0.3, -1, 2))
    assert pd.V == 1.0
    np.testing.assert_array_equal(pd.dV, 0.0)


def test_single_center_potential_value():
    c = HPoint(0, 0, 1)
    p = sphere_point(c, R_HALF_LN3, 1.1, 0.4)
    assert potential(Configuration((c,)), p).V == pytest.approx(1.5, abs=1e-14)


def test_two_center_potential_identity(rng):
    cfg = random_config(rng, 2)
    for _ in range(10):
        p = point_away(rng, cfg)
        r1, r2 = (dist(p, c) for c in cfg.centers)
        assert potential(cfg, p).V == pytest.approx(0.5 * (coth(r1) + coth(r2)), rel=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_potential_harmonic_and_differential(rng, n):
    cfg = random_config(rng, n)
    for _ in range(5):
        p = point_away(rng, cfg, min_dist=0.3)
        pd = potential(cfg, p)
        np.testing.assert_allclose(pd.dV, fd_frame_gradient(lambda q: potential(cfg, q).V, p), atol=1e-7)
        hess = fd_frame_hessian(lambda q: potential(cfg, q).V, p)
        assert abs(np.trace(hess)) < 1e-5 * (1 + np.abs(hess).max())
        assert pd.V >= 1.0


def test_pole_rejected():
    cfg = Configuration(((0, 0, 1),), Gauge.zero())
    with pytest.raises(ValueError):
        potential(cfg, HPoint(0, 0, 1))
    with pytest.raises(ValueError):
        potential(cfg, HPoint(0, 0, 1 + 1e-10))
    with pytest.raises(ValueError):
        gauge(cfg.with_gauge(Gauge.mean_distance()), HPoint(0, 0, 1))


def test_zero_gauge():
    gd = gauge(Configuration(((0, 0, 1),)), HPoint(1, 2, 3))
    assert gd.f == 0 and gd.lapf == 0
    np.testing.assert_array_equal(gd.df, 0)
    np.testing.assert_array_equal(gd.Ddf, 0)


def test_log_z_gauge(rng):
    cfg = Configuration((), Gauge.log_z())
    for _ in range(5):
        p = point_away(rng, cfg)
        gd = gauge(cfg, p)
        assert gd.f == pytest.approx(math.log(p.z))
        assert gd.df @ gd.df == pytest.approx(1.0)
        assert gd.lapf == -2.0
        np.testing.assert_allclose(np.linalg.eigvalsh(gd.Ddf), [-1, -1, 0])
        np.testing.assert_allclose(gd.Ddf, fd_frame_hessian(lambda q: math.log(q.z), p), atol=1e-6)


def test_mean_distance_trace_example():
    c1 = HPoint(0, 0, 1)
    p = sphere_point(c1, R_HALF_LN3, 1.0, 0.3)
    c2 = sphere_point(p, R_HALF_LN3, 2.2, 1.7)
    cfg = Configuration((c1, c2), Gauge.mean_distance())
    assert [coth(dist(p, c)) for c in cfg.centers] == pytest.approx([2, 2], abs=1e-12)
    gd = gauge(cfg, p)
    # -(1/2)(2 coth r1 + 2 coth r2) = -(coth r1 + coth r2)
    assert gd.lapf == pytest.approx(-4.0, abs=1e-12)
    assert np.trace(gd.Ddf) == pytest.approx(-4.0, abs=1e-12)


@pytest.mark.parametrize("kind", ["mean_distance", "single_distance"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_gauge_internal_consistency(rng, kind, n):
    g = Gauge.mean_distance() if kind == "mean_distance" else Gauge.single_distance(n - 1)
    cfg = random_config(rng, n, g)
    for _ in range(5):
        p = point_away(rng, cfg, min_dist=0.3)
        gd = gauge(cfg, p)
        assert gd.lapf == pytest.approx(np.trace(gd.Ddf), abs=1e-10)
        np.testing.assert_allclose(gd.df, fd_frame_gradient(lambda q: gauge(cfg, q).f, p), atol=1e-5)
        np.testing.assert_allclose(gd.Ddf, fd_frame_hessian(lambda q: gauge(cfg, q).f, p), atol=1e-5)
        assert np.linalg.norm(gd.df) <= 1 + 1e-12


def test_mean_distance_formula(rng):
    cfg = random_config(rng, 3)
    p = point_away(rng, cfg)
    rs = [dist(p, c) for c in cfg.centers]
    gd = gauge(cfg, p)
    assert gd.f == pytest.approx(-sum(rs) / 3)


def test_permutation_invariance(rng):
    cfg = random_config(rng, 4)
    perm = Configuration(tuple(reversed(cfg.centers)), cfg.gauge)
    for _ in range(5):
        p = point_away(rng, cfg)
        (a, ga), (b, gb) = fields(cfg, p), fields(perm, p)
        assert a.V == pytest.approx(b.V, rel=1e-14)
        np.testing.assert_allclose(a.dV, b.dV, atol=1e-14)
        assert ga.f == pytest.approx(gb.f, rel=1e-14)
        np.testing.assert_allclose(ga.Ddf, gb.Ddf, atol=1e-13)


def test_configuration_validation():
    with pytest.raises(ValueError):
        Configuration(((0, 0, 1), (0, 0, 1)))
    with pytest.raises(ValueError):
        Configuration(((0, 0, 1),), Gauge.single_distance(1))
    with pytest.raises(ValueError):
        Configuration((), Gauge.mean_distance())
    with pytest.raises(ValueError):
        Configuration(((0, 0, -1),))
    with pytest.raises(ValueError):
        Gauge("nonsense")


def test_custom_gauge_accepted_and_used():
    cfg = Configuration(((0, 0, 1),), Gauge.custom(custom_gauges.log_z.f, custom_gauges.log_z.df, custom_gauges.log_z.ddf))
    ref = Configuration(((0, 0, 1),), Gauge.log_z())
    p = HPoint(0.4, 0.1, 0.7)
    a, b = gauge(cfg, p), gauge(ref, p)
    assert (a.f, a.lapf) == pytest.approx((b.f, b.lapf))
    np.testing.assert_allclose(a.Ddf, b.Ddf)


def test_custom_gauge_inconsistent_rejected():
    g = Gauge.custom(custom_gauges.broken.f, custom_gauges.broken.df, custom_gauges.broken.ddf)
    with pytest.raises(GaugeConsistencyError):
        Configuration(((0, 0, 1),), g)
    bad_hess = Gauge.custom(custom_gauges.log_z.f, custom_gauges.log_z.df, lambda p: np.eye(3))
    with pytest.raises(GaugeConsistencyError):
        Configuration((), bad_hess)


@pytest.mark.parametrize(
    "gauge_json",
    ["zero", "mean_distance", "log_z", {"single_distance": 1}, {"custom": "custom_gauges:log_z"}],
)
def test_json_round_trip(gauge_json):
    obj = {"centers": [[0.0, 0.0, 1.0], [0.5, 0.0, 2.0]], "gauge": gauge_json}
    cfg = Configuration.from_json(json.dumps(obj))
    assert cfg.to_json() == obj
    assert Configuration.from_json(cfg.to_json()) == cfg


def test_json_rejects_unknown_gauge():
    with pytest.raises(ValueError):
        Configuration.from_json({"centers": [], "gauge": "bogus"})
    with pytest.raises(ValueError):
        Configuration.from_json({"centers": [], "gauge": {"what": 1}})


def test_collinear_default_gauge():
    assert collinear_config([1.0]).gauge == Gauge.mean_distance()
