import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfdual_ricci.ansatz import Configuration, Gauge, GaugeData, PotentialData, collinear_config, fields
from selfdual_ricci.cluster import (
    ClusterFrameData,
    admissible_triples,
    bound_functions,
    bound_grid_minima,
    cluster_certificate,
    is_collinear,
    orbifold_positivity,
    orbifold_ricci,
    orbifold_ricci_prime,
    realize_cluster_frame,
    rhat,
    rhat_asymptotic,
)
from selfdual_ricci.curvature import eig_sym4, ricci_frame, ricci_prime
from selfdual_ricci.hyperbolic import HPoint, coth, dgreen, green, sphere_point

R0 = 0.5 * math.log(3.0)  # coth R0 = 2
TRIPLE = (0.0, 2 * math.pi / 3, -2 * math.pi / 3)


def test_orbifold_examples():
    assert orbifold_ricci(3, R0) == pytest.approx((3.8, 2.2), abs=1e-13)
    assert orbifold_ricci(1, R0) == pytest.approx((3.0, 3.0), abs=1e-13)
    zeta, eta = orbifold_ricci(5, 3.0)
    assert eta < 0
    # sign factor 8 + 3n coth r - 5n, roughly -1.93
    assert 8 + 15 * coth(3.0) - 25 == pytest.approx(-1.93, abs=0.01)
    with pytest.raises(ValueError):
        orbifold_ricci(0, 1.0)
    with pytest.raises(ValueError):
        orbifold_ricci(2, 0.0)


def test_zeta_dominates_eta():
    for n in range(1, 12):
        for r in np.geomspace(1e-3, 30, 300):
            zeta, eta = orbifold_ricci(n, r)
            assert zeta >= eta - 1e-15 * abs(zeta)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 7])
def test_orbifold_matches_general_ricci(n):
    # V = 1 + n G(r), f = -r around one point: the general formula in the frame with dr = e3
    for r in (0.05, 0.4, 1.0, 3.0):
        e3 = np.array([0.0, 0.0, 1.0])
        pd = PotentialData(1 + n * green(r), n * dgreen(r) * e3)
        Ddf = -coth(r) * np.diag([1.0, 1.0, 0.0])
        gd = GaugeData(-r, -e3, Ddf, float(np.trace(Ddf)))
        zeta, eta = orbifold_ricci(n, r)
        np.testing.assert_allclose(ricci_frame(pd, gd), np.diag([eta, eta, zeta, zeta]), atol=1e-12 * (1 + zeta))
        zp, ep = orbifold_ricci_prime(n, r)
        scale = math.exp(2 * r) / pd.V
        assert (zp, ep) == pytest.approx((zeta * scale, eta * scale), rel=1e-12)


def test_single_center_collapse(rng):
    cfg = Configuration(((0, 0, 1),), Gauge.single_distance(0))
    for _ in range(10):
        r = float(np.exp(rng.uniform(-3, 1.5)))
        p = sphere_point(cfg.centers[0], r, rng.uniform(0, math.pi), rng.uniform(0, 6))
        zeta, eta = orbifold_ricci(1, r)
        pd, gd = fields(cfg, p)
        np.testing.assert_allclose(ricci_frame(pd, gd), zeta * np.eye(4), atol=1e-10)
        assert zeta == pytest.approx(eta, abs=1e-12)
        assert orbifold_ricci_prime(1, r) == pytest.approx((6, 6), abs=1e-10)
        np.testing.assert_allclose(ricci_prime(cfg, p)[0], 6 * np.eye(4), atol=1e-10)


def test_orbifold_verdicts():
    for n in (1, 2, 3):
        v = orbifold_positivity(n)
        assert v.positive_everywhere and v.verdict == "positive"
        assert v.limit_eta_over_zeta > 0
    v4 = orbifold_positivity(4)
    assert v4.positive_everywhere
    assert v4.verdict == "nonnegative"
    assert v4.limit_eta_over_zeta == 0
    assert v4.min_eta_over_zeta > 0
    assert orbifold_ricci(4, 25.0)[1] / orbifold_ricci(4, 25.0)[0] < 1e-9
    v5 = orbifold_positivity(5)
    assert not v5.positive_everywhere and v5.verdict == "negative"
    assert v5.witness_r is not None and orbifold_ricci(5, v5.witness_r)[1] < 0
    for n in (6, 9):
        assert orbifold_positivity(n).verdict == "negative"


def test_rhat_examples():
    data = ClusterFrameData((0.1, 0.1, 0.1), TRIPLE)
    assert data.kappa == pytest.approx(0, abs=1e-15)
    R = rhat(data)
    assert R[2, 3] == pytest.approx(0, abs=1e-10)
    assert R[3, 3] == pytest.approx(1800, rel=1e-12)
    data = ClusterFrameData((0.1, 0.2, 0.3), (0, 0, 0))
    assert data.kappa == 3
    R = rhat(data)
    assert R[0, 1] == 0 and R[2, 3] == 0
    np.testing.assert_array_equal(R, R.T)
    zero = R.copy()
    for i, j in [(0, 0), (1, 1), (0, 1), (1, 0), (2, 2), (3, 3), (2, 3), (3, 2)]:
        zero[i, j] = 0
    np.testing.assert_array_equal(zero, 0)


def test_rhat_rejects_constraint_violation():
    with pytest.raises(ValueError):
        ClusterFrameData((0.1, 0.1, 0.1), (0.3, 0.3, 0.3))
    with pytest.raises(ValueError):
        ClusterFrameData((0.1, -0.1, 0.1), (0, 0, 0))
    with pytest.raises(ValueError):
        bound_functions((0.3, 0.3, 0.3), 0.0)


def _random_cluster_data(rng):
    phi = admissible_triples(5000)[rng.integers(5000)]
    r = np.exp(rng.uniform(math.log(1e-3), math.log(0.2), 3))
    return ClusterFrameData(tuple(r), tuple(phi))


def test_rhat_eigen_bound_on_random_data(rng):
    for _ in range(2000):
        data = _random_cluster_data(rng)
        S = sum(1 / r for r in data.r)
        assert eig_sym4(rhat(data))[0] > S * S


def test_bound_function_examples():
    b = bound_functions(TRIPLE, 0.0)
    assert b["a"][0] == pytest.approx(2)
    assert b["b"][0] == pytest.approx(4)
    assert b["a_pairs"][0] == pytest.approx(5.5)
    assert b["b_pairs"][0] == pytest.approx(8)
    np.testing.assert_allclose(bound_functions(TRIPLE, math.pi / 2)["b_pairs"], 4)


def test_bound_forms_agree():
    phis = admissible_triples(3000)
    thetas = np.linspace(0, math.pi, 37)
    a = bound_functions(phis[None], thetas[:, None])
    b = bound_functions(phis[None], thetas[:, None], form="definition")
    for key in a:
        np.testing.assert_allclose(a[key], b[key], atol=1e-12)


def test_admissible_triples():
    t = admissible_triples(1000)
    assert t.shape == (1000, 3)
    assert np.abs(np.sin(t).sum(axis=1)).max() < 1e-12
    assert len(np.unique(t.round(12), axis=0)) == 1000


def test_bound_minima_small_grid():
    m = bound_grid_minima(200, 200)
    assert m["a"] >= 1 - 1e-12 and m["b"] >= 1 - 1e-12
    assert m["a_pairs"] >= 4 - 1e-12 and m["b_pairs"] >= 4 - 1e-12


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, math.pi))
def test_quadratic_form_identity(seed, theta):
    data = _random_cluster_data(np.random.default_rng(seed))
    R = rhat(data)
    r = np.array(data.r)
    c, s = math.cos(theta), math.sin(theta)
    fb = bound_functions(data.phi, theta)
    pairs = [(0, 1), (0, 2), (1, 2)]
    inv_pairs = np.array([1 / (r[j] * r[k]) for j, k in pairs])
    lhs12 = c * c * R[0, 0] + 2 * c * s * R[0, 1] + s * s * R[1, 1]
    rhs12 = (fb["a"] / r**2).sum() + (fb["a_pairs"] * inv_pairs).sum()
    assert lhs12 == pytest.approx(rhs12, rel=1e-10)
    lhs34 = c * c * R[2, 2] + 2 * c * s * R[2, 3] + s * s * R[3, 3]
    rhs34 = (fb["b"] / r**2).sum() + (fb["b_pairs"] * inv_pairs).sum()
    assert lhs34 == pytest.approx(rhs34, rel=1e-10)


def test_realized_frame_and_tensorial_form(rng):
    cfg = collinear_config([0.1, 0.1])
    for _ in range(200):
        j = rng.integers(3)
        p = sphere_point(cfg.centers[j], 0.05 * rng.uniform(0.01, 1), rng.uniform(0, math.pi), rng.uniform(0, 6.28))
        data, frame = realize_cluster_frame(p, cfg.centers)
        assert abs(sum(math.sin(x) for x in data.phi)) < 1e-10
        T = np.eye(4)
        T[:3, :3] = frame
        ref = T @ rhat_asymptotic(p, cfg.centers) @ T.T
        R = rhat(data)
        np.testing.assert_allclose(R, ref, atol=1e-10 * np.abs(R).max())


def test_degenerate_axis_sample():
    # centers at axial positions 0, 0.2, -0.2; p on the axis at 0.01
    c_mid, c_top, c_bot = (HPoint(0, 0, math.exp(t)) for t in (0.0, 0.2, -0.2))
    p = HPoint(0, 0, math.exp(0.01))
    data, _ = realize_cluster_frame(p, (c_mid, c_top, c_bot))
    assert data.r == pytest.approx((0.01, 0.19, 0.21), abs=1e-12)
    assert abs(sum(math.sin(x) for x in data.phi)) < 1e-12
    S = sum(1 / r for r in data.r)
    assert eig_sym4(rhat(data))[0] > S * S


def test_is_collinear():
    assert is_collinear(collinear_config([0.3, 0.5]).centers)
    assert not is_collinear((HPoint(0, 0, 1), HPoint(0, 0, 2), HPoint(1, 0, 1.5)))
    # three points of the unit hemisphere, a geodesic
    assert is_collinear((HPoint(0.8, 0, 0.6), HPoint(0.6, 0, 0.8), HPoint(0, 0, 1)))


def test_cluster_certificate_passes():
    cert = cluster_certificate(collinear_config([0.1, 0.1]), 0.05, samples=1500)
    assert cert.passed
    assert cert.min_eig_margin > 0 and cert.min_v2_margin > 0 and cert.pipeline_min_ricci > 0
    js = cert.to_json()
    assert {"config", "epsilon", "samples", "min_eig_margin", "passed"} <= set(js)


def test_cluster_certificate_rejections():
    cfg = collinear_config([0.1, 0.1])
    with pytest.raises(ValueError):
        cluster_certificate(cfg, 0.5, samples=10)
    with pytest.raises(ValueError):
        cluster_certificate(collinear_config([0.1]), 0.05, samples=10)
    bent = Configuration((HPoint(0, 0, 1), HPoint(0, 0, 1.1), HPoint(0.1, 0, 1.05)), Gauge.mean_distance())
    with pytest.raises(ValueError):
        cluster_certificate(bent, 0.05, samples=10)


def test_near_cluster_discrepancy_shrinks():
    cfg = collinear_config([0.1, 0.1])
    rng = np.random.default_rng(3)

    def worst(radius):
        out = 0.0
        for _ in range(50):
            j = rng.integers(3)
            p = sphere_point(cfg.centers[j], radius, rng.uniform(0.1, 3.0), rng.uniform(0, 6.28))
            pd, gd = fields(cfg, p)
            R = rhat_asymptotic(p, cfg.centers)
            out = max(out, np.abs(6 * pd.V * ricci_frame(pd, gd) - R).max() / np.abs(R).max())
        return out

    coarse, fine = worst(0.03), worst(0.003)
    assert fine < coarse
    assert fine < 0.05
