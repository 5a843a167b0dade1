"""Geodesic-flow oracle: straight lines in the flat case, distortion values
against brute-force tensors, and the S-by-distortion band check."""

import numpy as np
import pytest

from _support import randers_metric_tensor, random_orthogonal, random_xy
from finslerlab.errors import DomainError, DomainExitError
from finslerlab.expr import ScalarFunction
from finslerlab.geometry import general_phi_spec
from finslerlab.oracle import (
    distortion,
    finsler_norm,
    integrate_geodesic,
    s_by_distortion,
)
from finslerlab.scurvature import reduced_s
from finslerlab.volume import BH, HT, CustomDensity, density


def test_finsler_norm_flat(euclid):
    assert finsler_norm(euclid, [0.3, 0.4], [3.0, 4.0]) == pytest.approx(5.0, rel=1e-14)


def test_finsler_norm_rejects_zero_velocity(euclid):
    with pytest.raises(DomainError):
        finsler_norm(euclid, [0.3, 0.4], [0.0, 0.0])


def test_flat_geodesics_are_straight(euclid):
    x0 = np.array([0.3, 0.1])
    y0 = np.array([0.2, 0.5])
    states = integrate_geodesic(euclid, x0, y0, 0.8, steps=32)
    for st in states:
        np.testing.assert_allclose(st.x, x0 + st.t * y0, atol=1e-12)
        np.testing.assert_allclose(st.y, y0, atol=1e-12)


def test_flat_s_vanishes(euclid):
    for vol in (BH, HT):
        val = s_by_distortion(euclid, vol, [0.3, 0.1], [0.2, 0.5])
        assert abs(val) < 1e-9


def test_distortion_with_custom_density():
    spec = general_phi_spec("1", 3, (0.5, 4.0))
    vol = CustomDensity(ScalarFunction.from_text("r^2"))
    tau = distortion(spec, vol, [3.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    assert tau == pytest.approx(-np.log(9.0), rel=1e-12)


def test_funk_oracle_matches_linear_growth(funk2):
    # isotropic with c = 1/2: S = (n + 1) c F = 1.5 F in dimension 2
    rng = np.random.default_rng(11)
    for _ in range(6):
        x, y = random_xy(rng, 2, (0.15, 0.6), s_frac_max=0.8)
        s_val = s_by_distortion(funk2, BH, x, y)
        want = 1.5 * finsler_norm(funk2, x, y)
        assert s_val == pytest.approx(want, abs=1e-5 * (1.0 + abs(want)))


def test_oracle_positive_homogeneity(funk2, randers111):
    rng = np.random.default_rng(12)
    for spec in (funk2, randers111):
        x, y = random_xy(rng, spec.n, (0.2, 0.6), s_frac_max=0.7)
        one = s_by_distortion(spec, BH, x, y)
        two = s_by_distortion(spec, BH, x, 2.0 * y)
        assert abs(two - 2.0 * one) <= 1e-8 * (1.0 + abs(one))


def test_oracle_rotation_invariance(randers111):
    rng = np.random.default_rng(13)
    x, y = random_xy(rng, 3, (0.25, 0.6), s_frac_max=0.7)
    base = s_by_distortion(randers111, HT, x, y)
    for _ in range(3):
        rot = random_orthogonal(rng, 3)
        turned = s_by_distortion(randers111, HT, rot @ x, rot @ y)
        assert abs(turned - base) <= 1e-8 * (1.0 + abs(base))


def test_distortion_against_brute_randers_tensor(randers111):
    f = ScalarFunction.from_text("1")
    rng = np.random.default_rng(14)
    for vol in (BH, HT):
        for _ in range(5):
            x, y = random_xy(rng, 3, (0.2, 0.8), s_frac_max=0.8)
            g_mat = randers_metric_tensor(f, f, f, x, y)
            r = float(np.linalg.norm(x))
            brute = 0.5 * np.log(np.linalg.det(g_mat)) - np.log(
                density(vol, randers111, r)
            )
            assert distortion(randers111, vol, x, y) == pytest.approx(brute, abs=1e-9)


def test_oracle_band_against_reduced_s(funk2, funk_randers):
    rng = np.random.default_rng(15)
    cases = [(funk2, (0.15, 0.6)), (funk_randers, (0.15, 0.6))]
    for spec, r_range in cases:
        for vol in (BH, HT):
            for _ in range(4):
                x, y = random_xy(rng, spec.n, r_range, s_frac_max=0.8)
                u = float(np.linalg.norm(y))
                r = float(np.linalg.norm(x))
                s = float(np.dot(x, y) / u)
                analytic = u * reduced_s(spec, vol, r, s)
                brute = s_by_distortion(spec, vol, x, y)
                assert abs(brute - analytic) <= 1e-4 * (1.0 + abs(analytic))


def test_geodesic_domain_exit(funk2):
    x0 = np.array([0.9, 0.0])
    y0 = np.array([1.0, 0.0])
    with pytest.raises(DomainExitError) as info:
        integrate_geodesic(funk2, x0, y0, 2.0, steps=64)
    assert info.value.t > 0.0


def test_integrator_input_validation(euclid):
    with pytest.raises(ValueError):
        integrate_geodesic(euclid, [0.3, 0.1], [0.2, 0.5], 0.5, steps=8)
    with pytest.raises(ValueError):
        integrate_geodesic(euclid, [0.3, 0.1, 0.0], [0.2, 0.5], 0.5)


def test_backward_integration_consistency(randers111):
    x0 = np.array([0.3, 0.2, 0.1])
    y0 = np.array([0.4, -0.1, 0.3])
    fwd = integrate_geodesic(randers111, x0, y0, 0.4, steps=64)
    xe, ye = fwd[-1].x, fwd[-1].y
    back = integrate_geodesic(randers111, xe, ye, -0.4, steps=64)
    np.testing.assert_allclose(back[-1].x, x0, atol=1e-9)
    np.testing.assert_allclose(back[-1].y, y0, atol=1e-9)
