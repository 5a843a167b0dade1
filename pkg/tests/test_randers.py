"""Radial Randers data: Christoffel symbols, covariant derivative of beta,
closed-form densities and the direct isotropy-condition check."""

import numpy as np
import pytest

from _support import fd_christoffel, fd_covariant_b, random_randers_texts, random_xy
from conftest import FUNK_RANDERS, PARALLEL_HT, RANDERS111, interior_grid, make_randers
from finslerlab.errors import DomainError
from finslerlab.expr import ScalarFunction
from finslerlab.randers import (
    christoffel_coefficients,
    covariant_b_coefficients,
    isotropy_condition_check,
    randers_coefficients,
    randers_reduced_s,
    sigma_closed_form,
)
from finslerlab.scurvature import isotropy_profile
from finslerlab.volume import BH


def texts_fns(texts):
    return tuple(ScalarFunction.from_text(t) for t in texts[:3])


def test_christoffel_flat_sphere_case():
    f = g = ScalarFunction.from_text("1")
    a, b, c = christoffel_coefficients(f, g, 1.0)
    assert (a, b, c) == pytest.approx((0.0, 0.5, 0.0))


def test_christoffel_matches_brute_force_levi_civita():
    rng = np.random.default_rng(21)
    corpus = [RANDERS111, FUNK_RANDERS, PARALLEL_HT]
    corpus += [random_randers_texts(rng) + ((0.15, 1.0),) for _ in range(2)]
    for texts in corpus:
        f, g, h = texts_fns(texts)
        lo, hi = texts[3]
        for _ in range(20):
            x, _ = random_xy(rng, 3, (lo + 0.05, min(hi, 1.0) - 0.05))
            r = float(np.linalg.norm(x))
            a_coef, b_coef, c_coef = christoffel_coefficients(f, g, r)
            ref = fd_christoffel(f, g, x)
            n = 3
            eye = np.eye(n)
            ours = (
                a_coef * np.einsum("i,j,k->kij", x, x, x)
                + b_coef * np.einsum("k,ij->kij", x, eye)
                + c_coef * (np.einsum("i,kj->kij", x, eye) + np.einsum("j,ki->kij", x, eye))
            )
            np.testing.assert_allclose(ours, ref, atol=1e-6)


def test_covariant_b_closed_forms():
    # f=g=h=1: u1 = 1/(1+r^2), u2 = 0
    one = ScalarFunction.from_text("1")
    for r in (0.4, 0.9, 1.3):
        u1, u2 = covariant_b_coefficients(one, one, one, r)
        assert u1 == pytest.approx(1.0 / (1.0 + r * r), rel=1e-12)
        assert u2 == pytest.approx(0.0, abs=1e-12)


def test_covariant_b_parallel_profile():
    f, g, h = texts_fns(PARALLEL_HT)
    for r in (0.5, 1.0, 2.5):
        u1, u2 = covariant_b_coefficients(f, g, h, r)
        assert u1 == pytest.approx(0.0, abs=1e-12)
        assert u2 == pytest.approx(0.0, abs=1e-12)


def test_covariant_b_matches_brute_force():
    rng = np.random.default_rng(23)
    for texts in (RANDERS111, FUNK_RANDERS, PARALLEL_HT):
        f, g, h = texts_fns(texts)
        lo, hi = texts[3]
        for _ in range(10):
            x, _ = random_xy(rng, 3, (lo + 0.05, min(hi, 1.0) - 0.05))
            r = float(np.linalg.norm(x))
            u1, u2 = covariant_b_coefficients(f, g, h, r)
            ours = u1 * np.eye(3) + u2 * np.outer(x, x)
            np.testing.assert_allclose(ours, fd_covariant_b(f, g, h, x), atol=1e-6)


def test_coefficient_bundle_linear_algebra():
    for texts in (RANDERS111, FUNK_RANDERS):
        f, g, h = texts_fns(texts)
        for r in (0.3, 0.6, 0.85):
            co = randers_coefficients(f, g, h, 3, r)
            x = np.zeros(3)
            x[0] = r
            a = co.f * np.eye(3) + co.g * np.outer(x, x)
            assert co.det_a == pytest.approx(np.linalg.det(a), rel=1e-12)
            inv = co.inv_diag * np.eye(3) + co.inv_xx * np.outer(x, x)
            np.testing.assert_allclose(inv @ a, np.eye(3), atol=1e-12)
            b = co.h * x
            beta2 = float(b @ inv @ b)
            assert co.beta_norm2 == pytest.approx(beta2, rel=1e-12)
            assert co.rho == pytest.approx(0.5 * np.log(1.0 - beta2), rel=1e-12)


def test_admissibility_guard():
    f = ScalarFunction.from_text("1")
    g = ScalarFunction.from_text("0")
    h = ScalarFunction.from_text("2")  # f + r^2(g - h^2) = 1 - 4 r^2
    with pytest.raises(DomainError):
        covariant_b_coefficients(f, g, h, 0.8)
    # still fine where the margin is positive
    u1, _ = covariant_b_coefficients(f, g, h, 0.3)
    assert np.isfinite(u1)


def test_reduced_s_volume_split():
    # the BH and HT formulas differ exactly by (n+1) rho' s / r
    f, g, h = texts_fns(RANDERS111)
    n, r = 3, 0.7
    s = r * np.linspace(-0.8, 0.8, 9)
    bh = randers_reduced_s(f, g, h, n, r, s, "bh")
    ht = randers_reduced_s(f, g, h, n, r, s, "ht")
    co = randers_coefficients(f, g, h, n, r)
    np.testing.assert_allclose(bh - ht, -(n + 1) * co.rho_d1 * s / r, atol=1e-12)


def test_sigma_closed_form_kinds():
    f, g, h = texts_fns(RANDERS111)
    v_bh = sigma_closed_form(f, g, h, 3, 1.0, "bh")
    v_ht = sigma_closed_form(f, g, h, 3, 1.0, "ht")
    assert v_ht == pytest.approx(np.sqrt(2.0), rel=1e-12)
    assert v_bh < v_ht  # the (1-|beta|^2)^{(n+1)/2} factor is < 1 here
    with pytest.raises(ValueError):
        sigma_closed_form(f, g, h, 3, 1.0, "nope")


def test_isotropy_condition_positive_case():
    one = ScalarFunction.from_text("1")
    for r in (0.3, 0.8, 1.1):
        rep = isotropy_condition_check(one, one, one, r, r * np.linspace(-0.9, 0.9, 15))
        assert rep.passed
        assert rep.c == pytest.approx(1.0 / (2.0 * (1.0 + r * r)), rel=1e-9)


def test_isotropy_condition_negative_case():
    one = ScalarFunction.from_text("1")
    half = ScalarFunction.from_text("0.5")
    rep = isotropy_condition_check(one, one, half, 0.8, 0.8 * np.linspace(-0.9, 0.9, 15))
    assert not rep.passed
    assert rep.residual > 1e-3


def test_condition_check_agrees_with_isotropy_profile(randers_h05):
    # same verdicts through the direct condition and through the S pipeline
    corpus = [(RANDERS111, True), (FUNK_RANDERS, True), (("1", "1", "0.5", (0.1, 1.2)), False)]
    for texts, expect in corpus:
        f, g, h = texts_fns(texts)
        spec = make_randers(texts, 3)
        grid = interior_grid(spec, 5)
        prof = isotropy_profile(spec, BH, grid)
        conds = [
            isotropy_condition_check(f, g, h, float(r), float(r) * np.linspace(-0.9, 0.9, 11))
            for r in grid
        ]
        assert prof.passed == expect
        assert all(c.passed for c in conds) == expect
