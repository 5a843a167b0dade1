"""Randers metrics F = alpha + beta built from radial profile functions.

The Riemannian part is a_ij = f(r) d_ij + g(r) x_i x_j and the 1-form is
b_i = h(r) x_i, so phi(r, s) = sqrt(f + g s^2) + h s.  This module computes
the Levi-Civita data of alpha, the covariant derivative of beta, and the
S-curvature through the closed-form volume densities -- an independent
pipeline cross-checked elsewhere against the quadrature-based one.

Because beta is closed (b_i is a radial gradient), the antisymmetric part
of b_{i;j} vanishes identically; the symmetric part has the rank-two shape
b_{i;j} = u1 d_ij + u2 x_i x_j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .jets import Jet3
from .volume import BusemannHausdorff, HolmesThompson


def _volume_kind(which) -> str:
    if isinstance(which, str):
        kind = which.lower()
        if kind in ("bh", "ht"):
            return kind
        raise ValueError(f"unknown volume kind {which!r}; expected 'bh' or 'ht'")
    if isinstance(which, BusemannHausdorff):
        return "bh"
    if isinstance(which, HolmesThompson):
        return "ht"
    raise ValueError(f"unknown volume kind {which!r}")


def _profile_jets(f, g, h, r: float):
    # Univariate order-3 jets in r of the three profiles plus the seed of r.
    rj = Jet3.seed(float(r), dr=1.0)
    return rj, f.jet(r), g.jet(r), h.jet(r)


def _admissibility(f_v: float, g_v: float, h_v: float, r: float) -> None:
    # f > 0 and f + r^2 (g - h^2) > 0 together give f + r^2 g > 0 and
    # ||beta||_alpha < 1, i.e. a positive-definite alpha dominating beta.
    if f_v <= 0.0:
        raise DomainError(f"profile f = {f_v:.6g} is not positive at r = {r:.6g}")
    if f_v + r * r * (g_v - h_v * h_v) <= 0.0:
        raise DomainError(
            f"f + r^2 (g - h^2) = {f_v + r * r * (g_v - h_v * h_v):.6g} <= 0 "
            f"at r = {r:.6g}: the 1-form is not dominated by the Riemannian part"
        )


@dataclass(frozen=True)
class RandersCoefficients:
    """Pointwise Levi-Civita and 1-form data of a Randers profile at radius r.

    Conventions: Gamma^k_ij = A x_i x_j x_k + B x_k d_ij + C (x_i d_kj + x_j d_ki)
    for the Christoffel symbols of alpha, and b_{i;j} = u1 d_ij + u2 x_i x_j
    for the covariant derivative of beta.  inv_diag and inv_xx describe the
    inverse metric a^ij = inv_diag d_ij + inv_xx x_i x_j.
    """

    r: float
    n: int
    f: float
    f_d1: float
    g: float
    g_d1: float
    h: float
    h_d1: float
    det_a: float
    inv_diag: float
    inv_xx: float
    beta_norm2: float
    rho: float
    rho_d1: float
    u1: float
    u2: float
    christoffel_A: float
    christoffel_B: float
    christoffel_C: float


def christoffel_coefficients(f, g, r: float) -> tuple[float, float, float]:
    """Coefficients (A, B, C) of Gamma^k_ij for a_ij = f d_ij + g x_i x_j."""
    r = float(r)
    fj, gj = f.jet(r), g.jet(r)
    f_v, fp = fj.d(0, 0), fj.d(1, 0)
    g_v, gp = gj.d(0, 0), gj.d(1, 0)
    if f_v <= 0.0 or f_v + r * r * g_v <= 0.0:
        raise DomainError(f"Riemannian part not positive definite at r = {r:.6g}")
    q = f_v + r * r * g_v
    a = (f_v * gp - 2.0 * fp * g_v) / (2.0 * r * f_v * q)
    b = (2.0 * r * g_v - fp) / (2.0 * r * q)
    c = fp / (2.0 * r * f_v)
    return a, b, c


def covariant_b_coefficients(f, g, h, r: float) -> tuple[float, float]:
    """(u1, u2) with b_{i;j} = u1 d_ij + u2 x_i x_j; both vanish iff beta is parallel."""
    r = float(r)
    fj, gj, hj = f.jet(r), g.jet(r), h.jet(r)
    f_v, fp = fj.d(0, 0), fj.d(1, 0)
    g_v, gp = gj.d(0, 0), gj.d(1, 0)
    h_v, hp = hj.d(0, 0), hj.d(1, 0)
    _admissibility(f_v, g_v, h_v, r)
    q = f_v + r * r * g_v
    u1 = 0.5 * h_v * (r * fp + 2.0 * f_v) / q
    u2 = hp / r - 0.5 * h_v * (r * r * gp + 2.0 * fp) / (r * q)
    return u1, u2


def randers_coefficients(f, g, h, n: int, r: float) -> RandersCoefficients:
    """Bundle every pointwise quantity the S-curvature formulas consume."""
    r = float(r)
    if not isinstance(n, int) or n < 2:
        raise ValueError(f"dimension n must be an integer >= 2, got {n!r}")
    rj, fj, gj, hj = _profile_jets(f, g, h, r)
    f_v, fp = fj.d(0, 0), fj.d(1, 0)
    g_v, gp = gj.d(0, 0), gj.d(1, 0)
    h_v, hp = hj.d(0, 0), hj.d(1, 0)
    _admissibility(f_v, g_v, h_v, r)
    q = f_v + r * r * g_v
    det_a = q * f_v ** (n - 1)
    inv_diag = 1.0 / f_v
    inv_xx = -g_v / (f_v * q)
    # ||beta||^2 and rho as jets in r; rho' comes out exactly, no differencing.
    b2_jet = (rj * rj * hj * hj) / (fj + rj * rj * gj)
    one_minus = 1.0 - b2_jet
    if one_minus.d(0, 0) <= 0.0:
        raise DomainError(f"||beta||^2 = {b2_jet.d(0, 0):.6g} >= 1 at r = {r:.6g}")
    rho_jet = one_minus.log() * 0.5
    a, b, c = christoffel_coefficients(f, g, r)
    u1 = 0.5 * h_v * (r * fp + 2.0 * f_v) / q
    u2 = hp / r - 0.5 * h_v * (r * r * gp + 2.0 * fp) / (r * q)
    return RandersCoefficients(
        r=r,
        n=n,
        f=f_v,
        f_d1=fp,
        g=g_v,
        g_d1=gp,
        h=h_v,
        h_d1=hp,
        det_a=det_a,
        inv_diag=inv_diag,
        inv_xx=inv_xx,
        beta_norm2=b2_jet.d(0, 0),
        rho=rho_jet.d(0, 0),
        rho_d1=rho_jet.d(1, 0),
        u1=u1,
        u2=u2,
        christoffel_A=a,
        christoffel_B=b,
        christoffel_C=c,
    )


def randers_reduced_s(f, g, h, n: int, r: float, s, which_volume="bh"):
    """S/u at (r, s) from the closed forms, for either volume density.

    With beta closed, the antisymmetric contributions vanish and
    S/u = (n+1) [ (u1 + u2 s^2) / (2 phi) - rho' s / r ], the rho' term
    present only for the Busemann-Hausdorff density (whose log differs from
    the Holmes-Thompson one by exactly (n+1) rho, so the whole correction
    carries the (n+1) factor).
    """
    kind = _volume_kind(which_volume)
    coef = randers_coefficients(f, g, h, n, float(r))
    s_arr = np.asarray(s, dtype=float)
    phi = np.sqrt(coef.f + coef.g * s_arr * s_arr) + coef.h * s_arr
    if np.any(phi <= 0.0):
        raise DomainError(f"phi <= 0 at r = {r:.6g}: inadmissible (r, s) pair")
    out = (n + 1) * (coef.u1 + coef.u2 * s_arr * s_arr) / (2.0 * phi)
    if kind == "bh":
        out = out - (n + 1) * coef.rho_d1 * s_arr / coef.r
    return out if out.shape else float(out)


def sigma_closed_form(f, g, h, n: int, r: float, which_volume="bh") -> float:
    """Closed-form volume density: sqrt(det a), times (1-||beta||^2)^{(n+1)/2} for BH."""
    kind = _volume_kind(which_volume)
    coef = randers_coefficients(f, g, h, n, float(r))
    out = np.sqrt(coef.det_a)
    if kind == "bh":
        out = out * (1.0 - coef.beta_norm2) ** ((n + 1) / 2.0)
    return float(out)


@dataclass(frozen=True)
class IsotropyConditionReport:
    """Least-squares verdict on u1 + u2 s^2 = 2c (f + (g - h^2) s^2) for scalar c."""

    r: float
    c: float
    residual: float
    tolerance: float
    passed: bool


def isotropy_condition_check(
    f, g, h, r: float, s_grid, tolerance: float | None = None
) -> IsotropyConditionReport:
    """Fit the single scalar c in the pointwise isotropy identity at radius r.

    The S-curvature is isotropic under the Busemann-Hausdorff density exactly
    when u1 + u2 s^2 is proportional to f + (g - h^2) s^2 with the same scalar
    2c at every s; the report carries the best c and the max deviation.
    """
    r = float(r)
    s_arr = np.asarray(s_grid, dtype=float)
    if s_arr.size < 3:
        raise ValueError("need at least 3 s points for the isotropy condition fit")
    coef = randers_coefficients(f, g, h, 2, r)
    lhs = coef.u1 + coef.u2 * s_arr * s_arr
    basis = coef.f + (coef.g - coef.h * coef.h) * s_arr * s_arr
    denom = 2.0 * float(np.sum(basis * basis))
    c = float(np.sum(lhs * basis)) / denom
    residual = float(np.max(np.abs(lhs - 2.0 * c * basis)))
    if tolerance is None:
        tolerance = 1e-8 * (1.0 + float(np.max(np.abs(lhs))))
    return IsotropyConditionReport(
        r=r, c=c, residual=residual, tolerance=float(tolerance), passed=residual <= tolerance
    )
