"""Metric specifications, profile jets, spray coefficients and the metric tensor.

A spherically symmetric Finsler metric on a ball or shell is F = u * phi(r, s)
with r = |x|, u = |y|, s = <x, y>/u (so |s| <= r).  Everything downstream is a
function of the profile phi and its partials, which this module provides as
order-3 jets for three profile kinds:

* ``GeneralPhi``      -- phi given as a closed-form expression in (r, s);
* ``RandersProfile``  -- phi = sqrt(f + g s^2) + h s from radial coefficients
  a_ij = f delta_ij + g x_i x_j and b_i = h x_i;
* ``BerwaldFamilyProfile`` -- phi = chi(w) sqrt(g(r) + J(r) s^2) e^{-I2(r)}
  with w = s^2/(g + J s^2), where g, J, I2 are antiderivatives built from a
  radial coefficient c2 (see :mod:`finslerlab.families`).

Regularity means three pointwise positivity conditions::

    phi > 0,   phi - s phi_s > 0,   phi - s phi_s + (r^2 - s^2) phi_ss > 0

The last quantity is also the denominator of the spray coefficient Q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DomainError, RegularityError
from .expr import ExpressionTree, ScalarFunction, eval_tree, eval_value, parse_expression
from .jets import Jet3, slot, stack
from .quadrature import CumulativeIntegral

#: relative inset used when building s-grids that must avoid |s| = r
S_MARGIN = 1e-6


@dataclass(frozen=True)
class GeneralPhi:
    phi: ExpressionTree


@dataclass(frozen=True)
class RandersProfile:
    """Radial Randers data; f, g, h expose value(r) and jet(r)."""

    f: object
    g: object
    h: object


@dataclass(frozen=True)
class BerwaldFamilyProfile:
    c2: ScalarFunction
    chi: ExpressionTree
    r0: float


Profile = Union[GeneralPhi, RandersProfile, BerwaldFamilyProfile]


@dataclass(frozen=True)
class MetricSpec:
    profile: Profile
    n: int
    r_domain: tuple[float, float]

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension n must be an integer >= 2, got {self.n}")
        rmin, rmax = self.r_domain
        if not (0.0 < rmin < rmax):
            raise ValueError(f"r_domain must satisfy 0 < r_min < r_max, got {self.r_domain}")


def general_phi_spec(phi, n: int, r_domain=(1e-3, 1.0)) -> MetricSpec:
    if isinstance(phi, str):
        phi = parse_expression(phi, {"r", "s"})
    return MetricSpec(GeneralPhi(phi), n, tuple(map(float, r_domain)))


def randers_spec(f, g, h, n: int, r_domain=(1e-3, 1.0)) -> MetricSpec:
    f, g, h = (ScalarFunction.from_text(v) if isinstance(v, str) else v for v in (f, g, h))
    return MetricSpec(RandersProfile(f, g, h), n, tuple(map(float, r_domain)))


def s_fractions(count: int, margin: float = S_MARGIN) -> np.ndarray:
    """Symmetric grid of s/r fractions, endpoints inset from +-1 by margin."""
    if count < 2:
        raise ValueError("need at least two s points")
    return np.linspace(-(1.0 - margin), 1.0 - margin, count)


# -- profile jets ------------------------------------------------------------


def _check_domain(spec: MetricSpec, r, s):
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    rmin, rmax = spec.r_domain
    slack = 1e-12 * (1.0 + rmax)
    if np.any(r < rmin - slack) or np.any(r > rmax + slack):
        bad = float(np.asarray(r).flat[int(np.argmax((r < rmin - slack) | (r > rmax + slack)))])
        raise DomainError(f"radius {bad!r} outside declared domain [{rmin}, {rmax}]")
    if np.any(np.abs(s) > r * (1.0 + 1e-12) + 1e-15):
        mask = np.abs(s) > r * (1.0 + 1e-12) + 1e-15
        i = int(np.argmax(np.broadcast_to(mask, np.broadcast_shapes(r.shape, s.shape))))
        raise DomainError(
            f"|s| > r at point index {i}: the slope variable must satisfy |s| <= |x|"
        )


def _phi_jet_raw(spec: MetricSpec, r, s) -> Jet3:
    """Profile jet with domain checks but no regularity enforcement."""
    _check_domain(spec, r, s)
    p = spec.profile
    if isinstance(p, GeneralPhi):
        return eval_tree(p.phi, {"r": Jet3.seed(r, dr=1.0), "s": Jet3.seed(s, ds=1.0)})
    if isinstance(p, RandersProfile):
        sj = Jet3.seed(s, ds=1.0)
        fj, gj, hj = p.f.jet(r), p.g.jet(r), p.h.jet(r)
        return (fj + gj * sj * sj).sqrt() + hj * sj
    return _family_phi_jet(p, r, s)


def phi_jet_unchecked(spec: MetricSpec, r, s) -> Jet3:
    """Order-3 jet of phi with domain checks but no positivity enforcement.

    Useful for evaluating PDE residuals on degenerate fixtures (odd or
    sign-changing profiles) that a Finsler metric proper would reject.
    """
    return _phi_jet_raw(spec, r, s)


def phi_jet(spec: MetricSpec, r, s) -> Jet3:
    """Order-3 jet of phi at (r, s); raises RegularityError when positivity fails.

    Accepts scalars or broadcastable arrays for r and s.
    """
    jet = _phi_jet_raw(spec, r, s)
    m1, m2, m3 = regularity_margins(jet, r, s)
    for cond, m, label in (
        (1, m1, "phi > 0"),
        (2, m2, "phi - s*phi_s > 0"),
        (3, m3, "phi - s*phi_s + (r^2-s^2)*phi_ss > 0"),
    ):
        if np.any(np.asarray(m) <= 0.0):
            rr, ss, mm = np.broadcast_arrays(np.asarray(r, float), np.asarray(s, float), m)
            i = int(np.argmin(mm))
            raise RegularityError(
                f"regularity condition {cond} ({label}) fails at "
                f"r={float(rr.flat[i])!r}, s={float(ss.flat[i])!r} "
                f"(margin {float(mm.flat[i])!r})",
                point=(float(rr.flat[i]), float(ss.flat[i])),
                condition=cond,
            )
    return jet


def regularity_margins(jet: Jet3, r, s):
    """The three positivity margins from an already computed profile jet."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    m1 = jet.d(0, 0)
    m2 = m1 - s * jet.d(0, 1)
    m3 = m2 + (r * r - s * s) * jet.d(0, 2)
    return m1, m2, m3


# -- Berwald-type family profiles -------------------------------------------


class _FamilyData:
    """Cached antiderivatives for one BerwaldFamilyProfile.

    Values come from cumulative adaptive quadrature anchored at r0; the r-jet
    of each antiderivative combines the cached value with exact derivatives of
    the integrand (fundamental theorem of calculus), so every evaluation is an
    exact family member up to a point-dependent shift of the anchoring
    constants, which only reparameterizes chi's argument.
    """

    def __init__(self, profile: BerwaldFamilyProfile):
        self.profile = profile
        c2tree = profile.c2.tree

        def c2_vals(rho):
            return np.array([eval_value(c2tree, {"r": float(x)}) for x in np.atleast_1d(rho)])

        self.I1 = CumulativeIntegral(
            lambda rho: 2.0 / rho - 4.0 * rho**3 * c2_vals(rho), profile.r0
        )
        self.I2 = CumulativeIntegral(
            lambda rho: 2.0 / rho - 2.0 * rho**3 * c2_vals(rho), profile.r0
        )
        self.J = CumulativeIntegral(
            lambda rho: np.array(
                [
                    4.0 * float(x) * eval_value(c2tree, {"r": float(x)}) * np.exp(self.I1.value(float(x)))
                    for x in np.atleast_1d(rho)
                ]
            ),
            profile.r0,
        )
        self._rjets: dict[float, tuple[Jet3, Jet3, Jet3]] = {}

    def rdata(self, r: float) -> tuple[Jet3, Jet3, Jet3]:
        r = float(r)
        got = self._rjets.get(r)
        if got is not None:
            return got
        rj = Jet3.seed(r, dr=1.0)
        c2j = self.profile.c2.jet(r)
        r3c2 = rj.powi(3) * c2j
        w1 = 2.0 / rj - 4.0 * r3c2
        w3 = 2.0 / rj - 2.0 * r3c2
        g_jet = _antiderivative_jet(self.I1.value(r), w1).exp()
        w2 = 4.0 * rj * c2j * g_jet
        J_jet = _antiderivative_jet(self.J.value(r), w2)
        I2_jet = _antiderivative_jet(self.I2.value(r), w3)
        got = (g_jet, J_jet, I2_jet)
        self._rjets[r] = got
        return got


def _antiderivative_jet(value: float, integrand: Jet3) -> Jet3:
    """Jet of an antiderivative: cached value + integrand derivatives."""
    j = Jet3.seed(value, dr=integrand.d(0, 0))
    c = list(j.c)
    c[slot(2, 0)] = integrand.d(1, 0)
    c[slot(3, 0)] = integrand.d(2, 0)
    return Jet3(c)


_FAMILY_CACHE: dict[BerwaldFamilyProfile, _FamilyData] = {}


def family_data(profile: BerwaldFamilyProfile) -> _FamilyData:
    data = _FAMILY_CACHE.get(profile)
    if data is None:
        data = _FamilyData(profile)
        _FAMILY_CACHE[profile] = data
    return data


def _family_phi_point(profile: BerwaldFamilyProfile, r: float, s) -> Jet3:
    g_jet, J_jet, I2_jet = family_data(profile).rdata(r)
    sj = Jet3.seed(s, ds=1.0)
    radicand = g_jet + J_jet * sj * sj
    if np.any(np.asarray(radicand.value) <= 0.0):
        raise DomainError(
            f"family radical g + J*s^2 is non-positive at r={r!r} (value {radicand.value!r})"
        )
    w_jet = sj * sj / radicand
    chi_jet = eval_tree(profile.chi, {"w": w_jet})
    return chi_jet * radicand.sqrt() * (-I2_jet).exp()


def _family_phi_jet(profile: BerwaldFamilyProfile, r, s) -> Jet3:
    r_arr = np.asarray(r, dtype=float)
    if r_arr.ndim == 0:
        return _family_phi_point(profile, float(r_arr), s)
    s_arr = np.broadcast_to(np.asarray(s, dtype=float), r_arr.shape)
    jets = [
        _family_phi_point(profile, float(ri), float(si))
        for ri, si in zip(r_arr.ravel(), s_arr.ravel())
    ]
    return stack(jets)


# -- spray coefficients ------------------------------------------------------


@dataclass(frozen=True)
class SprayValues:
    """Projective (P) and radial (Q) spray data: G^i = u P y^i + u^2 Q x^i."""

    P: object
    Q: object
    Q_s: object
    denom: object


def spray_values(spec: MetricSpec, r, s) -> SprayValues:
    """P, Q and the exact s-derivative of Q at (r, s).

    Q = (-phi_r + s phi_rs + r phi_ss) / (2 r (phi - s phi_s + (r^2-s^2) phi_ss))
    P = -(s phi + (r^2-s^2) phi_s) Q / phi + (s phi_r + r phi_s) / (2 r phi)

    Q_s comes from differentiating the quotient symbolically with the order-3
    jet components (no finite differences).
    """
    jet = phi_jet(spec, r, s)
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    phi = jet.d(0, 0)
    phi_r = jet.d(1, 0)
    phi_s = jet.d(0, 1)
    phi_rs = jet.d(1, 1)
    phi_ss = jet.d(0, 2)
    phi_rss = jet.d(1, 2)
    phi_sss = jet.d(0, 3)
    rr_ss = r * r - s * s
    num = -phi_r + s * phi_rs + r * phi_ss
    den = phi - s * phi_s + rr_ss * phi_ss
    q = num / (2.0 * r * den)
    num_s = s * phi_rss + r * phi_sss
    den_s = -3.0 * s * phi_ss + rr_ss * phi_sss
    q_s = (num_s * den - num * den_s) / (2.0 * r * den * den)
    p = -(s * phi + rr_ss * phi_s) * q / phi + (s * phi_r + r * phi_s) / (2.0 * r * phi)
    return SprayValues(P=p, Q=q, Q_s=q_s, denom=den)


def metric_determinant(spec: MetricSpec, r, s):
    """det(g_ij) = phi^{n+1} (phi - s phi_s)^{n-2} (phi - s phi_s + (r^2-s^2) phi_ss)."""
    jet = phi_jet(spec, r, s)
    m1, m2, m3 = regularity_margins(jet, r, s)
    n = spec.n
    return m1 ** (n + 1) * m2 ** (n - 2) * m3


def assemble_metric_matrix(spec: MetricSpec, x, y) -> np.ndarray:
    """Fundamental tensor g_ij(x, y) assembled directly from the profile jet.

    Used as the anchor for brute-force determinant and positive-definiteness
    checks; the closed-form determinant above must agree with numpy's.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (spec.n,) or y.shape != (spec.n,):
        raise DomainError(f"x and y must be vectors of length n={spec.n}")
    u = float(np.linalg.norm(y))
    if u < 1e-300:
        raise DomainError("y must be non-zero")
    r = float(np.linalg.norm(x))
    s = float(np.dot(x, y) / u)
    jet = _phi_jet_raw(spec, r, s)
    phi = jet.d(0, 0)
    phi_s = jet.d(0, 1)
    phi_ss = jet.d(0, 2)
    m2 = phi - s * phi_s
    yh = y / u
    a_dd = phi * m2
    a_xx = phi_s * phi_s + phi * phi_ss
    a_yy = s * s * phi * phi_ss - s * m2 * phi_s
    a_xy = m2 * phi_s - s * phi * phi_ss
    eye = np.eye(spec.n)
    return (
        a_dd * eye
        + a_xx * np.outer(x, x)
        + a_yy * np.outer(yh, yh)
        + a_xy * (np.outer(x, yh) + np.outer(yh, x))
    )


# -- regularity scan ---------------------------------------------------------


@dataclass
class RegularityReport:
    r_grid: np.ndarray
    s_fracs: np.ndarray
    margins: np.ndarray        # (r, s, 3), nan where evaluation failed
    ok: np.ndarray             # (r, s, 3) boolean
    point_valid: np.ndarray    # (r, s) boolean: evaluation succeeded
    passed: bool
    worst_margin: float
    worst_point: tuple[float, float] | None
    worst_condition: int | None
    cholesky_points: list = field(default_factory=list)
    cholesky_ok: bool | None = None
    notes: list = field(default_factory=list)


def regularity_scan(spec: MetricSpec, r_count: int = 25, s_count: int = 25) -> RegularityReport:
    """Evaluate the three positivity conditions on an (r, s/r) tensor grid.

    Failures are recorded, never thrown.  A handful of passing points also get
    a Cholesky factorization of the assembled tensor as a report-only
    positive-definiteness spot check.
    """
    r_grid = np.linspace(spec.r_domain[0], spec.r_domain[1], r_count)
    fracs = np.linspace(-1.0, 1.0, s_count)
    margins = np.full((r_count, s_count, 3), np.nan)
    valid = np.zeros((r_count, s_count), dtype=bool)
    notes: list[str] = []
    for i, r in enumerate(r_grid):
        s_row = r * fracs
        try:
            jet = _phi_jet_raw(spec, r, s_row)
            m1, m2, m3 = regularity_margins(jet, r, s_row)
            margins[i, :, 0] = np.broadcast_to(m1, s_row.shape)
            margins[i, :, 1] = np.broadcast_to(m2, s_row.shape)
            margins[i, :, 2] = np.broadcast_to(m3, s_row.shape)
            valid[i, :] = True
        except DomainError:
            for j, s in enumerate(s_row):
                try:
                    jet = _phi_jet_raw(spec, r, float(s))
                    m1, m2, m3 = regularity_margins(jet, r, float(s))
                    margins[i, j] = (m1, m2, m3)
                    valid[i, j] = True
                except DomainError as err:
                    notes.append(f"r={float(r)!r}, s={float(s)!r}: {err}")
    ok = np.where(np.isnan(margins), False, margins > 0.0)
    passed = bool(valid.all() and ok.all())
    worst_margin = np.inf
    worst_point = None
    worst_condition = None
    if np.any(valid):
        flat = np.where(np.isnan(margins), np.inf, margins)
        idx = np.unravel_index(int(np.argmin(flat)), flat.shape)
        worst_margin = float(flat[idx])
        worst_point = (float(r_grid[idx[0]]), float(r_grid[idx[0]] * fracs[idx[1]]))
        worst_condition = int(idx[2]) + 1
    report = RegularityReport(
        r_grid=r_grid,
        s_fracs=fracs,
        margins=margins,
        ok=ok,
        point_valid=valid,
        passed=passed,
        worst_margin=worst_margin,
        worst_point=worst_point,
        worst_condition=worst_condition,
        notes=notes,
    )
    _cholesky_spots(spec, report)
    return report


def embed_point(r: float, s: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectors x, y in R^n realizing the given (r, s) with |y| = 1; needs |s| < r."""
    x = np.zeros(n)
    x[0] = r
    y = np.zeros(n)
    y[0] = s / r
    y[1] = np.sqrt(max(1.0 - (s / r) ** 2, 0.0))
    return x, y


def _cholesky_spots(spec: MetricSpec, report: RegularityReport, count: int = 5):
    good = np.argwhere(report.point_valid & report.ok.all(axis=2))
    # skip |s/r| ~ 1 rows where embed_point degenerates
    good = [idx for idx in good if abs(report.s_fracs[idx[1]]) < 0.999]
    if not good:
        return
    stride = max(1, len(good) // count)
    all_ok = True
    for idx in good[::stride][:count]:
        r = float(report.r_grid[idx[0]])
        s = float(r * report.s_fracs[idx[1]])
        x, y = embed_point(r, s, spec.n)
        g = assemble_metric_matrix(spec, x, y)
        try:
            np.linalg.cholesky(0.5 * (g + g.T))
            ok = True
        except np.linalg.LinAlgError:
            ok = False
            all_ok = False
        report.cholesky_points.append({"r": r, "s": s, "positive_definite": ok})
    report.cholesky_ok = all_ok
