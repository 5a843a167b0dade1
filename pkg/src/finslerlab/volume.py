"""Volume densities and the radial log-derivative coefficient f(r).

The two intrinsic densities of a spherically symmetric metric reduce to
one-dimensional angular integrals with s = r cos t::

    sigma_bh(r) = int_0^pi sin^{n-2} t dt / int_0^pi sin^{n-2} t phi(r, r cos t)^{-n} dt
    sigma_ht(r) = int_0^pi sin^{n-2} t T(r, r cos t) dt / int_0^pi sin^{n-2} t dt

with T = phi (phi - s phi_s)^{n-2} [(phi - s phi_s) + (r^2 - s^2) phi_ss],
i.e. T = det(g) / phi^2 in the closed-form determinant factorization.

The S-curvature pipeline needs f(r) = -sigma'(r) / (r sigma(r)).  sigma' is
computed by differentiating under the integral sign (the integrand jets carry
the r cos t argument chain exactly); a central-difference cross-check of
log sigma guards the analytic path and raises CrossCheckError on disagreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CrossCheckError, DomainError
from .expr import ScalarFunction
from .geometry import MetricSpec, phi_jet
from .jets import Jet3
from .quadrature import QuadratureRule, refine


@dataclass(frozen=True)
class BusemannHausdorff:
    pass


@dataclass(frozen=True)
class HolmesThompson:
    pass


@dataclass(frozen=True)
class CustomDensity:
    sigma: ScalarFunction


@dataclass(frozen=True)
class ConstantDensity:
    pass


VolumeSpec = object  # one of the four dataclasses above

BH = BusemannHausdorff()
HT = HolmesThompson()
CONSTANT = ConstantDensity()

_DEFAULT_RULE = QuadratureRule()


def sin_power_integral(n: int) -> float:
    """Closed form of int_0^pi sin^{n-2} t dt."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    m = n - 2
    return math.sqrt(math.pi) * math.gamma((m + 1) / 2.0) / math.gamma(m / 2.0 + 1.0)


@lru_cache(maxsize=512)
def _node_jets(spec: MetricSpec, r: float, n_nodes: int):
    """Profile jets at the angular nodes (r, r cos t); regularity enforced."""
    t, w = _DEFAULT_RULE.points(n_nodes)
    cos_t = np.cos(t)
    jet = phi_jet(spec, r, r * cos_t)
    return t, w, cos_t, jet


def _arr(v, shape):
    return np.broadcast_to(np.asarray(v, dtype=float), shape)


def _sigma_bh_at(spec: MetricSpec, r: float, n_nodes: int) -> float:
    t, w, _, jet = _node_jets(spec, r, n_nodes)
    sinp = np.sin(t) ** (spec.n - 2)
    phi = _arr(jet.d(0, 0), t.shape)
    denom = float(np.sum(w * sinp * phi ** (-spec.n)))
    return sin_power_integral(spec.n) / denom


def _ht_integrand_values(spec: MetricSpec, r: float, n_nodes: int) -> np.ndarray:
    t, w, cos_t, jet = _node_jets(spec, r, n_nodes)
    s = r * cos_t
    phi = _arr(jet.d(0, 0), t.shape)
    phi_s = _arr(jet.d(0, 1), t.shape)
    phi_ss = _arr(jet.d(0, 2), t.shape)
    m2 = phi - s * phi_s
    m3 = m2 + (r * r - s * s) * phi_ss
    return phi * m2 ** (spec.n - 2) * m3


def _sigma_ht_at(spec: MetricSpec, r: float, n_nodes: int) -> float:
    t, w, _, _ = _node_jets(spec, r, n_nodes)
    sinp = np.sin(t) ** (spec.n - 2)
    total = float(np.sum(w * sinp * _ht_integrand_values(spec, r, n_nodes)))
    return total / sin_power_integral(spec.n)


def sigma_bh(spec: MetricSpec, r: float, rule: QuadratureRule | None = None) -> float:
    """Busemann-Hausdorff density at radius r (normalized to 1 for phi = 1)."""
    rule = rule or _DEFAULT_RULE
    return refine(lambda n: _sigma_bh_at(spec, float(r), n), rule)


def sigma_ht(spec: MetricSpec, r: float, rule: QuadratureRule | None = None) -> float:
    """Holmes-Thompson density at radius r (normalized to 1 for phi = 1)."""
    rule = rule or _DEFAULT_RULE
    return refine(lambda n: _sigma_ht_at(spec, float(r), n), rule)


def density(vol: VolumeSpec, spec: MetricSpec, r: float, rule: QuadratureRule | None = None) -> float:
    """sigma(r) for any volume specification."""
    if isinstance(vol, BusemannHausdorff):
        return sigma_bh(spec, r, rule)
    if isinstance(vol, HolmesThompson):
        return sigma_ht(spec, r, rule)
    if isinstance(vol, CustomDensity):
        v = float(vol.sigma.value(float(r)))
        if v <= 0.0:
            raise DomainError(f"custom density must be positive, got {v!r} at r={r!r}")
        return v
    if isinstance(vol, ConstantDensity):
        return 1.0
    raise TypeError(f"unknown volume spec {vol!r}")


# -- derivative under the integral sign --------------------------------------


def _log_deriv_bh_at(spec: MetricSpec, r: float, n_nodes: int) -> float:
    """(log sigma_bh)'(r) via integrand jets."""
    t, w, cos_t, jet = _node_jets(spec, r, n_nodes)
    sinp = np.sin(t) ** (spec.n - 2)
    integrand = jet.powi(-spec.n)
    ddr = _arr(integrand.d(1, 0), t.shape) + cos_t * _arr(integrand.d(0, 1), t.shape)
    j_val = float(np.sum(w * sinp * _arr(integrand.d(0, 0), t.shape)))
    j_der = float(np.sum(w * sinp * ddr))
    return -j_der / j_val


def _log_deriv_ht_at(spec: MetricSpec, r: float, n_nodes: int) -> float:
    """(log sigma_ht)'(r) via integrand jets (order-3 profile jets feed T_r, T_s)."""
    t, w, cos_t, jet = _node_jets(spec, r, n_nodes)
    s_vals = r * cos_t
    sinp = np.sin(t) ** (spec.n - 2)
    rj = Jet3.seed(float(r), dr=1.0)
    sj = Jet3.seed(s_vals, ds=1.0)
    m2j = jet - sj * jet.deriv(0, 1)
    m3j = m2j + (rj * rj - sj * sj) * jet.deriv(0, 2)
    t_jet = jet * m2j.powi(spec.n - 2) * m3j
    ddr = _arr(t_jet.d(1, 0), t.shape) + cos_t * _arr(t_jet.d(0, 1), t.shape)
    k_val = float(np.sum(w * sinp * _arr(t_jet.d(0, 0), t.shape)))
    k_der = float(np.sum(w * sinp * ddr))
    return k_der / k_val


def _log_sigma_derivative(vol: VolumeSpec, spec: MetricSpec, r: float, rule: QuadratureRule) -> float:
    if isinstance(vol, BusemannHausdorff):
        return refine(lambda n: _log_deriv_bh_at(spec, float(r), n), rule)
    return refine(lambda n: _log_deriv_ht_at(spec, float(r), n), rule)


def f_coefficient(
    vol: VolumeSpec,
    spec: MetricSpec,
    r: float,
    rule: QuadratureRule | None = None,
) -> float:
    """f(r) = -sigma'(r) / (r sigma(r)) for the given volume.

    The quadrature volumes differentiate under the integral sign and always
    cross-check against a central difference of log sigma; CrossCheckError
    flags disagreement beyond 1e-6 relative.
    """
    r = float(r)
    rule = rule or _DEFAULT_RULE
    if isinstance(vol, ConstantDensity):
        return 0.0
    if isinstance(vol, CustomDensity):
        j = vol.sigma.jet(r)
        v = float(j.d(0, 0))
        if v <= 0.0:
            raise DomainError(f"custom density must be positive, got {v!r} at r={r!r}")
        return -float(j.d(1, 0)) / (r * v)
    dlog = _log_sigma_derivative(vol, spec, r, rule)
    _cross_check_log_derivative(vol, spec, r, rule, dlog)
    return -dlog / r


def _cross_check_log_derivative(vol, spec, r, rule, dlog) -> None:
    rmin, rmax = spec.r_domain
    h = min(1e-4 * max(1.0, r), 0.45 * (r - rmin), 0.45 * (rmax - r))
    if h < 1e-8:
        raise DomainError(
            f"radius {r!r} too close to the domain boundary for the sigma' cross-check"
        )
    lo = math.log(density(vol, spec, r - h, rule))
    hi = math.log(density(vol, spec, r + h, rule))
    fd = (hi - lo) / (2.0 * h)
    if abs(fd - dlog) > 1e-6 * max(1.0, abs(dlog)):
        raise CrossCheckError(
            f"sigma' under the integral ({dlog!r}) and central difference ({fd!r}) "
            f"disagree at r={r!r}"
        )
