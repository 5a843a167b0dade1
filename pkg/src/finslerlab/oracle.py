"""Brute-force S-curvature oracle via geodesic flow and distortion.

Nothing here reuses the closed-form S machinery: geodesics are integrated
from the spray, the distortion tau = ln(sqrt(det g)/sigma) is evaluated
pointwise, and S is recovered as the time derivative of tau along the
trajectory.  Agreement with the analytic pipeline validates the spray
coefficients, the determinant identity, the volume densities, and the
reduced S-curvature formula all at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CrossCheckError, DomainError, DomainExitError
from .geometry import MetricSpec, metric_determinant, phi_jet, spray_values
from .quadrature import QuadratureRule
from .volume import density


@dataclass(frozen=True)
class GeodesicState:
    x: np.ndarray
    y: np.ndarray
    t: float


def _split(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    u = float(np.linalg.norm(y))
    if u <= 0.0:
        raise DomainError("geodesic velocity must be nonzero")
    r = float(np.linalg.norm(x))
    s = float(np.dot(x, y) / u)
    return u, r, s


def finsler_norm(spec: MetricSpec, x, y) -> float:
    """F(x, y) = |y| phi(|x|, <x,y>/|y|)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u, r, s = _split(x, y)
    return u * float(phi_jet(spec, r, s).d(0, 0))


def _spray_rhs(spec: MetricSpec, t: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    u, r, s = _split(x, y)
    rmin, rmax = spec.r_domain
    if not rmin <= r <= rmax:
        raise DomainExitError(
            f"trajectory left the radial domain [{rmin}, {rmax}] at t = {t:.6g}",
            t=t,
            point=tuple(x),
        )
    sv = spray_values(spec, r, s)
    # geodesic equation: x'' = -2G, G^i = u P y^i + u^2 Q x^i
    return -2.0 * (u * sv.P * y + u * u * sv.Q * x)


def integrate_geodesic(spec: MetricSpec, x0, y0, t_end: float, steps: int = 64):
    """RK4 trajectory of the geodesic flow; returns a list of GeodesicState.

    Negative t_end integrates backwards.  The Finsler norm of the velocity
    is recomputed at every stored state and must stay within 1e-8 relative
    of its initial value, otherwise the run aborts.
    """
    steps = int(steps)
    if steps < 16:
        raise ValueError("need at least 16 integration steps")
    x = np.asarray(x0, dtype=float).copy()
    y = np.asarray(y0, dtype=float).copy()
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("x0 and y0 must be 1-d vectors of equal dimension >= 2")
    dt = float(t_end) / steps
    states = [GeodesicState(x=x.copy(), y=y.copy(), t=0.0)]
    f0 = finsler_norm(spec, x, y)
    for k in range(steps):
        t = k * dt
        k1x, k1y = y, _spray_rhs(spec, t, x, y)
        k2x = y + 0.5 * dt * k1y
        k2y = _spray_rhs(spec, t + 0.5 * dt, x + 0.5 * dt * k1x, k2x)
        k3x = y + 0.5 * dt * k2y
        k3y = _spray_rhs(spec, t + 0.5 * dt, x + 0.5 * dt * k2x, k3x)
        k4x = y + dt * k3y
        k4y = _spray_rhs(spec, t + dt, x + dt * k3x, k4x)
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        y = y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        states.append(GeodesicState(x=x.copy(), y=y.copy(), t=(k + 1) * dt))
        drift = abs(finsler_norm(spec, x, y) - f0) / (1.0 + abs(f0))
        if drift > 1e-8:
            raise CrossCheckError(
                f"geodesic integrator drift {drift:.3e} exceeds 1e-8 at t = {(k + 1) * dt:.6g}"
            )
    return states


def distortion(
    spec: MetricSpec, vol, x, y, rule: QuadratureRule | None = None
) -> float:
    """tau(x, y) = ln( sqrt(det g at (r, s)) / sigma(r) )."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _, r, s = _split(x, y)
    det = float(metric_determinant(spec, r, s))
    if det <= 0.0:
        raise DomainError(f"det g = {det:.6g} not positive at r={r:.6g}, s={s:.6g}")
    return 0.5 * float(np.log(det)) - float(np.log(density(vol, spec, r, rule)))


def s_by_distortion(
    spec: MetricSpec,
    vol,
    x0,
    y0,
    dt: float | None = None,
    rule: QuadratureRule | None = None,
) -> float:
    """S(x0, y0) as d/dt of the distortion along the geodesic through (x0, y0).

    Five-point fourth-order stencil at t = 0 with one RK4 step per sample;
    the default dt is 1e-3 scaled by 1/F(x0, y0) so the stencil width is
    metrically uniform across specs.
    """
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    if dt is None:
        dt = 1e-3 / finsler_norm(spec, x0, y0)
    dt = float(dt)
    if dt <= 0.0:
        raise ValueError("dt must be positive")

    taus = {}
    for direction in (1.0, -1.0):
        states = integrate_geodesic(spec, x0, y0, direction * 2.0 * dt, steps=16)
        for st in states[8::8]:
            taus[round(st.t / dt)] = distortion(spec, vol, st.x, st.y, rule)
    return (taus[-2] - 8.0 * taus[-1] + 8.0 * taus[1] - taus[2]) / (12.0 * dt)
