"""Gauss-Legendre quadrature utilities.

Two consumers: the angular integrals behind the volume densities (fixed
interval [0, pi], doubling refinement) and the radial antiderivatives behind
the Berwald-type family construction (cumulative integrals from an anchor
radius, cached at every queried point).
"""

from __future__ import annotations

from bisect import bisect_left, insort
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}

#: doubling refinement stops when successive values differ by at most this
REFINE_ATOL = 1e-10
#: node cap for the angular integrals
REFINE_CAP = 1024


def gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], cached per order."""
    got = _GL_CACHE.get(n)
    if got is None:
        got = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = got
    return got


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on [0, pi] with optional doubling refinement."""

    n: int = 64
    adaptive: bool = True

    def points(self, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights mapped to [0, pi]."""
        x, w = gl_nodes(n or self.n)
        return 0.5 * np.pi * (x + 1.0), 0.5 * np.pi * w

    @property
    def nodes(self) -> np.ndarray:
        return self.points()[0]

    @property
    def weights(self) -> np.ndarray:
        return self.points()[1]

    def integrate(self, f) -> float:
        """Integral of f over [0, pi]; f takes an array of nodes."""
        return refine(lambda n: self._fixed(f, n), self)

    def _fixed(self, f, n: int) -> float:
        t, w = self.points(n)
        return float(np.sum(w * np.asarray(f(t))))


def refine(eval_at_n, rule: QuadratureRule) -> float:
    """Run eval_at_n(N) with doubling N until successive values agree.

    With ``rule.adaptive`` unset this is a single evaluation at ``rule.n``.
    Raises QuadratureError when the node cap is hit without convergence.
    """
    if not rule.adaptive:
        return eval_at_n(rule.n)
    n = rule.n
    prev = eval_at_n(n)
    while n < REFINE_CAP:
        n *= 2
        cur = eval_at_n(n)
        if _close(cur, prev):
            return cur
        prev = cur
    raise QuadratureError(
        f"refinement did not reach {REFINE_ATOL:g} below {REFINE_CAP} nodes"
    )


def _close(a, b) -> bool:
    return bool(np.all(np.abs(np.asarray(a) - np.asarray(b)) <= REFINE_ATOL))


def segment_integral(f, a: float, b: float, tol: float = 1e-13) -> float:
    """Adaptive GL integral of f over [a, b] (sign-aware, smooth integrands)."""
    if a == b:
        return 0.0
    n = 16
    prev = _segment_fixed(f, a, b, n)
    while n <= 256:
        n *= 2
        cur = _segment_fixed(f, a, b, n)
        if abs(cur - prev) <= tol * (1.0 + abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(f"segment integral over [{a}, {b}] did not converge")


def _segment_fixed(f, a: float, b: float, n: int) -> float:
    x, w = gl_nodes(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    pts = mid + half * x
    return float(half * np.sum(w * np.asarray(f(pts))))


class CumulativeIntegral:
    """Antiderivative F(r) = integral from r0 to r of fn, cached at queried radii.

    Queries anchor on the nearest previously computed radius, so a sweep
    through a grid costs one short segment per new point.  fn receives an
    array of radii and returns the integrand values.
    """

    def __init__(self, fn, r0: float, tol: float = 1e-13):
        self.fn = fn
        self.r0 = float(r0)
        self.tol = tol
        self._keys: list[float] = [self.r0]
        self._vals: dict[float, float] = {self.r0: 0.0}

    def value(self, r: float) -> float:
        r = float(r)
        got = self._vals.get(r)
        if got is not None:
            return got
        i = bisect_left(self._keys, r)
        cands = [k for k in (self._keys[i - 1 : i] + self._keys[i : i + 1])]
        anchor = min(cands, key=lambda k: abs(k - r))
        v = self._vals[anchor] + segment_integral(self.fn, anchor, r, self.tol)
        insort(self._keys, r)
        self._vals[r] = v
        return v
