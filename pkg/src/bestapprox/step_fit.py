"""Best constant approximation of a function in L^r.

A *segment* is anything exposing the small protocol used below:
``length``, ``essinf()``, ``esssup()``, ``power_parts(c, s)``,
``log_parts(c)``, ``balanced_set()`` and ``mean()``. Piecewise-affine
functions and restrictions of a quantile function to [a, b] both qualify.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import NumericalError, SpecError
from .intervals import QuantileInterval
from .monotone import PiecewiseFunction


@dataclass(frozen=True)
class TauResult:
    value: float | QuantileInterval
    r: float
    residual_norm: float

    @property
    def point(self) -> float:
        """A representative minimiser (the left end of the set when r = 1)."""
        return self.value.lo if isinstance(self.value, QuantileInterval) else self.value


class QuantileSegment:
    """The quantile function of ``measure`` restricted to [a, b], 0 <= a < b <= 1."""

    def __init__(self, measure, a: float, b: float):
        if not 0.0 <= a < b <= 1.0:
            raise SpecError(f"segment [{a}, {b}] not inside [0, 1]")
        self.measure, self.a, self.b = measure, float(a), float(b)

    @property
    def length(self):
        return self.b - self.a

    @property
    def monotone(self):
        return True

    def essinf(self):
        return float(self.measure._q(np.array(self.a)))

    def esssup(self):
        return float(self.measure._q_left(np.array(self.b)))

    def power_parts(self, c, s):
        lower, upper = self.measure.power_parts(self.a, self.b, c, s)
        return float(lower), float(upper)

    def mean(self):
        return float(self.measure.quantile_integral(self.a, self.b)) / self.length

    def balanced_set(self):
        return self.measure.quantile_set_cdf(0.5 * (self.a + self.b))

    def quantile_set(self, level):
        # [inf{Q >= level}, sup{Q <= level}] inside [a, b]
        lo = min(max(float(self.measure._cdf_left(np.array(level))), self.a), self.b)
        hi = min(max(float(self.measure._cdf(np.array(level))), self.a), self.b)
        return QuantileInterval(lo, hi)

    def log_parts(self, c, floor=1e-300):
        mu = self.measure
        tc = min(max(float(mu._cdf(np.array(c))), self.a), self.b)
        tl = min(max(float(mu._cdf_left(np.array(c))), self.a), self.b)
        low = lambda t: np.log(np.maximum(c - mu._q(t), floor))
        up = lambda t: np.log(np.maximum(mu._q(t) - c, floor))
        lower = quadrature.integrate(low, self.a, tl, True, True)[0] if tl > self.a else 0.0
        upper = quadrature.integrate(up, tc, self.b, True, True)[0] if self.b > tc else 0.0
        return lower, upper


def _check_r(r):
    if not (r >= 1):
        raise SpecError(f"exponent r must be >= 1, got {r}")


def phi_r_derivative(f, t: float, r: float) -> float:
    """int_{f<t} (t - f)^(r-1) - int_{f>t} (f - t)^(r-1).

    Proportional (by the positive factor r / |I|) to the derivative of
    t -> || f - t ||_r^r; for r = 1 it is |{f < t}| - |{f > t}|.
    """
    _check_r(r)
    if r == 1:
        if isinstance(f, PiecewiseFunction):
            return f.measure_below(t) - f.measure_above(t)
        lower_pt = f.quantile_set(t)
        return (lower_pt.lo - f.a) - (f.b - lower_pt.hi)
    lower, upper = f.power_parts(t, r - 1.0)
    return lower - upper


def _residual(f, c, r):
    if math.isinf(r):
        return max(abs(f.esssup() - c), abs(f.essinf() - c))
    lower, upper = f.power_parts(c, r)
    return (lower + upper) ** (1.0 / r)


def _bracket(f):
    lo, hi = f.essinf(), f.esssup()
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    # unbounded quantile segment: start from interior quantiles and expand
    seg_a, seg_b = f.a + 1e-3 * f.length, f.b - 1e-3 * f.length
    q_lo = float(f.measure._q(np.array(seg_a)))
    q_hi = float(f.measure._q_left(np.array(seg_b)))
    lo = lo if math.isfinite(lo) else q_lo
    hi = hi if math.isfinite(hi) else q_hi
    return lo, hi


def _bisect_increasing(g, lo, hi, xtol=1e-12, max_iter=400):
    """Root of a nondecreasing function on [lo, hi], expanding the bracket if needed."""
    glo, ghi = g(lo), g(hi)
    width = max(hi - lo, 1.0)
    k = 0
    while glo > 0:
        lo -= width * 2.0**k
        glo = g(lo)
        k += 1
        if k > 200:
            raise NumericalError("no sign change below")
    k = 0
    while ghi < 0:
        hi += width * 2.0**k
        ghi = g(hi)
        k += 1
        if k > 200:
            raise NumericalError("no sign change above")
    if glo == 0:
        return lo
    if ghi == 0:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol or mid in (lo, hi):
            break
        gm = g(mid)
        if gm > 0:
            hi = mid
        elif gm < 0:
            lo = mid
        else:
            return mid
    return 0.5 * (lo + hi)


def tau_r(f, r: float) -> TauResult:
    """Best constant approximation of f in L^r.

    r = 1 returns the whole balanced set as an interval, r = 2 the mean,
    r = inf the mid-range; otherwise the unique root of the derivative.
    """
    _check_r(r)
    if math.isinf(r):
        return tau_infinity(f)
    if r == 1:
        b = f.balanced_set()
        return TauResult(b, 1.0, _residual(f, b.lo, 1.0))
    if r == 2:
        c = f.mean()
        return TauResult(c, 2.0, _residual(f, c, 2.0))
    lo, hi = _bracket(f)
    if lo == hi:
        return TauResult(lo, r, 0.0)
    c = _bisect_increasing(lambda t: phi_r_derivative(f, t, r), lo, hi)
    return TauResult(c, r, _residual(f, c, r))


def tau_one_plus(f) -> float:
    """Limit of the L^r best constant as r decreases to 1; a point of the balanced set.

    With B = [b0, b1] and Psi(t) = int_{f<=b0} log(t - f) - int_{f>=b1} log(f - t),
    the limit is the root of Psi in B when Psi changes sign, b0 when
    Psi > 0 on the interior of B and b1 when Psi < 0 there.
    """
    b = f.balanced_set()
    if b.is_point:
        return b.lo
    if not (math.isfinite(b.lo) and math.isfinite(b.hi)):
        raise NumericalError("unbounded balanced set")

    def psi(t):
        lower, upper = f.log_parts(t)
        return lower - upper

    delta = 1e-12 * b.length
    if psi(b.lo + delta) >= 0:
        return b.lo
    if psi(b.hi - delta) <= 0:
        return b.hi
    return _bisect_increasing(psi, b.lo + delta, b.hi - delta, xtol=1e-14 * max(1.0, abs(b.lo), abs(b.hi)))


def tau_infinity(f) -> TauResult:
    lo, hi = f.essinf(), f.esssup()
    c = 0.5 * (lo + hi)
    return TauResult(c, math.inf, 0.5 * (hi - lo))


def best_single_jump(f, a: float, b: float) -> QuantileInterval:
    """Jump locations x minimising || f - (a on [lo, x), b on [x, hi]) ||_1, for nondecreasing f and a < b."""
    if not getattr(f, "monotone", False):
        raise SpecError("best_single_jump needs a nondecreasing function")
    if not a < b:
        raise SpecError("need a < b")
    return f.quantile_set(0.5 * (a + b))
