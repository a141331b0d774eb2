"""Piecewise-affine functions on an interval and their balance function.

For a function f on I = [lo, hi] the balance function is

    ell(t) = (lo + hi + |{f < t}| - |{f > t}|) / 2,

nondecreasing in t with values in I. Its upper inverse is the
nondecreasing rearrangement of f, and the quantile set of ell at the
midpoint of I is the balanced set: the minimisers of || f - t ||_1.
All set measures below are exact for affine pieces.
"""
from __future__ import annotations

import math

import numpy as np

from ._linear import linear_log_parts, linear_power_parts
from .errors import DomainError, SpecError
from .intervals import QuantileInterval


class PiecewiseFunction:
    """f(x) = slopes[k] * x + intercepts[k] on [breaks[k], breaks[k+1]).

    The last piece is closed on the right.
    """

    def __init__(self, breaks, slopes, intercepts):
        x = np.asarray(breaks, dtype=float)
        m = np.asarray(slopes, dtype=float)
        q = np.asarray(intercepts, dtype=float)
        if x.ndim != 1 or len(x) < 2 or m.shape != (len(x) - 1,) or q.shape != m.shape:
            raise SpecError("need k+1 breakpoints and k slopes/intercepts")
        if np.any(np.diff(x) <= 0) or not np.all(np.isfinite(np.r_[x, m, q])):
            raise SpecError("breakpoints must be finite and strictly increasing")
        self.breaks, self.slopes, self.intercepts = x, m, q
        self.va = m * x[:-1] + q  # value at the left end of each piece
        self.vb = m * x[1:] + q  # left limit at the right end
        for arr in (x, m, q, self.va, self.vb):
            arr.setflags(write=False)

    def __repr__(self):
        return f"PiecewiseFunction(breaks={self.breaks.tolist()}, slopes={self.slopes.tolist()}, intercepts={self.intercepts.tolist()})"

    @classmethod
    def step(cls, breaks, values):
        values = np.asarray(values, dtype=float)
        return cls(breaks, np.zeros_like(values), values)

    @classmethod
    def from_json(cls, obj):
        try:
            if "values" in obj and "slopes" not in obj:
                return cls.step(obj["breaks"], obj["values"])
            return cls(obj["breaks"], obj["slopes"], obj["intercepts"])
        except (KeyError, TypeError) as exc:
            raise SpecError(f"bad piecewise function spec: {exc}") from exc

    def to_json(self):
        return {"breaks": self.breaks.tolist(), "slopes": self.slopes.tolist(), "intercepts": self.intercepts.tolist()}

    # basic properties
    @property
    def lo(self):
        return float(self.breaks[0])

    @property
    def hi(self):
        return float(self.breaks[-1])

    @property
    def length(self):
        return self.hi - self.lo

    @property
    def widths(self):
        return np.diff(self.breaks)

    @property
    def monotone(self):
        """True when f is nondecreasing on its domain."""
        scale = 1.0 + float(np.max(np.abs(np.r_[self.va, self.vb])))
        # downward jumps below rounding level are ignored
        return bool(np.all(self.slopes >= 0) and np.all(self.vb[:-1] <= self.va[1:] + 1e-12 * scale))

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        k = np.clip(np.searchsorted(self.breaks, xa, side="right") - 1, 0, len(self.slopes) - 1)
        out = self.slopes[k] * xa + self.intercepts[k]
        return float(out) if np.ndim(x) == 0 else out

    def essinf(self):
        return float(np.min(np.minimum(self.va, self.vb)))

    def esssup(self):
        return float(np.max(np.maximum(self.va, self.vb)))

    def integral(self):
        return float(np.sum(self.widths * 0.5 * (self.va + self.vb)))

    def mean(self):
        return self.integral() / self.length

    # level-set measures
    def _fractions(self, t, strict):
        t = np.asarray(t, dtype=float)[..., None]
        lo = np.minimum(self.va, self.vb)
        hi = np.maximum(self.va, self.vb)
        flat = hi == lo
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.clip((t - lo) / np.where(flat, 1.0, hi - lo), 0.0, 1.0)
        hit = (lo < t) if strict else (lo <= t)
        return np.where(flat, hit.astype(float), frac)

    def measure_below(self, t):
        """|{f < t}|"""
        out = np.sum(self._fractions(t, True) * self.widths, axis=-1)
        return float(out) if np.ndim(t) == 0 else out

    def measure_at_most(self, t):
        """|{f <= t}|"""
        out = np.sum(self._fractions(t, False) * self.widths, axis=-1)
        return float(out) if np.ndim(t) == 0 else out

    def measure_above(self, t):
        """|{f > t}|"""
        return self.length - self.measure_at_most(t)

    # integrals against a level, shared with quantile segments
    def power_parts(self, c, s):
        """(int (c - f)_+^s, int (f - c)_+^s) over the domain."""
        lower, upper = linear_power_parts(self.breaks[:-1], self.breaks[1:], self.va, self.vb, c, s)
        return float(np.sum(lower)), float(np.sum(upper))

    def log_parts(self, c, floor=1e-300):
        """(int_{f<c} log(c - f), int_{f>c} log(f - c))."""
        lower = upper = 0.0
        for x0, x1, a, b in zip(self.breaks[:-1], self.breaks[1:], self.va, self.vb):
            lw, up = linear_log_parts(x0, x1, a, b, c, floor)
            lower += lw
            upper += up
        return lower, upper

    def norm(self, c=0.0, r=1.0):
        """|| f - c ||_r."""
        if math.isinf(r):
            return max(abs(self.esssup() - c), abs(self.essinf() - c))
        lower, upper = self.power_parts(c, r)
        return (lower + upper) ** (1.0 / r)

    # balance function
    def ell(self, t):
        """(lo + hi + |{f < t}| - |{f > t}|) / 2; equals lo at -inf and hi at +inf."""
        ta = np.asarray(t, dtype=float)
        below = self.measure_below(np.where(np.isfinite(ta), ta, 0.0))
        above = self.measure_above(np.where(np.isfinite(ta), ta, 0.0))
        out = 0.5 * (self.lo + self.hi + below - above)
        out = np.where(ta == -np.inf, self.lo, np.where(ta == np.inf, self.hi, out))
        return float(out) if np.ndim(t) == 0 else out

    def _ell_chain(self):
        """Candidate values v_j with ell(v_j-) and ell(v_j+); ell is affine between them."""
        v = np.unique(np.r_[self.va, self.vb])
        below = self.measure_below(v)
        at_most = self.measure_at_most(v)
        left = 0.5 * (self.lo + self.hi + below - (self.length - below))
        right = 0.5 * (self.lo + self.hi + at_most - (self.length - at_most))
        return v, left, right

    def _check_interior(self, x):
        if not self.lo < x < self.hi:
            raise DomainError(f"{x} not inside the open domain ({self.lo}, {self.hi})")

    def ell_inverse(self, x: float) -> float:
        """Upper inverse sup{t : ell(t) <= x}, for x inside the open domain."""
        self._check_interior(x)
        v, left, right = self._ell_chain()
        if x < left[0]:
            return -math.inf
        if x >= right[-1]:
            return math.inf
        # largest chain position with level <= x; positions alternate left_j, right_j
        levels = np.ravel(np.column_stack([left, right]))
        pos = int(np.searchsorted(levels, x, side="right")) - 1
        j, is_right = divmod(pos, 2)
        if not is_right:
            return float(v[j])
        gap = left[j + 1] - right[j]
        return float(v[j] + (x - right[j]) / gap * (v[j + 1] - v[j]))

    def ell_lower_inverse(self, x: float) -> float:
        """Lower inverse inf{t : ell(t) >= x}, for x inside the open domain."""
        self._check_interior(x)
        v, left, right = self._ell_chain()
        if x <= left[0]:
            return -math.inf
        if x > right[-1]:
            return math.inf
        levels = np.ravel(np.column_stack([left, right]))
        pos = int(np.searchsorted(levels, x, side="left"))
        j, is_right = divmod(pos, 2)
        if is_right:
            return float(v[j])
        gap = left[j] - right[j - 1]
        return float(v[j - 1] + (x - right[j - 1]) / gap * (v[j] - v[j - 1]))

    def balanced_set(self) -> QuantileInterval:
        """Minimisers of t -> || f - t ||_1, as [inf{ell >= m}, sup{ell <= m}] with m the midpoint of I."""
        m = 0.5 * (self.lo + self.hi)
        return QuantileInterval(self.ell_lower_inverse(m), self.ell_inverse(m))

    def rearrangement(self) -> "PiecewiseFunction":
        """The nondecreasing rearrangement of f (the upper inverse of ell), on the same domain."""
        v, left, right = self._ell_chain()
        br, sl, ic = [], [], []

        def add(x0, x1, y0, y1):
            if x1 - x0 <= 1e-15 * max(1.0, abs(x0), abs(x1)):
                return
            m = (y1 - y0) / (x1 - x0)
            br.append(x0)
            sl.append(m)
            ic.append(y0 - m * x0)

        for j in range(len(v)):
            add(left[j], right[j], v[j], v[j])
            if j + 1 < len(v):
                add(right[j], left[j + 1], v[j], v[j + 1])
        br.append(self.hi)
        br[0] = self.lo
        return PiecewiseFunction(br, sl, ic)

    # monotone-only operations
    def quantile_set(self, t: float) -> QuantileInterval:
        """[inf{f >= t}, sup{f <= t}] with inf of the empty set = hi and sup of the empty set = lo."""
        if not self.monotone:
            raise SpecError("quantile sets need a nondecreasing function")
        lo_pt = self.hi
        for k in range(len(self.slopes)):
            if self.va[k] >= t:
                lo_pt = float(self.breaks[k])
                break
            if self.vb[k] >= t:
                lo_pt = float(min((t - self.intercepts[k]) / self.slopes[k], self.breaks[k + 1]))
                break
        hi_pt = self.lo
        for k in range(len(self.slopes) - 1, -1, -1):
            if self.vb[k] <= t:
                hi_pt = float(self.breaks[k + 1])
                break
            if self.va[k] <= t:
                hi_pt = float(max((t - self.intercepts[k]) / self.slopes[k], self.breaks[k]))
                break
        if lo_pt > hi_pt:
            # only possible when one of the sets is empty; the conventions then coincide
            lo_pt, hi_pt = hi_pt, lo_pt
        return QuantileInterval(lo_pt, hi_pt)

    def growth_points(self) -> list[QuantileInterval]:
        """Points x with f < f(x) to the left of x, or f > f(x) to the right, as disjoint closed intervals.

        The domain endpoints count as growth points of a non-constant f.
        A constant function has none.
        """
        if not self.monotone:
            raise SpecError("growth points need a nondecreasing function")
        if self.esssup() == self.essinf():
            return []
        pieces = [(self.lo, self.lo), (self.hi, self.hi)]
        for k in range(len(self.slopes)):
            if self.slopes[k] > 0:
                pieces.append((float(self.breaks[k]), float(self.breaks[k + 1])))
            if k > 0 and self.va[k] > self.vb[k - 1]:
                pieces.append((float(self.breaks[k]), float(self.breaks[k])))
        pieces.sort()
        merged = [list(pieces[0])]
        for a, b in pieces[1:]:
            if a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return [QuantileInterval(a, b) for a, b in merged]


def from_step_quantile(measure) -> PiecewiseFunction:
    """The quantile of a piecewise-linear-quantile measure as a function on [0, 1]."""
    tk, qa, qb = measure.tk, measure.qa, measure.qb
    w = np.diff(tk)
    slopes = (qb - qa) / w
    return PiecewiseFunction(tk, slopes, qa - slopes * tk[:-1])
