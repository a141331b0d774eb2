"""Probability measures on the real line, accessed through their quantile functions.

Every measure exposes the (right-continuous) distribution function F, the
upper quantile Q(t) = sup{F <= t}, its left limit, and split power
integrals of Q against a level c. The last of these is what the distance
and the best-constant solvers are built on:

    power_parts(a, b, c, s) = (int_{[a,b], Q<c} (c-Q)^s dt,  int_{[a,b], Q>c} (Q-c)^s dt)

Kinds with closed forms (piecewise-linear quantiles, uniform, Beta(2,1),
exponential, the two Cantor-type measures at integer s) override the
quadrature fallback.
"""
from __future__ import annotations

import math
from functools import cached_property
from math import comb

import numpy as np
from scipy import special

from . import quadrature
from ._linear import linear_power_parts
from .errors import DomainError, SpecError, UnsupportedError
from .intervals import QuantileInterval
from .selfsimilar import binary_to_ternary_quantile, cantor_function_quantile


def _arr(x):
    return np.asarray(x, dtype=float)


def _ret(x, like):
    return float(x) if np.ndim(like) == 0 else x


class Measure:
    """Base class. Subclasses implement the underscored primitives."""

    kind = "abstract"

    # primitives valid on the closed unit interval: _q(0) = Q(0+), _q(1) = Q(1-)
    def _q(self, t):
        raise NotImplementedError

    def _q_left(self, t):
        return self._q(t)

    def _cdf(self, x):
        raise NotImplementedError

    def _cdf_left(self, x):
        return self._cdf(x)

    # public, vectorised
    def cdf(self, x):
        return _ret(self._cdf(_arr(x)), x)

    def cdf_left(self, x):
        """F(x-) = mu((-inf, x))."""
        return _ret(self._cdf_left(_arr(x)), x)

    def quantile(self, t):
        """Upper quantile sup{x : F(x) <= t} for t in (0, 1)."""
        ta = _arr(t)
        if np.any((ta <= 0) | (ta >= 1)) or np.any(np.isnan(ta)):
            raise DomainError("quantile level must lie in (0, 1)")
        return _ret(self._q(ta), t)

    def quantile_left(self, t):
        """Lower quantile inf{x : F(x) >= t} for t in (0, 1)."""
        ta = _arr(t)
        if np.any((ta <= 0) | (ta >= 1)) or np.any(np.isnan(ta)):
            raise DomainError("quantile level must lie in (0, 1)")
        return _ret(self._q_left(ta), t)

    def support_bounds(self):
        return float(self._q(np.array(0.0))), float(self._q_left(np.array(1.0)))

    def quantile_breaks(self):
        """Levels in (0, 1) where the quantile may jump or kink; quadrature splits there."""
        return np.empty(0)

    def quantile_set_cdf(self, t: float) -> QuantileInterval:
        """[inf{F >= t}, sup{F <= t}] on the extended line."""
        if not 0.0 <= t <= 1.0:
            raise DomainError("level must lie in [0, 1]")
        lo_s, hi_s = self.support_bounds()
        if t == 0.0:
            return QuantileInterval(-math.inf, lo_s)
        if t == 1.0:
            return QuantileInterval(hi_s, math.inf)
        return QuantileInterval(float(self._q_left(np.array(t))), float(self._q(np.array(t))))

    def quantile_set_quantile(self, x: float) -> QuantileInterval:
        """Quantile set of Q at level x, a subinterval of [0, 1]: [F(x-), F(x)]."""
        return QuantileInterval(float(self._cdf_left(np.array(x))), float(self._cdf(np.array(x))))

    # integrals of the quantile function
    def power_parts(self, a, b, c, s):
        """Split power integrals of Q over [a, b] around level c; see module docstring."""
        a, b, c = np.broadcast_arrays(_arr(a), _arr(b), _arr(c))
        lower = np.zeros(a.shape)
        upper = np.zeros(a.shape)
        for idx in np.ndindex(a.shape):
            lower[idx], upper[idx] = self._power_parts_quad(float(a[idx]), float(b[idx]), float(c[idx]), s)
        return lower, upper

    def _power_parts_quad(self, a, b, c, s, cfg=quadrature.QuadConfig()):
        """Reference split integral by adaptive quadrature in t."""
        if b <= a:
            return 0.0, 0.0
        tc = min(max(float(self._cdf(np.array(c))), a), b)
        lo_s, hi_s = self.support_bounds()
        sing_lo = a == 0.0 and not math.isfinite(lo_s)
        sing_hi = b == 1.0 and not math.isfinite(hi_s)
        low = lambda t: np.maximum(c - self._q(t), 0.0) ** s
        up = lambda t: np.maximum(self._q(t) - c, 0.0) ** s
        lv, _ = quadrature.integrate(low, a, tc, singular_left=sing_lo, cfg=cfg) if tc > a else (0.0, 0.0)
        uv, _ = quadrature.integrate(up, tc, b, singular_right=sing_hi, cfg=cfg) if b > tc else (0.0, 0.0)
        return lv, uv

    def quantile_integral(self, a, b):
        """int_a^b Q(t) dt."""
        lower, upper = self.power_parts(a, b, 0.0, 1.0)
        return _ret(upper - lower, np.broadcast(_arr(a), _arr(b)))

    def moment(self, r: float) -> float:
        """int |x|^r dmu, returning inf when the integral diverges."""
        lo_s, hi_s = self.support_bounds()
        if math.isfinite(lo_s) and math.isfinite(hi_s):
            lower, upper = self.power_parts(0.0, 1.0, 0.0, r)
            return float(lower + upper)
        # unbounded support: the quadrature tail test decides divergence
        lower, upper = Measure._power_parts_quad(self, 0.0, 1.0, 0.0, r)
        return float(lower + upper)

    # densities; kinds without them raise
    def density(self, x):
        raise UnsupportedError(f"{self.kind} has no closed-form density")

    def inverse_measure_density(self, t):
        """Derivative of the quantile function."""
        raise UnsupportedError(f"{self.kind}: quantile is not absolutely continuous in closed form")

    def ac_power_integral(self, q: float) -> float:
        """int (dmu_a/dx)^q dx for the absolutely continuous part mu_a."""
        raise UnsupportedError(f"{self.kind}: absolutely continuous part not available")

    def tilted_quantile(self, t, r: float):
        """Quantile of the probability measure with density proportional to density**(1/(r+1))."""
        raise UnsupportedError(f"{self.kind}: no density to tilt")

    def to_json(self) -> dict:
        raise NotImplementedError


# ---------------------------------------------------------------- piecewise-linear quantiles


class PiecewiseLinearQuantile(Measure):
    """Quantile affine on each [t_k, t_{k+1}), possibly jumping at knots.

    ``knots`` are the t-breakpoints 0 = t_0 < ... < t_m = 1; on piece k the
    quantile runs from ``starts[k]`` (at t_k) to ``ends[k]`` (as t -> t_{k+1}).
    """

    kind = "piecewise_linear_quantile"

    def __init__(self, knots, starts, ends):
        tk = np.asarray(knots, dtype=float)
        qa = np.asarray(starts, dtype=float)
        qb = np.asarray(ends, dtype=float)
        if tk.ndim != 1 or len(tk) < 2 or len(qa) != len(tk) - 1 or len(qb) != len(qa):
            raise SpecError("inconsistent piecewise-linear quantile description")
        if abs(tk[0]) > 1e-12 or abs(tk[-1] - 1) > 1e-12 or np.any(np.diff(tk) <= 0):
            raise SpecError("quantile knots must increase strictly from 0 to 1")
        if np.any(qb < qa) or np.any(qa[1:] < qb[:-1]) or not np.all(np.isfinite(np.r_[qa, qb])):
            raise SpecError("quantile values must be finite and nondecreasing")
        tk[0], tk[-1] = 0.0, 1.0
        self.tk, self.qa, self.qb = tk, qa, qb
        for arr in (tk, qa, qb):
            arr.setflags(write=False)

    @classmethod
    def from_knots(cls, knots):
        """Continuous quantile interpolating (t, value) pairs, extended flat to [0, 1]."""
        pts = [(float(t), float(v)) for t, v in knots]
        if len(pts) < 1:
            raise SpecError("need at least one knot")
        ts = np.array([p[0] for p in pts])
        vs = np.array([p[1] for p in pts])
        if np.any(np.diff(ts) <= 0) or np.any(np.diff(vs) < 0) or ts[0] < 0 or ts[-1] > 1:
            raise SpecError("knots need strictly increasing t in [0, 1] and nondecreasing values")
        tk = list(ts)
        qa = list(vs[:-1])
        qb = list(vs[1:])
        if ts[0] > 0:
            tk = [0.0] + tk
            qa, qb = [vs[0]] + qa, [vs[0]] + qb
        if ts[-1] < 1:
            tk = tk + [1.0]
            qa, qb = qa + [vs[-1]], qb + [vs[-1]]
        if len(tk) == 1:
            tk, qa, qb = [0.0, 1.0], [vs[0]], [vs[0]]
        obj = cls(tk, qa, qb)
        obj._knots_json = [[float(t), float(v)] for t, v in pts]
        return obj

    @property
    def widths(self):
        return np.diff(self.tk)

    def quantile_breaks(self):
        return self.tk[1:-1]

    def _eval(self, t, k):
        w = self.tk[k + 1] - self.tk[k]
        return self.qa[k] + (self.qb[k] - self.qa[k]) * (t - self.tk[k]) / w

    def _q(self, t):
        k = np.clip(np.searchsorted(self.tk, t, side="right") - 1, 0, len(self.qa) - 1)
        return self._eval(t, k)

    def _q_left(self, t):
        k = np.clip(np.searchsorted(self.tk, t, side="left") - 1, 0, len(self.qa) - 1)
        return self._eval(t, k)

    def _cdf_generic(self, x, strict):
        x = np.asarray(x, dtype=float)[..., None]
        dq = self.qb - self.qa
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(dq > 0, np.clip((x - self.qa) / np.where(dq > 0, dq, 1.0), 0.0, 1.0), 0.0)
        flat_hit = (self.qa < x) if strict else (self.qa <= x)
        frac = np.where(dq > 0, frac, flat_hit.astype(float))
        return np.clip(np.sum(frac * self.widths, axis=-1), 0.0, 1.0)

    def _cdf(self, x):
        return self._cdf_generic(x, strict=False)

    def _cdf_left(self, x):
        return self._cdf_generic(x, strict=True)

    def power_parts(self, a, b, c, s):
        a, b, c = (np.asarray(v, dtype=float)[..., None] for v in np.broadcast_arrays(_arr(a), _arr(b), _arr(c)))
        t0 = np.maximum(a, self.tk[:-1])
        t1 = np.minimum(b, self.tk[1:])
        valid = t1 > t0
        t1 = np.where(valid, t1, t0)
        k = np.arange(len(self.qa))
        q0 = self._eval(t0, k)
        q1 = np.where(valid, self._eval(t1, k), q0)
        lower, upper = linear_power_parts(t0, t1, q0, q1, c, s)
        return np.sum(lower, axis=-1), np.sum(upper, axis=-1)

    def quantile_integral(self, a, b):
        a, b = (np.asarray(v, dtype=float)[..., None] for v in np.broadcast_arrays(_arr(a), _arr(b)))
        t0 = np.maximum(a, self.tk[:-1])
        t1 = np.minimum(b, self.tk[1:])
        valid = t1 > t0
        k = np.arange(len(self.qa))
        mid = 0.5 * (t0 + t1)
        out = np.sum(np.where(valid, (t1 - t0) * self._eval(mid, k), 0.0), axis=-1)
        return _ret(out, a[..., 0])

    # absolutely continuous part: the strictly increasing pieces
    def _ac_segments(self):
        dq = self.qb - self.qa
        keep = dq > 0
        return self.qa[keep], self.qb[keep], self.widths[keep] / dq[keep]

    def density(self, x):
        x = _arr(x)
        lo, hi, dens = self._ac_segments()
        inside = (x[..., None] >= lo) & (x[..., None] < hi)
        return _ret(np.sum(np.where(inside, dens, 0.0), axis=-1), x)

    def ac_power_integral(self, q):
        lo, hi, dens = self._ac_segments()
        return float(np.sum((hi - lo) * dens**q))

    def tilted_quantile(self, t, r):
        lo, hi, dens = self._ac_segments()
        if len(lo) == 0:
            raise UnsupportedError(f"{self.kind}: no absolutely continuous part to tilt")
        mass = (hi - lo) * dens ** (1.0 / (r + 1))
        cum = np.r_[0.0, np.cumsum(mass)] / np.sum(mass)
        return _ret(_stitch(cum, lo, hi, _arr(t)), t)

    def inverse_measure_density(self, t):
        if np.any(self.qb - self.qa <= 0) or np.any(self.qa[1:] > self.qb[:-1]):
            raise UnsupportedError(f"{self.kind}: quantile has flat parts or jumps")
        t = _arr(t)
        k = np.clip(np.searchsorted(self.tk, t, side="right") - 1, 0, len(self.qa) - 1)
        return _ret(((self.qb - self.qa) / self.widths)[k], t)

    def to_json(self):
        if hasattr(self, "_knots_json"):
            return {"kind": self.kind, "knots": self._knots_json}
        raise NotImplementedError


def _stitch(cum, lo, hi, t):
    # piecewise-linear inverse of a tilted CDF whose support has gaps
    k = np.clip(np.searchsorted(cum, t, side="right") - 1, 0, len(lo) - 1)
    w = cum[k + 1] - cum[k]
    return lo[k] + (hi[k] - lo[k]) * (t - cum[k]) / w


class PointMass(PiecewiseLinearQuantile):
    kind = "point_mass"

    def __init__(self, a: float):
        self.a = float(a)
        super().__init__([0.0, 1.0], [self.a], [self.a])

    def to_json(self):
        return {"kind": self.kind, "a": self.a}


class Uniform(PiecewiseLinearQuantile):
    kind = "uniform"

    def __init__(self, a: float = 0.0, b: float = 1.0):
        if not b > a:
            raise SpecError("uniform needs a < b")
        self.a, self.b = float(a), float(b)
        super().__init__([0.0, 1.0], [self.a], [self.b])

    def to_json(self):
        return {"kind": self.kind, "a": self.a, "b": self.b}


class Discrete(PiecewiseLinearQuantile):
    kind = "discrete"

    def __init__(self, atoms, weights):
        x = np.asarray(atoms, dtype=float)
        p = np.asarray(weights, dtype=float)
        if x.ndim != 1 or x.shape != p.shape or len(x) == 0:
            raise SpecError("atoms and weights must be equal-length nonempty lists")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9 or not np.all(np.isfinite(x)):
            raise SpecError("weights must be nonnegative and sum to 1")
        order = np.argsort(x, kind="stable")
        x, p = x[order], p[order] / p.sum()
        keep = p > 0
        x, p = x[keep], p[keep]
        ux, inv = np.unique(x, return_inverse=True)
        up = np.bincount(inv, weights=p)
        self.atoms, self.weights = ux, up
        cum = np.r_[0.0, np.cumsum(up)]
        cum[-1] = 1.0
        # drop pieces that round to zero width
        keep = np.diff(cum) > 0
        knots = np.r_[0.0, cum[1:][keep]]
        knots[-1] = 1.0
        super().__init__(knots, ux[keep], ux[keep])

    @classmethod
    def from_cumulative(cls, x, P):
        """Atoms x (sorted) at the exact cumulative levels P_0 = 0 < ... ; zero-width slots are dropped."""
        x = np.asarray(x, dtype=float)
        P = np.asarray(P, dtype=float)
        pos = np.diff(P) > 0
        obj = cls(x[pos], np.diff(P)[pos] / (P[-1] - P[0]))
        # rebuild the knots from P itself so that levels match bit for bit
        xs, Ps = x[pos], np.r_[P[0], P[1:][pos]]
        last = np.r_[xs[1:] != xs[:-1], True]
        knots = np.r_[0.0, Ps[1:][last]]
        knots[-1] = 1.0
        ux = xs[last]
        PiecewiseLinearQuantile.__init__(obj, knots, ux, ux)
        return obj

    def density(self, x):
        raise UnsupportedError("discrete measure has no density")

    def ac_power_integral(self, q):
        return 0.0

    def tilted_quantile(self, t, r):
        raise UnsupportedError("discrete measure has no density to tilt")

    def to_json(self):
        return {"kind": self.kind, "atoms": self.atoms.tolist(), "weights": self.weights.tolist()}


class LebesguePlusAtoms(PiecewiseLinearQuantile):
    """Sum of uniform masses on intervals and point masses."""

    kind = "lebesgue_plus_atoms"

    def __init__(self, intervals=(), atoms=()):
        ivs = [(float(a), float(b), float(m)) for a, b, m in intervals]
        ats = [(float(x), float(m)) for x, m in atoms]
        if any(not b > a or m < 0 for a, b, m in ivs) or any(m < 0 for _, m in ats):
            raise SpecError("intervals need a < b and masses must be nonnegative")
        total = sum(m for *_, m in ivs) + sum(m for _, m in ats)
        if abs(total - 1.0) > 1e-9:
            raise SpecError(f"total mass is {total}, expected 1")
        self.intervals, self.atom_list = tuple(ivs), tuple(ats)
        xs = sorted({v for a, b, _ in ivs for v in (a, b)} | {x for x, m in ats if m > 0})
        dens = np.array([sum(m / (b - a) for a, b, m in ivs if a <= lo and hi <= b) for lo, hi in zip(xs[:-1], xs[1:])])
        atom_mass = {x: 0.0 for x in xs}
        for x, m in ats:
            atom_mass[x] += m
        knots, qa, qb = [0.0], [], []
        cum = 0.0

        def push(width, v0, v1):
            nonlocal cum
            if width <= 0:
                return
            cum += width
            knots.append(cum)
            qa.append(v0)
            qb.append(v1)

        for j, x in enumerate(xs):
            push(atom_mass[x] / total, x, x)
            if j < len(xs) - 1 and dens[j] > 0:
                push(dens[j] * (xs[j + 1] - x) / total, x, xs[j + 1])
        knots[-1] = 1.0
        super().__init__(knots, qa, qb)

    def to_json(self):
        return {
            "kind": self.kind,
            "intervals": [list(iv) for iv in self.intervals],
            "atoms": [list(at) for at in self.atom_list],
        }


# ---------------------------------------------------------------- smooth closed-form kinds


class Beta21(Measure):
    """Density 2x on [0, 1]: F(x) = x^2, Q(t) = sqrt(t)."""

    kind = "beta_2_1"

    def _q(self, t):
        return np.sqrt(np.clip(t, 0.0, 1.0))

    def _cdf(self, x):
        return np.clip(x, 0.0, 1.0) ** 2

    def power_parts(self, a, b, c, s):
        a, b, c = np.broadcast_arrays(_arr(a), _arr(b), _arr(c))
        ua, ub = np.sqrt(a), np.sqrt(np.maximum(a, b))
        uc = np.clip(c, ua, ub)
        # substitute t = u^2: int 2u (c-u)^s du and int 2u (u-c)^s du
        w1, w2 = np.maximum(c - ua, 0.0), np.maximum(c - uc, 0.0)
        lower = 2 * (c * (w1 ** (s + 1) - w2 ** (s + 1)) / (s + 1) - (w1 ** (s + 2) - w2 ** (s + 2)) / (s + 2))
        v1, v2 = np.maximum(uc - c, 0.0), np.maximum(ub - c, 0.0)
        upper = 2 * ((v2 ** (s + 2) - v1 ** (s + 2)) / (s + 2) + c * (v2 ** (s + 1) - v1 ** (s + 1)) / (s + 1))
        return np.maximum(lower, 0.0), np.maximum(upper, 0.0)

    def density(self, x):
        x = _arr(x)
        return _ret(np.where((x >= 0) & (x <= 1), 2 * x, 0.0), x)

    def inverse_measure_density(self, t):
        t = _arr(t)
        return _ret(0.5 / np.sqrt(t), t)

    def ac_power_integral(self, q):
        return 2.0**q / (q + 1)

    def tilted_quantile(self, t, r):
        return _ret(_arr(t) ** ((r + 1) / (r + 2)), t)

    def to_json(self):
        return {"kind": self.kind}


def _exp_series(W, s):
    """int_0^W w^s e^w dw for W >= 0, by its everywhere-convergent power series."""
    W = np.asarray(W, dtype=float)
    if W.size == 0:
        return W.copy()
    wmax = float(np.max(W)) if W.size else 0.0
    nterms = int(math.e * wmax + 40)
    term = np.ones_like(W)
    total = term / (s + 1)
    for k in range(1, nterms):
        term = term * W / k
        total = total + term / (s + 1 + k)
    return W ** (s + 1) * total


class Exponential(Measure):
    """Rate-one exponential: Q(t) = -log(1-t)."""

    kind = "exponential"

    def _q(self, t):
        with np.errstate(divide="ignore"):
            return -np.log1p(-t)

    def _cdf(self, x):
        return np.where(x > 0, -np.expm1(-np.maximum(x, 0.0)), 0.0)

    def power_parts(self, a, b, c, s):
        a, b, c = np.broadcast_arrays(_arr(a), _arr(b), _arr(c))
        ya, yb = self._q(a), self._q(np.maximum(a, b))
        yc = np.clip(c, ya, yb)
        # upper part: e^{-c} int_{yc-c}^{yb-c} w^s e^{-w} dw
        lo_arg = yc - c
        hi_arg = yb - c
        g = special.gamma(s + 1)
        with np.errstate(invalid="ignore", over="ignore"):
            use_cc = lo_arg > s + 1
            diff_p = special.gammainc(s + 1, np.where(np.isinf(hi_arg), 1e300, hi_arg)) - special.gammainc(s + 1, lo_arg)
            diff_q = special.gammaincc(s + 1, lo_arg) - special.gammaincc(s + 1, np.where(np.isinf(hi_arg), 1e300, hi_arg))
            diff = np.where(use_cc, diff_q, diff_p)
            upper = np.where(diff > 0, np.exp(-c + np.log(np.where(diff > 0, diff, 1.0))), 0.0) * g
        # lower part: e^{-c} int_{W2}^{W1} w^s e^{w} dw with W = c - y
        W1 = np.maximum(c - ya, 0.0)
        W2 = np.maximum(c - yc, 0.0)
        lower = np.exp(-c) * (_exp_series(W1, s) - _exp_series(W2, s))
        lower = np.where(W1 > W2, lower, 0.0)
        return np.maximum(lower, 0.0), np.maximum(upper, 0.0)

    def density(self, x):
        x = _arr(x)
        return _ret(np.where(x >= 0, np.exp(-np.maximum(x, 0.0)), 0.0), x)

    def inverse_measure_density(self, t):
        t = _arr(t)
        return _ret(1.0 / (1.0 - t), t)

    def ac_power_integral(self, q):
        return 1.0 / q

    def tilted_quantile(self, t, r):
        return _ret(-(r + 1) * np.log1p(-_arr(t)), t)

    def to_json(self):
        return {"kind": self.kind}


class StandardNormal(Measure):
    kind = "standard_normal"

    def _q(self, t):
        return special.ndtri(t)

    def _cdf(self, x):
        return special.ndtr(x)

    def power_parts(self, a, b, c, s):
        a, b, c = np.broadcast_arrays(_arr(a), _arr(b), _arr(c))
        lower = np.zeros(a.shape)
        upper = np.zeros(a.shape)
        for idx in np.ndindex(a.shape):
            lower[idx], upper[idx] = self._parts_y(float(a[idx]), float(b[idx]), float(c[idx]), s)
        return lower, upper

    def _parts_y(self, a, b, c, s):
        # substitute t = Phi(y): int (c-y)_+^s phi(y) dy over [Phi^-1(a), Phi^-1(b)]
        if b <= a:
            return 0.0, 0.0
        ya = max(float(special.ndtri(a)), -40.0)
        yb = min(float(special.ndtri(b)), 40.0)
        yc = min(max(c, ya), yb)
        phi = lambda y: np.exp(-0.5 * y * y) / math.sqrt(2 * math.pi)
        if s == 1.0:
            lower = (c * (special.ndtr(yc) - special.ndtr(ya)) - (phi(ya) - phi(yc))) if yc > ya else 0.0
            upper = ((phi(yc) - phi(yb)) - c * (special.ndtr(yb) - special.ndtr(yc))) if yb > yc else 0.0
            return max(float(lower), 0.0), max(float(upper), 0.0)
        lv = quadrature.adaptive(lambda y: (c - y) ** s * phi(y), ya, yc)[0] if yc > ya else 0.0
        uv = quadrature.adaptive(lambda y: (y - c) ** s * phi(y), yc, yb)[0] if yb > yc else 0.0
        return lv, uv

    def density(self, x):
        x = _arr(x)
        return _ret(np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi), x)

    def inverse_measure_density(self, t):
        y = special.ndtri(_arr(t))
        return _ret(math.sqrt(2 * math.pi) * np.exp(0.5 * y * y), t)

    def ac_power_integral(self, q):
        return (2 * math.pi) ** (0.5 * (1 - q)) / math.sqrt(q)

    def tilted_quantile(self, t, r):
        return _ret(math.sqrt(r + 1) * special.ndtri(_arr(t)), t)

    def to_json(self):
        return {"kind": self.kind}


# ---------------------------------------------------------------- Cantor-type kinds


class _SelfSimilarMeasure(Measure):
    """Measure whose quantile is a self-similar function on [0, 1]."""

    def __init__(self, digit_depth: int = 48):
        if int(digit_depth) < 1:
            raise SpecError("digit_depth must be positive")
        self.digit_depth = int(digit_depth)

    @cached_property
    def engine(self):
        raise NotImplementedError

    def _q(self, t):
        return self.engine.evaluate(np.clip(t, 0.0, 1.0), "right").reshape(np.shape(t))

    def _q_left(self, t):
        return self.engine.evaluate(np.clip(t, 0.0, 1.0), "left").reshape(np.shape(t))

    def _cdf(self, x):
        return self.engine.cdf(x).reshape(np.shape(x))

    def _cdf_left(self, x):
        return self.engine.cdf(x, strict=True).reshape(np.shape(x))

    def power_parts(self, a, b, c, s):
        if float(s) != int(s):
            a, b, c = np.broadcast_arrays(_arr(a), _arr(b), _arr(c))
            lower = np.zeros(a.shape)
            upper = np.zeros(a.shape)
            for idx in np.ndindex(a.shape):
                lower[idx], upper[idx] = self.engine.power_integrals(float(a[idx]), float(b[idx]), float(c[idx]), float(s))
            return lower, upper
        s = int(s)
        a, b, c = np.broadcast_arrays(_arr(a), _arr(b), _arr(c))
        shape = a.shape
        a, b, c = a.ravel(), np.maximum(a, b).ravel(), c.ravel()
        tc = np.clip(self.engine.cdf(c), a, b)
        pts = np.concatenate([a, tc, b])
        mom = self.engine.partial_moments(pts, s)
        n = len(a)
        ma, mc, mb = mom[:n], mom[n : 2 * n], mom[2 * n :]
        j = np.arange(s + 1)
        binom = np.array([comb(s, i) for i in j], dtype=float)
        # (c - Q)^s = sum_j C(s,j) c^(s-j) (-Q)^j and (Q - c)^s = sum_j C(s,j) (-c)^(s-j) Q^j
        cpow = c[:, None] ** (s - j)
        lower = np.sum(binom * cpow * (-1.0) ** j * (mc - ma), axis=1)
        upper = np.sum(binom * cpow * (-1.0) ** (s - j) * (mb - mc), axis=1)
        return np.maximum(lower, 0.0).reshape(shape), np.maximum(upper, 0.0).reshape(shape)

    def support_bounds(self):
        return 0.0, 1.0

    def ac_power_integral(self, q):
        return 0.0

    def to_json(self):
        return {"kind": self.kind, "digit_depth": self.digit_depth}


class Cantor(_SelfSimilarMeasure):
    """Cantor measure: F is the Cantor function; Q maps binary digits to ternary digits {0, 2}."""

    kind = "cantor"

    @cached_property
    def engine(self):
        return binary_to_ternary_quantile(self.digit_depth)


class InverseCantor(_SelfSimilarMeasure):
    """Measure whose quantile is the Cantor function; atoms 3^-m at odd multiples of 2^-m."""

    kind = "inverse_cantor"

    @cached_property
    def engine(self):
        return cantor_function_quantile(self.digit_depth)


# ---------------------------------------------------------------- JSON


def measure_from_json(obj) -> Measure:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SpecError("measure spec must be an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "point_mass":
            return PointMass(obj["a"])
        if kind == "uniform":
            return Uniform(obj.get("a", 0.0), obj.get("b", 1.0))
        if kind == "exponential":
            return Exponential()
        if kind == "standard_normal":
            return StandardNormal()
        if kind == "beta_2_1":
            return Beta21()
        if kind == "discrete":
            if np.any(np.diff(np.asarray(obj["atoms"], dtype=float)) <= 0):
                raise SpecError("discrete atoms must be strictly increasing")
            return Discrete(obj["atoms"], obj["weights"])
        if kind == "lebesgue_plus_atoms":
            return LebesguePlusAtoms(obj.get("intervals", []), obj.get("atoms", []))
        if kind == "piecewise_linear_quantile":
            return PiecewiseLinearQuantile.from_knots(obj["knots"])
        if kind == "cantor":
            return Cantor(obj.get("digit_depth", 48))
        if kind == "inverse_cantor":
            return InverseCantor(obj.get("digit_depth", 48))
        if kind == "slow_decay":
            from .asymptotics import slow_decay_measure

            return slow_decay_measure(obj["a"], obj.get("r", 1.0), obj.get("K", len(obj["a"])))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"bad {kind} spec: {exc}") from exc
    raise SpecError(f"unknown measure kind {kind!r}")
