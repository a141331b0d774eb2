"""Best n-point approximations with the atoms or the weights held fixed.

Given atoms x, the optimal cumulative weights put P_i in the quantile set
of Q at the mid-point (x_i + x_{i+1}) / 2, i.e. P_i = F((x_i + x_{i+1}) / 2)
by default; this does not depend on r. Given weights, each atom is the
best L^r constant for Q restricted to its slot [P_{i-1}, P_i].
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import NumericalError, SpecError
from .metric import StepApprox, distance_r
from .step_fit import QuantileSegment, tau_r

MAX_PERMUTATION_N = 9


def _check_r(r):
    if not (r >= 1):
        raise SpecError(f"exponent r must be >= 1, got {r}")


def optimal_cumulative_weights(mu, x, selector="max"):
    """Cumulative weights (P_0, ..., P_n) optimal for sorted atoms x; duplicates share their slot evenly."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or len(x) == 0 or np.any(np.diff(x) < 0) or not np.all(np.isfinite(x)):
        raise SpecError("locations must be a nonempty sorted list of finite reals")
    ux, counts = np.unique(x, return_counts=True)
    mids = 0.5 * (ux[:-1] + ux[1:])
    if selector == "max":
        inner = mu._cdf(mids)
    elif selector == "min":
        inner = mu._cdf_left(mids)
    elif selector == "mid":
        inner = 0.5 * (mu._cdf(mids) + mu._cdf_left(mids))
    else:
        raise SpecError(f"unknown selector {selector!r}")
    pbar = np.r_[0.0, np.maximum.accumulate(np.clip(inner, 0.0, 1.0)), 1.0]
    P = [0.0]
    for j, c in enumerate(counts):
        step = (pbar[j + 1] - pbar[j]) / c
        P.extend(pbar[j] + step * np.arange(1, c + 1))
    P = np.asarray(P)
    P[-1] = 1.0
    return P


def best_given_locations(mu, x, r: float, selector: str = "max") -> StepApprox:
    _check_r(r)
    P = optimal_cumulative_weights(mu, x, selector)
    approx = StepApprox.from_cumulative(np.asarray(x, dtype=float), P)
    return approx.with_distance(distance_r(mu, approx, r), r)


def _check_weights(p):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or len(p) == 0 or np.any(p < 0) or not np.all(np.isfinite(p)):
        raise SpecError("weights must be a nonempty list of nonnegative reals")
    if abs(p.sum() - 1.0) > 1e-9:
        raise SpecError(f"weights sum to {p.sum()}, expected 1")
    return p / p.sum()


def segment_constants(mu, a, b, r, selector="min", xtol=1e-12):
    """Best L^r constant of Q_mu on each slot [a_i, b_i] (all of positive length), vectorised."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = _segment_constants(mu, a, b, r, selector, xtol)
    # the constant lies in the range of Q on the slot; clipping removes roundoff
    # that would otherwise split a repeated atom into two nearly equal ones
    lo = np.asarray(mu._q(a), dtype=float)
    hi = np.asarray(mu._q_left(b), dtype=float)
    return np.clip(c, np.where(np.isfinite(lo), lo, -np.inf), np.where(np.isfinite(hi), hi, np.inf))


def _segment_constants(mu, a, b, r, selector, xtol):
    if r == 1:
        m = 0.5 * (a + b)
        lo = mu._q_left(m)
        hi = mu._q(m)
        return {"min": lo, "max": hi, "mid": 0.5 * (lo + hi)}[selector]
    if r == 2:
        return np.asarray(mu.quantile_integral(a, b), dtype=float) / (b - a)
    if math.isinf(r):
        return 0.5 * (mu._q(a) + mu._q_left(b))
    return _bisect_constants(mu, a, b, r, xtol)


def _bisect_constants(mu, a, b, r, xtol):
    def g(t):
        lower, upper = mu.power_parts(a, b, t, r - 1.0)
        return lower - upper

    lo = np.asarray(mu._q(a), dtype=float).copy()
    hi = np.asarray(mu._q_left(b), dtype=float).copy()
    w = b - a
    lo = np.where(np.isfinite(lo), lo, mu._q(a + 1e-3 * w))
    hi = np.where(np.isfinite(hi), hi, mu._q_left(b - 1e-3 * w))
    span = np.maximum(hi - lo, 1.0)
    for k in range(200):
        bad = g(lo) > 0
        if not bad.any():
            break
        lo = np.where(bad, lo - span * 2.0**k, lo)
    for k in range(200):
        bad = g(hi) < 0
        if not bad.any():
            break
        hi = np.where(bad, hi + span * 2.0**k, hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if np.all((hi - lo <= xtol) | (mid == lo) | (mid == hi)):
            break
        gm = g(mid)
        lo = np.where(gm < 0, mid, lo)
        hi = np.where(gm > 0, mid, hi)
        exact = gm == 0
        lo = np.where(exact, mid, lo)
        hi = np.where(exact, mid, hi)
    out = 0.5 * (lo + hi)
    if not np.all(np.isfinite(out)):
        raise NumericalError("best constant diverged on some slot")
    return out


def atoms_for_cumulative(mu, P, r, selector="min"):
    """Optimal atoms for cumulative weights P. Zero-weight atoms copy their positive neighbour."""
    P = np.asarray(P, dtype=float)
    pos = np.flatnonzero(P[1:] > P[:-1])
    x = np.empty(len(P) - 1)
    x[pos] = segment_constants(mu, P[pos], P[pos + 1], r, selector)
    # zero-weight atoms sit on the previous positive atom (or the next one at the start)
    last = None
    for i in range(len(x)):
        if P[i + 1] > P[i]:
            last = x[i]
        elif last is not None:
            x[i] = last
    x[: pos[0]] = x[pos[0]]
    return np.maximum.accumulate(x)


def best_given_weights(mu, p, r: float, selector: str = "min") -> StepApprox:
    """Optimal atoms for fixed weights."""
    _check_r(r)
    p = _check_weights(p)
    P = np.r_[0.0, np.cumsum(p)]
    P[-1] = 1.0
    P = np.minimum(P, 1.0)
    x = atoms_for_cumulative(mu, P, r, selector)
    approx = StepApprox.from_cumulative(x, P)
    return approx.with_distance(distance_r(mu, approx, r), r)


def best_uniform(mu, n: int, r: float) -> StepApprox:
    """Best approximation with n equal weights."""
    if int(n) < 1:
        raise SpecError("n must be positive")
    return best_given_weights(mu, np.full(int(n), 1.0 / int(n)), r)


def best_weights_over_orderings(mu, p, r: float, mode: str = "all_permutations") -> StepApprox:
    """Best approximation over the orderings of a weight vector.

    mode='all_permutations' tries every distinct ordering (n <= 9);
    'sorted_only' uses the nondecreasing rearrangement alone.
    """
    p = _check_weights(p)
    if mode == "sorted_only":
        return best_given_weights(mu, np.sort(p), r)
    if mode != "all_permutations":
        raise SpecError(f"unknown mode {mode!r}")
    if len(p) > MAX_PERMUTATION_N:
        raise SpecError(f"permutation search limited to n <= {MAX_PERMUTATION_N}")
    best = None
    for perm in sorted(set(itertools.permutations(p.tolist()))):
        cand = best_given_weights(mu, np.asarray(perm), r)
        if best is None or cand.achieved_distance < best.achieved_distance - 1e-15:
            best = cand
    return best


def slot_segment(mu, approx: StepApprox, i: int) -> QuantileSegment:
    """The quantile of mu restricted to approx's i-th slot."""
    P = approx.P
    return QuantileSegment(mu, P[i], P[i + 1])


def tau_on_slot(mu, a, b, r):
    """Scalar convenience wrapper around tau_r on a quantile segment."""
    return tau_r(QuantileSegment(mu, a, b), r)
