"""Exact integrals of powers of affine functions.

Everything piecewise-linear in the package (step quantiles, mixed
Lebesgue/atom quantiles, piecewise-affine functions) reduces to the
integrals below, so they are written once, vectorised and with a
series fallback for nearly-constant pieces.
"""
import numpy as np


def mean_power(u, v, s):
    """Average of g**s over an interval on which g is affine from u to v (u, v >= 0)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    w = 0.5 * (lo + hi)
    d = hi - lo
    close = d <= 1e-5 * w
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = (hi ** (s + 1) - lo ** (s + 1)) / ((s + 1) * d)
        # expansion of the average around the midpoint, accurate to O((d/w)^4)
        z = np.where(w > 0, d / w, 0.0)
        series = w**s * (1.0 + s * (s - 1) * z * z / 24.0)
    out = np.where(close, series, exact)
    return np.where(hi == 0, 0.0, out)


def linear_power_parts(t0, t1, q0, q1, c, s):
    """Split integral of an affine function against a level.

    The function g runs affinely from ``q0`` at ``t0`` to ``q1`` at ``t1``.
    Returns ``(lower, upper)`` with lower = int (c - g)_+^s and
    upper = int (g - c)_+^s over [t0, t1]. All arguments broadcast.
    """
    t0, t1, q0, q1, c = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (t0, t1, q0, q1, c)))
    length = np.maximum(t1 - t0, 0.0)
    dq = q1 - q0
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(dq != 0, (c - q0) / dq, 0.0)
    frac = np.clip(frac, 0.0, 1.0)
    # fraction of the interval where g < c
    below = np.where(dq > 0, frac, np.where(dq < 0, 1.0 - frac, (q0 < c).astype(float)))
    # value of g at the crossing (or the relevant endpoint)
    gc = q0 + frac * dq
    lo_val = np.where(dq >= 0, q0, q1)  # value of g at the 'low' end of the below-part
    hi_val = np.where(dq >= 0, q1, q0)
    lower = below * length * mean_power(np.maximum(c - lo_val, 0.0), np.maximum(c - np.where(dq != 0, gc, lo_val), 0.0), s)
    upper = (1.0 - below) * length * mean_power(np.maximum(np.where(dq != 0, gc, hi_val) - c, 0.0), np.maximum(hi_val - c, 0.0), s)
    return lower, upper


def linear_log_parts(t0, t1, q0, q1, c, floor=1e-300):
    """int log(c - g) over {g < c} and int log(g - c) over {g > c} for affine g.

    Arguments are scalars. Logs are clamped at ``log(floor)`` only where the
    closed form would hit log(0) on a set of positive length.
    """
    length = t1 - t0
    if length <= 0:
        return 0.0, 0.0
    dq = q1 - q0

    def int_log_affine(a, b):
        # int over an interval of unit-normalised length of log of an affine
        # function going from a to b (both >= 0), times the length later
        if a == b:
            return np.log(max(a, floor))
        lo, hi = min(a, b), max(a, b)
        f = lambda z: z * np.log(z) - z if z > 0 else 0.0
        return (f(hi) - f(lo)) / (hi - lo)

    if dq == 0:
        if q0 < c:
            return length * np.log(max(c - q0, floor)), 0.0
        if q0 > c:
            return 0.0, length * np.log(max(q0 - c, floor))
        # flat piece sitting exactly on the level: both logs are -inf there
        return length * np.log(floor), 0.0
    frac = min(max((c - q0) / dq, 0.0), 1.0)
    gc = q0 + frac * dq
    below = frac if dq > 0 else 1.0 - frac
    lo_end, hi_end = (q0, q1) if dq > 0 else (q1, q0)
    lower = below * length * int_log_affine(c - lo_end, c - gc) if below > 0 else 0.0
    upper = (1 - below) * length * int_log_affine(gc - c, hi_end - c) if below < 1 else 0.0
    return lower, upper
