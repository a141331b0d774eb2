"""Adaptive Gauss-Legendre quadrature with geometric endpoint refinement.

This is the reference integrator behind every quantity that has no
closed form. Panels are refined globally by largest error estimate; the
error of a panel is the gap between its 15-point rule and the sum of the
rules on its two halves.
"""
import heapq
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NumericalError

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class QuadConfig:
    rtol: float = 1e-10
    atol: float = 1e-300
    max_depth: int = 60
    max_panels: int = 4000


def _gl(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.asarray(f(mid + half * _NODES), dtype=float)
    return half * float(np.dot(_WEIGHTS, vals))


def _panel(f, a, b):
    whole = _gl(f, a, b)
    m = 0.5 * (a + b)
    left = _gl(f, a, m)
    right = _gl(f, m, b)
    return left + right, abs(whole - left - right)


def adaptive(f, a, b, cfg: QuadConfig = QuadConfig()):
    """Integrate a vectorised callable over a finite interval; returns (value, error)."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("adaptive() needs finite limits")
    if b <= a:
        return 0.0, 0.0
    val, err = _panel(f, a, b)
    heap = [(-err, a, b, 0, val)]
    total, total_err = val, err
    n_panels = 1
    while total_err > max(cfg.atol, cfg.rtol * abs(total)):
        if n_panels >= cfg.max_panels:
            break
        neg_err, lo, hi, depth, v = heapq.heappop(heap)
        if depth >= cfg.max_depth:
            # keep the panel but stop refining it
            heapq.heappush(heap, (0.0, lo, hi, depth, v))
            if all(item[0] == 0.0 for item in heap):
                break
            continue
        m = 0.5 * (lo + hi)
        v1, e1 = _panel(f, lo, m)
        v2, e2 = _panel(f, m, hi)
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, m, depth + 1, v1))
        heapq.heappush(heap, (-e2, m, hi, depth + 1, v2))
        n_panels += 1
    if not math.isfinite(total):
        raise NumericalError("quadrature produced a non-finite value")
    return total, max(total_err, 0.0)


def toward_endpoint(f, a, b, side: str, cfg: QuadConfig = QuadConfig(), max_levels: int = 3000):
    """Integrate over (a, b) with a possibly singular endpoint on ``side`` ('left' / 'right').

    Geometric panels shrink toward the endpoint; the tail is accepted when
    the extrapolated remainder is below ``1e-12`` of the running total and
    declared divergent when panel contributions stop decreasing.
    Returns (value, error); value is ``inf`` for a divergent positive integrand.
    """
    w = b - a
    total, err = 0.0, 0.0
    prev = None
    growth_run = 0
    prev_ratio = 1.0
    for k in range(max_levels):
        if side == "left":
            lo, hi = a + w * 2.0 ** (-k - 1), a + w * 2.0**-k
        else:
            lo, hi = b - w * 2.0**-k, b - w * 2.0 ** (-k - 1)
        if hi <= lo or (side == "left" and lo <= a) or (side == "right" and hi >= b):
            break  # the next panel would touch the endpoint itself
        # panels only need accuracy relative to the running total
        level_cfg = replace(cfg, atol=max(cfg.atol, 0.1 * cfg.rtol * abs(total)))
        v, e = adaptive(f, lo, hi, level_cfg)
        total += v
        err += e
        c = abs(v)
        if prev is not None and prev > 0:
            ratio = c / prev
            if ratio >= 1.0 and k > 8:
                growth_run += 1
                if growth_run >= 6:
                    return math.copysign(math.inf, total), math.inf
            else:
                growth_run = 0
            # one sudden drop is not yet a geometric tail; use the worse of two ratios
            q = max(ratio, prev_ratio)
            prev_ratio = ratio
            if q < 1.0:
                remainder = c * q / (1.0 - q)
                if remainder <= 1e-12 * abs(total) or c == 0.0:
                    err += remainder
                    return total, err
        elif c == 0.0 and k > 2:
            return total, err
        prev = c
    return total, err + (prev or 0.0)


def integrate(f, a, b, singular_left=False, singular_right=False, cfg: QuadConfig = QuadConfig()):
    """Integrate ``f`` over (a, b), refining geometrically toward flagged endpoints."""
    if b <= a:
        return 0.0, 0.0
    if not singular_left and not singular_right:
        return adaptive(f, a, b, cfg)
    if singular_left and singular_right:
        m = 0.5 * (a + b)
        v1, e1 = toward_endpoint(f, a, m, "left", cfg)
        v2, e2 = toward_endpoint(f, m, b, "right", cfg)
        return v1 + v2, e1 + e2
    return toward_endpoint(f, a, b, "left" if singular_left else "right", cfg)
