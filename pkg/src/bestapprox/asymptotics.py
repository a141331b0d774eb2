"""Rates of convergence of best n-point approximations.

Rate sweeps over n for several approximation schemes, the two limit
constants (equal-weight and free), the tilted location scheme, a
log-log dimension estimate, and a discrete measure whose best
approximation error decays no faster than a prescribed sequence.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .constrained import best_given_locations, best_given_weights, best_uniform
from .errors import SpecError
from .measures import Discrete
from .metric import StepApprox, distance_r
from .unconstrained import SolverConfig, best_free

REGIMES = ("uniform", "free", "locations_scheme", "weights_scheme", "asym_scheme")
DEFAULT_N = (1, 2, 4, 8, 16, 32, 64, 128, 256)
CANTOR_N = (1, 3, 9, 27, 81, 243)


@dataclass(frozen=True)
class RateSeries:
    n_values: np.ndarray
    d_values: np.ndarray
    regime: str
    r: float
    fitted_exponent: float
    fitted_constant: float
    log_correction_exponent: float | None = None

    def rows(self):
        for n, d in zip(self.n_values, self.d_values):
            yield int(n), float(d), float(n * d), float(n**self.fitted_exponent * d)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "d_r", "n_times_d", "n_pow_fit"])
        for n, d, nd, npw in self.rows():
            w.writerow([n, f"{d:.17g}", f"{nd:.17g}", f"{npw:.17g}"])
        return buf.getvalue()


def fit_power_law(n_values, d_values, log_correction: float | None = None):
    """Least-squares fit of d ~ C n^(-alpha) (log n)^kappa on the upper half of the n values.

    kappa is fixed (not fitted) when given. Returns (alpha, C).
    """
    n = np.asarray(n_values, dtype=float)
    d = np.asarray(d_values, dtype=float)
    keep = d > 0
    if log_correction is not None:
        keep &= n > 1
    n, d = n[keep], d[keep]
    if len(n) < 2:
        return math.nan, math.nan
    half = len(n) // 2 if len(n) >= 4 else 0
    n, d = n[half:], d[half:]
    y = np.log(d)
    if log_correction is not None:
        y = y - log_correction * np.log(np.log(n))
    slope, intercept = np.polyfit(np.log(n), y, 1)
    return float(-slope), float(math.exp(intercept))


def fit_log_exponent(n_values, d_values, alpha: float) -> float:
    """Slope kappa in d ~ C n^(-alpha) (log n)^kappa with alpha held fixed; upper half of the n values."""
    n = np.asarray(n_values, dtype=float)
    d = np.asarray(d_values, dtype=float)
    keep = (d > 0) & (n > 2)
    n, d = n[keep], d[keep]
    half = len(n) // 2 if len(n) >= 4 else 0
    n, d = n[half:], d[half:]
    slope, _ = np.polyfit(np.log(np.log(n)), np.log(d) + alpha * np.log(n), 1)
    return float(slope)


def scheme_approximation(mu, n: int, r: float, regime: str, cfg: SolverConfig = SolverConfig()) -> StepApprox:
    """The n-point approximation a regime uses at size n."""
    if regime == "uniform":
        return best_uniform(mu, n, r)
    if regime == "free":
        return best_free(mu, n, r, cfg)
    if regime == "locations_scheme":
        # atoms at the mid-slot quantiles, weights optimised for them
        u = (2 * np.arange(1, n + 1) - 1) / (2 * n)
        return best_given_locations(mu, np.asarray(mu._q_left(u), dtype=float), r)
    if regime == "weights_scheme":
        # equal weights at the atoms that are optimal for r = 1, measured in d_r
        base = best_given_weights(mu, np.full(n, 1.0 / n), 1.0)
        return base.with_distance(distance_r(mu, base, r), r)
    if regime == "asym_scheme":
        return best_given_locations(mu, asym_best_locations(mu, n, r), r)
    raise SpecError(f"unknown regime {regime!r}; expected one of {REGIMES}")


def rate_sweep(mu, r: float, regime: str, n_values=DEFAULT_N, cfg: SolverConfig = SolverConfig(), log_correction: float | None = None) -> RateSeries:
    if regime not in REGIMES:
        raise SpecError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    ns = np.array(sorted({int(n) for n in n_values}))
    if len(ns) == 0 or ns[0] < 1:
        raise SpecError("n values must be positive integers")
    ds = np.array([scheme_approximation(mu, int(n), r, regime, cfg).achieved_distance for n in ns])
    alpha, const = fit_power_law(ns, ds, log_correction)
    return RateSeries(ns, ds, regime, float(r), alpha, const, log_correction)


def _prefactor(r):
    return 1.0 / (2.0 * (r + 1.0) ** (1.0 / r))


def uniform_rate_limit(mu, r: float) -> float:
    """lim n d_r(best equal-weight n-point approximation) = || Q' ||_r / (2 (r+1)^(1/r)); inf when divergent."""
    if not r >= 1 or math.isinf(r):
        raise SpecError("need finite r >= 1")
    mu.inverse_measure_density(0.5)  # raises for kinds without one
    lo, hi = mu.support_bounds()
    if math.isinf(lo) or math.isinf(hi):
        # int |Q'|^r >= (int |Q'|)^r = length of the support
        return math.inf
    f = lambda t: np.asarray(mu.inverse_measure_density(t), dtype=float) ** r
    val, _ = quadrature.integrate(f, 0.0, 1.0, True, True, quadrature.QuadConfig(rtol=1e-13))
    if math.isinf(val):
        return math.inf
    return _prefactor(r) * val ** (1.0 / r)


def zador_limit(mu, r: float) -> float:
    """lim n d_r(best free n-point approximation) = (int rho^(1/(r+1)))^((r+1)/r) / (2 (r+1)^(1/r)), rho the a.c. density."""
    if not r >= 1 or math.isinf(r):
        raise SpecError("need finite r >= 1")
    return _prefactor(r) * mu.ac_power_integral(1.0 / (r + 1.0)) ** ((r + 1.0) / r)


def asym_best_locations(mu, n: int, r: float) -> np.ndarray:
    """Atoms at levels i/(n+1), i = 1..n, of the measure with density proportional to rho^(1/(r+1))."""
    u = np.arange(1, int(n) + 1) / (int(n) + 1)
    return np.asarray(mu.tilted_quantile(u, r), dtype=float)


@dataclass(frozen=True)
class DimensionEstimate:
    dimension: float
    residual: float
    series: RateSeries


def dimension_from_series(series: RateSeries) -> DimensionEstimate:
    """Least-squares slope of log n against -log d_r over the upper half of the sweep."""
    n = np.asarray(series.n_values, dtype=float)
    d = np.asarray(series.d_values, dtype=float)
    keep = (d > 0) & (n > 1)
    n, d = n[keep], d[keep]
    half = len(n) // 2 if len(n) >= 4 else 0
    x, y = -np.log(d[half:]), np.log(n[half:])
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    resid = float(math.sqrt(res[0] / len(x))) if len(res) else 0.0
    return DimensionEstimate(float(coef[0]), resid, series)


def quantization_dimension(source, r: float | None = None, regime: str = "free", n_values=None, cfg: SolverConfig = SolverConfig()) -> DimensionEstimate:
    """Dimension estimate from a RateSeries, or from a measure by first running a sweep."""
    if isinstance(source, RateSeries):
        return dimension_from_series(source)
    if r is None:
        raise SpecError("a measure needs an exponent r")
    if n_values is None:
        n_values = CANTOR_N if source.kind in ("cantor", "inverse_cantor") else DEFAULT_N
    return dimension_from_series(rate_sweep(source, r, regime, n_values, cfg))


# ---------------------------------------------------------------- slow decay


def convex_envelope(values) -> np.ndarray:
    """Smallest sequence b >= values (backward greedy) with b and its differences b_n - b_{n+1} nonincreasing.

    The last entry is treated as followed by zero.
    """
    a = np.asarray(values, dtype=float)
    mono = np.maximum.accumulate(a[::-1])[::-1]
    b = np.empty_like(mono)
    b[-1] = mono[-1]
    gap = b[-1]
    for k in range(len(b) - 2, -1, -1):
        b[k] = max(mono[k], b[k + 1] + gap)
        gap = b[k] - b[k + 1]
    return b


class SlowDecay(Discrete):
    """Discrete measure with d_r(best n-point approximation) >= envelope[n-1] up to truncation.

    Atom k (k = 1..K) sits at 3 * 2^(k-1) * c^(1/r) with mass
    2^(-(k-1) r) (a_{k-1}^r - a_k^r) / c, c normalising.
    """

    kind = "slow_decay"

    def __init__(self, a, r: float, K: int):
        if not r >= 1 or math.isinf(r):
            raise SpecError("need finite r >= 1")
        K = int(K)
        seq = [float(a(k)) for k in range(1, K + 2)] if callable(a) else [float(v) for v in a]
        if len(seq) < K or K < 2 or min(seq[:K]) <= 0:
            raise SpecError("need at least K >= 2 positive sequence values")
        if max(seq[1:K]) >= seq[0] or any(b > a for a, b in zip(seq, seq[1:K])):
            raise SpecError("sequence must be nonincreasing and decay below its first value")
        self.source, self.r, self.K = tuple(seq), float(r), K
        pw = np.array(seq[: K + 1]) ** r
        if len(pw) == K:
            pw = np.r_[pw, 0.0]
        env = convex_envelope(pw)  # env[j] corresponds to a_{j+1}^r
        a0 = env[0] + 2.0 * (env[0] - env[1])  # a_0^r: strictly larger first gap
        ar = np.r_[a0, env]
        k = np.arange(1, K + 1)
        raw = 2.0 ** (-(k - 1) * r) * (ar[:-1][:K] - ar[1:][:K])
        c = raw.sum()
        self.envelope = ar[1 : K + 1] ** (1.0 / r)
        self.a0 = a0 ** (1.0 / r)
        self.normaliser = c
        super().__init__(3.0 * 2.0 ** (k - 1) * c ** (1.0 / r), raw / c)

    def lower_bound(self, n: int) -> float:
        """(a_n^r - a_K^r)^(1/r): what the construction guarantees after truncation at K."""
        if n >= self.K:
            return 0.0
        return max(self.envelope[n - 1] ** self.r - self.envelope[self.K - 1] ** self.r, 0.0) ** (1.0 / self.r)

    def to_json(self):
        return {"kind": self.kind, "a": list(self.source), "r": self.r, "K": self.K}


def slow_decay_measure(a, r: float, K: int) -> SlowDecay:
    return SlowDecay(a, r, K)
