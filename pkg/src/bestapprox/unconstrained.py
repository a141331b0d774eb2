"""Best n-point approximation with both atoms and weights free.

The solver alternates the two constrained problems (weights for the
current atoms, then atoms for those weights), which never increases the
distance, from several seeded starts, and reports every distinct limit.
Two independent oracles are included for testing: a zooming grid search
for n <= 3 and an exact dynamic programme over contiguous clusters for
discrete measures.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .constrained import atoms_for_cumulative, optimal_cumulative_weights
from .errors import SpecError, UnsupportedError
from .measures import Discrete
from .metric import StepApprox, distance_r, panel_power_sum

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    starts: int = 16
    seed: int = 0
    max_iterations: int = 10_000
    convergence_tol: float = 1e-12  # on the largest atom / cumulative-weight move per sweep
    distance_every: int = 16
    weight_selector: str = "max"
    location_selector: str = "min"
    jitter: float | None = None  # width in quantile space; default 1 / (4n)
    dedup_tol: float = 1e-8
    swap_rounds: int = 8  # local-move passes per refined candidate; 0 disables
    refine_top: int = 3  # how many leading candidates get local moves
    swap_max_atoms: int = 12  # local moves cost O(n^2) Lloyd runs; skipped above this size


@dataclass(frozen=True)
class Candidate:
    approx: StepApprox
    converged: bool
    iterations: int
    start: int
    swapped: bool = False  # produced by relocating atoms of start's result


@dataclass(frozen=True)
class FreeSearch:
    best: StepApprox
    candidates: tuple = field(default_factory=tuple)


def _check_r(r):
    if not (r >= 1):
        raise SpecError(f"exponent r must be >= 1, got {r}")


def lloyd_step(mu, approx: StepApprox, r: float, cfg: SolverConfig = SolverConfig()) -> StepApprox:
    """One weights update for the current atoms followed by one atoms update for those weights."""
    _check_r(r)
    P = optimal_cumulative_weights(mu, approx.x, cfg.weight_selector)
    x = atoms_for_cumulative(mu, P, r, cfg.location_selector)
    out = StepApprox.from_cumulative(x, P)
    return out.with_distance(distance_r(mu, out, r), r)


def _candidate_sites(mu, grid=128):
    """Places where a missing atom may be re-seeded: a quantile grid plus known atoms and breakpoints."""
    u = (np.arange(grid) + 0.5) / grid
    sites = [np.asarray(mu._q(u), dtype=float)]
    for attr in ("atoms", "qa", "qb"):
        if hasattr(mu, attr):
            sites.append(np.asarray(getattr(mu, attr), dtype=float))
    s = np.unique(np.concatenate(sites))
    return s[np.isfinite(s)]


def _batch_objective(mu, trials, r, selector):
    """sum of panel powers for each row of distinct sorted atoms, with optimal weights; one vectorised call."""
    mids = 0.5 * (trials[:, :-1] + trials[:, 1:])
    if selector == "max":
        inner = mu._cdf(mids)
    elif selector == "min":
        inner = mu._cdf_left(mids)
    else:
        inner = 0.5 * (mu._cdf(mids) + mu._cdf_left(mids))
    inner = np.maximum.accumulate(np.clip(inner, 0.0, 1.0), axis=1)
    rows = len(trials)
    P = np.hstack([np.zeros((rows, 1)), inner, np.ones((rows, 1))])
    return panel_power_sum(mu, P, trials, r)


def repair_duplicates(mu, x, r, cfg: SolverConfig = SolverConfig()):
    """Replace coincident atoms one at a time by the candidate site that lowers d_r the most."""
    u = np.unique(x)
    n = len(x)
    if len(u) == n:
        return np.sort(x)
    sites = _candidate_sites(mu)
    while len(u) < n:
        free = sites[~np.isin(sites, u)]
        if len(free) == 0:
            break  # fewer distinct sites than atoms: keep the duplicates
        trials = np.sort(np.hstack([np.broadcast_to(u, (len(free), len(u))), free[:, None]]), axis=1)
        vals = np.asarray(_batch_objective(mu, trials, r, cfg.weight_selector), dtype=float)
        vals = np.where(np.isnan(vals), math.inf, vals)
        u = trials[int(np.argmin(vals))]
    return np.sort(np.r_[u, np.full(n - len(u), u[-1])])


def run_lloyd(mu, x0, r: float, cfg: SolverConfig = SolverConfig()):
    """Iterate the alternation from atoms x0; returns (approx, converged, iterations, distance trace).

    Coincident atoms carry no information, so they are re-seeded (a bounded
    number of times) before the alternation resumes.
    """
    x = repair_duplicates(mu, np.asarray(x0, dtype=float), r, cfg)
    repairs = 0
    P_prev = None
    trace = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        P = optimal_cumulative_weights(mu, x, cfg.weight_selector)
        x_new = atoms_for_cumulative(mu, P, r, cfg.location_selector)
        if repairs < 4 * len(x) and len(np.unique(x_new)) < len(x_new):
            fixed = repair_duplicates(mu, x_new, r, cfg)
            if len(np.unique(fixed)) > len(np.unique(x_new)):
                repairs += 1
                x, P_prev = fixed, None
                continue
        scale = 1.0 + float(np.max(np.abs(x_new)))
        move = float(np.max(np.abs(x_new - x))) / scale
        if P_prev is not None:
            move = max(move, float(np.max(np.abs(P - P_prev))))
        else:
            move = math.inf
        x, P_prev = x_new, P
        if it % cfg.distance_every == 0:
            trace.append(distance_r(mu, StepApprox.from_cumulative(x, P), r))
        if move <= cfg.convergence_tol:
            converged = True
            break
    if P_prev is None:
        P_prev = optimal_cumulative_weights(mu, x, cfg.weight_selector)
    approx = StepApprox.from_cumulative(x, P_prev)
    d = distance_r(mu, approx, r)
    trace.append(d)
    return approx.with_distance(d, r), converged, it, trace


def initial_atoms(mu, n: int, r: float, jitter: float = 0.0, rng=None):
    """Atoms at levels i/(n+1) of the tilted measure (density^(1/(r+1))) when it exists, else of mu."""
    u = np.arange(1, n + 1) / (n + 1)
    if jitter > 0:
        u = u + rng.uniform(-0.5 * jitter, 0.5 * jitter, size=n)
        u = np.sort(np.clip(u, 1e-9, 1 - 1e-9))
    if not math.isinf(r):
        try:
            return np.sort(np.asarray(mu.tilted_quantile(u, r), dtype=float))
        except UnsupportedError:
            pass
    return np.sort(np.asarray(mu._q(u), dtype=float))


def _same(a: StepApprox, b: StepApprox, tol):
    return bool(np.max(np.abs(a.x - b.x)) <= tol * (1 + np.max(np.abs(a.x))) and np.max(np.abs(a.P - b.P)) <= tol)


def solve_free(mu, n: int, r: float, cfg: SolverConfig = SolverConfig()) -> FreeSearch:
    """Multi-start alternation; the best candidate wins, ties broken by lexicographic atom order."""
    _check_r(r)
    n = int(n)
    if n < 1:
        raise SpecError("n must be positive")
    rng = np.random.default_rng(cfg.seed)
    width = cfg.jitter if cfg.jitter is not None else 1.0 / (4 * n)
    found: list[Candidate] = []
    for k in range(max(1, cfg.starts)):
        if k % 2 == 1:
            # every other start: random levels, which escape basins the jittered grid keeps hitting
            x0 = np.sort(np.asarray(mu._q(np.sort(rng.uniform(0.0, 1.0, n))), dtype=float))
        else:
            x0 = initial_atoms(mu, n, r, width if k > 0 else 0.0, rng)
        approx, ok, iters, _ = run_lloyd(mu, x0, r, cfg)
        if not ok:
            log.warning("start %d did not converge in %d sweeps (d_r=%.3g)", k, iters, approx.achieved_distance)
        cand = Candidate(approx, ok, iters, k)
        if not any(_same(cand.approx, c.approx, cfg.dedup_tol) for c in found):
            found.append(cand)
    found.sort(key=lambda c: (c.approx.achieved_distance, tuple(c.approx.x)))
    # local moves on the leading distinct candidates
    for c in found[: cfg.refine_top if n <= cfg.swap_max_atoms else 0]:
        moved = swap_refine(mu, c, r, cfg)
        if moved is not None and not any(_same(moved.approx, f.approx, cfg.dedup_tol) for f in found):
            found.append(moved)
    found.sort(key=lambda c: (c.approx.achieved_distance, tuple(c.approx.x)))
    best = found[0]
    # near-ties are decided by atom order so the choice is reproducible
    ties = [c for c in found if c.approx.achieved_distance <= best.approx.achieved_distance * (1 + 1e-12) + 1e-15]
    best = min(ties, key=lambda c: tuple(c.approx.x))
    return FreeSearch(best.approx, tuple(found))


def _boundary_trials(mu, approx: StepApprox):
    """Cumulative weights with one P_i moved to the neighbouring break of the quantile."""
    brk = np.asarray(mu.quantile_breaks(), dtype=float)
    P = approx.P
    out = []
    for i in range(1, approx.n):
        below = brk[brk < P[i] - 1e-15]
        above = brk[brk > P[i] + 1e-15]
        for q in ([below[-1]] if len(below) else []) + ([above[0]] if len(above) else []):
            Q = P.copy()
            Q[i] = q
            if np.all(np.diff(Q) >= 0):
                out.append(Q)
    return out


def swap_refine(mu, cand: Candidate, r: float, cfg: SolverConfig = SolverConfig()):
    """Local moves on a converged candidate, each followed by a fresh alternation.

    Two moves are tried: shifting one cumulative weight to the next break of
    the quantile (moves one atom of a discrete measure to the adjacent
    cluster), and relocating one atom to its best re-seeding site. The
    alternation alone stalls in such local minima. Returns an improved
    Candidate or None.
    """
    best, improved = cand, False
    for _ in range(max(0, cfg.swap_rounds)):
        if best.approx.n < 2:
            break
        starts = []
        trials = _boundary_trials(mu, best.approx)
        if trials:
            T = np.array(trials)
            X = np.array([atoms_for_cumulative(mu, Q, r, cfg.location_selector) for Q in T])
            vals = panel_power_sum(mu, T, X, r)
            k = int(np.argmin(vals))
            if vals[k] < best.approx.achieved_distance**r * (1 - 1e-12):
                starts.append(X[k])
        for i in range(best.approx.n):
            rest = np.delete(best.approx.x, i)
            starts.append(repair_duplicates(mu, np.sort(np.r_[rest, rest[-1]]), r, cfg))
        moved = False
        for x0 in starts:
            approx, ok, iters, _ = run_lloyd(mu, x0, r, cfg)
            if approx.achieved_distance < best.approx.achieved_distance * (1 - 1e-12):
                best = Candidate(approx, ok, iters, cand.start, True)
                moved = improved = True
        if not moved:
            break
    return best if improved else None


def best_free(mu, n: int, r: float, cfg: SolverConfig = SolverConfig()) -> StepApprox:
    return solve_free(mu, n, r, cfg).best


# ---------------------------------------------------------------- oracles


def _box(mu):
    lo, hi = mu.support_bounds()
    if not math.isfinite(lo):
        lo = float(mu._q(np.array(1e-4)))
    if not math.isfinite(hi):
        hi = float(mu._q(np.array(1 - 1e-4)))
    return lo, hi


def _simplex_grid(n, steps):
    """All cumulative-weight vectors (0, P_1, ..., P_{n-1}, 1) on a grid with the given step count."""
    if n == 1:
        return np.array([[0.0, 1.0]])
    rows = [np.r_[0.0, np.array(c) / steps, 1.0] for c in itertools.combinations_with_replacement(range(steps + 1), n - 1)]
    return np.array(rows)


def brute_force_oracle(mu, n: int, r: float, resolution: float = 1e-3, coarse: int | None = None) -> StepApprox:
    """Grid search over sorted atoms in the support box and cumulative weights, zooming in on the best cell.

    Stops once the grid spacing is below ``resolution`` (relative to the box
    width for atoms, absolute for cumulative weights).
    """
    if n > 3:
        raise SpecError("grid oracle limited to n <= 3")
    lo, hi = _box(mu)
    width = hi - lo if hi > lo else 1.0
    coarse = coarse or {1: 400, 2: 48, 3: 14}[n]
    xs = np.linspace(lo, hi, coarse + 1)
    X = np.array(list(itertools.combinations_with_replacement(xs, n)))
    PP = _simplex_grid(n, coarse)
    best_val, best_x, best_P = _scan(mu, X, PP, r)
    hx, hp = width / coarse, 1.0 / coarse
    pts = 9
    while hx > resolution * width or (n > 1 and hp > resolution):
        offs = np.linspace(-2, 2, pts)
        gx = [best_x[i] + hx * offs for i in range(n)]
        X = np.array([c for c in itertools.product(*gx) if all(c[i] <= c[i + 1] for i in range(n - 1))])
        X = np.clip(X, lo, hi)
        if n > 1:
            gp = [best_P[i] + hp * offs for i in range(1, n)]
            inner = np.array([c for c in itertools.product(*gp) if all(c[i] <= c[i + 1] for i in range(n - 2))])
            inner = np.clip(inner, 0.0, 1.0)
            PP = np.column_stack([np.zeros(len(inner)), inner, np.ones(len(inner))])
        else:
            PP = np.array([[0.0, 1.0]])
        val, x_c, P_c = _scan(mu, X, PP, r)
        if val < best_val:
            best_val, best_x, best_P = val, x_c, P_c
        hx /= 2.0
        hp /= 2.0
    approx = StepApprox.from_cumulative(best_x, best_P)
    return approx.with_distance(distance_r(mu, approx, r), r)


def _scan(mu, X, PP, r, chunk=200_000):
    best = (math.inf, None, None)
    nx, npp = len(X), len(PP)
    per = max(1, chunk // max(npp, 1))
    for s in range(0, nx, per):
        xb = X[s : s + per]
        xx = np.repeat(xb, npp, axis=0)
        pp = np.tile(PP, (len(xb), 1))
        vals = panel_power_sum(mu, pp, xx, r)
        k = int(np.argmin(vals))
        if vals[k] < best[0]:
            best = (float(vals[k]), xx[k].copy(), pp[k].copy())
    return best


def _cluster_cost(x, w, r):
    """min_c sum w |x - c|^r and the minimiser, for sorted atoms."""
    if r == 1:
        cw = np.cumsum(w)
        c = x[int(np.searchsorted(cw, 0.5 * cw[-1]))]
    elif r == 2:
        c = float(np.dot(w, x) / w.sum())
    else:
        res = optimize.minimize_scalar(lambda c: float(np.dot(w, np.abs(x - c) ** r)), bounds=(x[0], x[-1]), method="bounded", options={"xatol": 1e-13})
        c = float(res.x)
    return float(np.dot(w, np.abs(x - c) ** r)), c


def exact_discrete_oracle(mu: Discrete, n: int, r: float) -> StepApprox:
    """Optimal n-point approximation of a discrete measure by dynamic programming over contiguous clusters."""
    if not isinstance(mu, Discrete):
        raise SpecError("exact oracle needs a discrete measure")
    x, w = mu.atoms, mu.weights
    K = len(x)
    if n >= K:
        atoms = np.r_[x, np.full(n - K, x[-1])]
        weights = np.r_[w, np.zeros(n - K)]
        approx = StepApprox(atoms, weights)
        return approx.with_distance(0.0, r)
    cost = np.full((K, K), math.inf)
    centre = np.zeros((K, K))
    for i in range(K):
        for j in range(i, K):
            cost[i, j], centre[i, j] = _cluster_cost(x[i : j + 1], w[i : j + 1], r)
    D = np.full((n + 1, K + 1), math.inf)
    arg = np.zeros((n + 1, K + 1), dtype=int)
    D[0, 0] = 0.0
    for m in range(1, n + 1):
        for j in range(1, K + 1):
            for i in range(m, j + 1):
                v = D[m - 1, i - 1] + cost[i - 1, j - 1]
                if v < D[m, j]:
                    D[m, j], arg[m, j] = v, i
    atoms, weights = [], []
    j = K
    for m in range(n, 0, -1):
        i = arg[m, j]
        atoms.append(centre[i - 1, j - 1])
        weights.append(w[i - 1 : j].sum())
        j = i - 1
    approx = StepApprox(np.array(atoms[::-1]), np.array(weights[::-1]) / np.sum(weights))
    return approx.with_distance(D[n, K] ** (1.0 / r), r)
