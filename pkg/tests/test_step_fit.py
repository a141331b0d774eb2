"""Best constants in L^r, their limits at r = 1 and r = inf, and single-jump fits."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bestapprox.errors import SpecError
from bestapprox.intervals import QuantileInterval
from bestapprox.measures import Discrete, Exponential, Uniform
from bestapprox.monotone import PiecewiseFunction, from_step_quantile
from bestapprox.step_fit import (
    QuantileSegment,
    best_single_jump,
    phi_r_derivative,
    tau_infinity,
    tau_one_plus,
    tau_r,
)
from conftest import piecewise_functions

# frozen oracles (scipy brentq / numpy.roots, computed independently of the package)
TAU_THREE_STEPS_R15 = 0.6812777647855088
TAU_PLUS_FOUR_STEPS_2_3 = 0.4862076328831376
TAU_EXP_SLOT_R15 = 0.619604493782336130707  # mpmath findroot on [0.2, 0.7]


def three_steps():
    return PiecewiseFunction.step([0, 1, 5, 8], [-4, 0, 4])


def four_steps(a, b):
    return PiecewiseFunction.step([0, 1, 4, 5, 8], [-a, -1, 1, b])


def ident():
    return PiecewiseFunction([0, 1], [1.0], [0.0])


def test_tau_examples():
    f = three_steps()
    assert tau_r(f, 2).value == pytest.approx(1.0, abs=1e-12)
    assert tau_r(f, 1).value == QuantileInterval(0.0, 0.0)
    assert tau_r(f, 1.5).value == pytest.approx(TAU_THREE_STEPS_R15, abs=1e-11)
    assert tau_r(ident(), 2).value == pytest.approx(0.5)
    assert tau_r(four_steps(2, 3), 1).value == QuantileInterval(-1.0, 1.0)


def test_tau_one_plus_examples():
    assert tau_one_plus(three_steps()) == 0.0
    # the cubic's constant term is a - b^3, so a = b^3 puts the limit at 0
    assert tau_one_plus(four_steps(1.5**3, 1.5)) == pytest.approx(0.0, abs=1e-12)
    # a = b is not symmetric; frozen numpy.roots value of the cubic for a = b = 3
    assert tau_one_plus(four_steps(3, 3)) == pytest.approx(0.42321621476212, abs=1e-10)
    v = tau_one_plus(four_steps(2, 3))
    assert v == pytest.approx(TAU_PLUS_FOUR_STEPS_2_3, abs=1e-10)
    assert tau_r(four_steps(2, 3), 1.0001).value == pytest.approx(v, abs=1e-4)


def test_tau_one_plus_end_cases():
    # f approaches the ends of the balanced set continuously, so Psi can keep one sign
    K = 100.0
    f = PiecewiseFunction([0, 1, 2], [1.0, K], [-2.0, 1 - K])  # x - 2, then 1 + K (x - 1)
    assert f.balanced_set().as_list() == [-1.0, 1.0]
    assert tau_one_plus(f) == 1.0
    g = PiecewiseFunction([0, 1, 2], [K, 1.0], [-1 - K, 1.0])  # mirror image
    assert tau_one_plus(g) == g.balanced_set().lo
    assert tau_r(f, 1 + 1e-6).value == pytest.approx(1.0, abs=1e-3)


def test_tau_infinity_examples():
    assert tau_infinity(three_steps()).value == 0.0
    for a, b in [(2, 3), (5, 1.5)]:
        assert tau_infinity(four_steps(a, b)).value == pytest.approx((b - a) / 2)
    assert tau_infinity(PiecewiseFunction.step([0, 1], [7.0])).value == 7.0
    assert tau_r(three_steps(), math.inf).value == 0.0


def test_phi_derivative_examples():
    f = three_steps()
    assert phi_r_derivative(f, 1.0, 2.0) == pytest.approx(0.0, abs=1e-14)
    assert phi_r_derivative(ident(), 0.0, 2.0) == pytest.approx(-0.5)
    t = tau_r(f, 3.0).value
    assert phi_r_derivative(f, t, 3.0) == pytest.approx(0.0, abs=1e-9)


def test_quantile_segment():
    E = Exponential()
    seg = QuantileSegment(E, 0.2, 0.7)
    assert tau_r(seg, 1.5).value == pytest.approx(TAU_EXP_SLOT_R15, abs=1e-11)
    assert tau_r(seg, 2).value == pytest.approx(float(E.quantile_integral(0.2, 0.7)) / 0.5)
    b = tau_r(seg, 1).value
    assert b.lo == pytest.approx(E.quantile(0.45)) and b.is_point
    assert tau_r(seg, math.inf).value == pytest.approx(0.5 * (E.quantile(0.2) + E.quantile(0.7)))


def test_quantile_segment_matches_piecewise():
    # the same function two ways: a step quantile and its piecewise description
    d = Discrete([0.0, 1.0, 3.0], [0.2, 0.5, 0.3])
    f = from_step_quantile(d)
    seg = QuantileSegment(d, 0.0, 1.0)
    for r in (1.5, 2.0, 3.0):
        assert tau_r(seg, r).value == pytest.approx(tau_r(f, r).value, abs=1e-10)
    assert tau_one_plus(seg) == pytest.approx(tau_one_plus(f), abs=1e-9)
    assert tau_r(seg, 1).value.as_list() == pytest.approx(tau_r(f, 1).value.as_list())


def test_unbounded_segment():
    seg = QuantileSegment(Exponential(), 0.5, 1.0)
    t = tau_r(seg, 3.0).value
    assert phi_r_derivative(seg, t, 3.0) == pytest.approx(0.0, abs=1e-8)


def test_best_single_jump_examples():
    assert best_single_jump(ident(), 0, 1).as_list() == pytest.approx([0.5, 0.5])
    q = from_step_quantile(Discrete([0, 1], [0.5, 0.5]))
    assert best_single_jump(q, 0, 1).as_list() == pytest.approx([0.5, 0.5])
    bad = PiecewiseFunction.step([0, 1, 2, 3, 5], [16, 8, 18, 9])
    with pytest.raises(SpecError):
        best_single_jump(bad, 0, 24)
    with pytest.raises(SpecError):
        best_single_jump(ident(), 1, 0)


def test_non_monotone_jump_minimisers_not_interval():
    # why monotonicity is required: on this f the L^1 minimisers are {0, 2, 5}
    breaks = [0, 1, 2, 3, 5]
    vals = np.array([16, 8, 18, 9.0])

    def cost(xi, r):
        pts = sorted(set(breaks + [xi]))
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            v = vals[np.searchsorted(breaks, a, side="right") - 1]
            g = 24.0 if a >= xi else 0.0
            total += (b - a) * abs(v - g) ** r
        return total

    grid = np.linspace(0, 5, 101)
    for r, expect in [(1, {0.0, 2.0, 5.0}), (2, {0.0, 2.0, 5.0}), (1.5, {5.0}), (3, {0.0, 2.0})]:
        c = np.array([cost(x, r) for x in grid])
        argmins = set(np.round(grid[c <= c.min() + 1e-9], 9))
        assert argmins == expect


def test_single_jump_objective_constant_on_set():
    f = from_step_quantile(Discrete([0.0, 0.4, 1.0], [0.3, 0.4, 0.3]))
    qs = best_single_jump(f, 0.0, 0.8)

    def cost(xi):
        g = PiecewiseFunction.step([0, xi, 1], [0.0, 0.8]) if 0 < xi < 1 else PiecewiseFunction.step([0, 1], [0.8 if xi <= 0 else 0.0])
        xs = np.linspace(0, 1, 200001)
        return np.mean(np.abs(f(xs) - g(xs)))

    assert cost(qs.lo) == pytest.approx(cost(qs.hi), abs=1e-4)
    assert cost(qs.midpoint) <= min(cost(x) for x in np.linspace(0.01, 0.99, 99)) + 1e-4


@given(piecewise_functions(), st.sampled_from([1.0, 1.5, 2.0, 3.0, 4.0]))
def test_tau_within_range(f, r):
    res = tau_r(f, r)
    v = res.value
    lo, hi = (v.lo, v.hi) if isinstance(v, QuantileInterval) else (v, v)
    assert f.essinf() - 1e-12 <= lo <= hi <= f.esssup() + 1e-12


@given(piecewise_functions(monotone=True), st.sampled_from([1.5, 2.0, 3.0]))
def test_tau_monotone_segment_range(f, r):
    # for nondecreasing f the value lies between the one-sided end limits
    v = tau_r(f, r).value
    assert f.va[0] - 1e-12 <= v <= f.vb[-1] + 1e-12


@st.composite
def ordered_pairs(draw):
    k = draw(st.integers(1, 5))
    widths = draw(st.lists(st.floats(0.1, 2.0), min_size=k, max_size=k))
    breaks = np.r_[0.0, np.cumsum(widths)]
    lo = np.asarray(draw(st.lists(st.floats(-4, 4), min_size=k, max_size=k)))
    inc = np.asarray(draw(st.lists(st.floats(0, 3), min_size=k, max_size=k)))
    return PiecewiseFunction.step(breaks, lo), PiecewiseFunction.step(breaks, lo + inc)


@given(ordered_pairs(), st.sampled_from([1.5, 2.0, 3.0]))
def test_tau_monotone_in_f(pair, r):
    f, g = pair
    assert tau_r(f, r).value <= tau_r(g, r).value + 1e-10


@given(piecewise_functions(steps_only=True), st.sampled_from([1.5, 3.0]))
def test_tau_against_grid_search(f, r):
    w = np.diff(f.breaks)
    v = f.intercepts
    grid = np.linspace(f.essinf(), f.esssup(), 100_001)
    cost = np.sum(w[None, :] * np.abs(v[None, :] - grid[:, None]) ** r, axis=1)
    t_grid = grid[int(np.argmin(cost))]
    h = grid[1] - grid[0] if len(grid) > 1 else 0.0
    assert abs(tau_r(f, r).value - t_grid) <= h + 1e-12


def test_tau_grid_search_25_functions():
    rng = np.random.default_rng(25)
    for _ in range(25):
        k = int(rng.integers(2, 7))
        w = rng.uniform(0.1, 1.0, k)
        vals = rng.normal(size=k)
        f = PiecewiseFunction.step(np.r_[0.0, np.cumsum(w)], vals)
        grid = np.linspace(vals.min(), vals.max(), 100_000)
        for r in (1.5, 2.5):
            cost = np.sum(w * np.abs(vals[None, :] - grid[:, None]) ** r, axis=1)
            assert abs(tau_r(f, r).value - grid[np.argmin(cost)]) <= grid[1] - grid[0]


def test_tau_continuous_in_r():
    for f in (three_steps(), four_steps(2, 3), PiecewiseFunction([0, 1, 2], [1.0, 3.0], [0.0, -2.0])):
        rs = np.round(np.arange(1.01, 6.0001, 0.01), 10)
        taus = np.array([tau_r(f, r).value for r in rs])
        d = np.abs(np.diff(taus))
        # no jump larger than ten times the local trend (median of neighbouring steps)
        for i in range(len(d)):
            local = np.median(d[max(0, i - 5) : i + 6])
            assert d[i] <= 10 * local + 1e-9


def test_tau_one_plus_is_limit():
    for f in (three_steps(), four_steps(2, 3), four_steps(4, 1.5)):
        t1, t2 = tau_r(f, 1 + 1e-3).value, tau_r(f, 1 + 1e-4).value
        extrap = t2 + (t2 - t1) * (1e-4 / (1e-3 - 1e-4))
        assert extrap == pytest.approx(tau_one_plus(f), abs=1e-4)
        assert tau_r(f, 1 + 1e-2).value == pytest.approx(tau_one_plus(f), abs=1e-1)


@given(piecewise_functions(steps_only=True))
def test_tau_one_plus_in_balanced_set(f):
    v = tau_one_plus(f)
    assert f.balanced_set().contains(v, tol=1e-12)
    t = tau_r(f, 1 + 1e-5).value
    b = f.balanced_set()
    if b.is_point:
        assert v == b.lo


@st.composite
def near_affine(draw):
    a = draw(st.floats(-3, 3))
    b = draw(st.floats(-3, 3))
    c = draw(st.floats(0.0, 2.0))
    k = draw(st.integers(1, 6))
    w = np.asarray(draw(st.lists(st.floats(-1, 1), min_size=k, max_size=k)))
    breaks = np.linspace(0.0, 2.0, k + 1)
    xi = 1.0
    # f(x) = a x + b + c w_k (x - xi) on piece k
    slopes = a + c * w
    intercepts = b - c * w * xi
    return PiecewiseFunction(breaks, slopes, intercepts), a * xi + b, c


@given(near_affine(), st.sampled_from([1.5, 2.0, 4.0]))
def test_tau_near_affine_bound(data, r):
    f, f_xi, c = data
    assert abs(tau_r(f, r).value - f_xi) <= 0.5 * c * f.length + 1e-10


def test_tau_stability_under_perturbation():
    f = four_steps(2, 3)
    for r in (1.5, 2.0, 3.0):
        base = tau_r(f, r).value
        shifts = []
        for eta in (1e-3, 1e-6):
            g = PiecewiseFunction.step([0, 1, 2, 4, 5, 8], [-2, -1 + eta / 0.5**0.5, -1, 1, 3])
            shifts.append(abs(tau_r(g, r).value - base))
        assert shifts[1] < shifts[0] and shifts[1] < 1e-5


def test_r_below_one_rejected():
    with pytest.raises(SpecError):
        tau_r(ident(), 0.5)
