import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from bestapprox.measures import (
    Beta21,
    Cantor,
    Discrete,
    Exponential,
    InverseCantor,
    LebesguePlusAtoms,
    PointMass,
    StandardNormal,
    Uniform,
)
from bestapprox.monotone import PiecewiseFunction

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# lines reported by test_acceptance, printed once at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def all_measures():
    return {
        "point_mass": PointMass(0.3),
        "uniform": Uniform(-1.0, 2.0),
        "exponential": Exponential(),
        "standard_normal": StandardNormal(),
        "beta_2_1": Beta21(),
        "discrete": Discrete([-1.0, 0.5, 2.0], [0.2, 0.5, 0.3]),
        "lebesgue_plus_atoms": LebesguePlusAtoms([(0.0, 1.0, 0.5)], [(1.0, 0.5)]),
        "mixed": LebesguePlusAtoms([(-1.0, 1.0, 2 / 3)], [(0.0, 1 / 3)]),
        "cantor": Cantor(),
        "inverse_cantor": InverseCantor(),
    }


@pytest.fixture(scope="session")
def measures():
    return all_measures()


@st.composite
def piecewise_functions(draw, monotone=False, steps_only=False, max_pieces=5):
    k = draw(st.integers(1, max_pieces))
    widths = draw(st.lists(st.floats(0.1, 2.0), min_size=k, max_size=k))
    lo = draw(st.floats(-2.0, 2.0))
    breaks = lo + np.r_[0.0, np.cumsum(widths)]
    vals = draw(st.lists(st.integers(-8, 8), min_size=k, max_size=k))
    vals = np.asarray(vals, dtype=float) / 2
    if steps_only:
        slopes = np.zeros(k)
    else:
        slopes = np.asarray(draw(st.lists(st.sampled_from([0.0, 0.0, 0.5, 1.0, 2.0, -1.0]), min_size=k, max_size=k)))
    if monotone:
        slopes = np.abs(slopes)
        # left values nondecreasing and no downward jumps
        vals = np.sort(vals)
        va = np.empty(k)
        cur = vals[0]
        for i in range(k):
            cur = max(cur, vals[i])
            va[i] = cur
            cur = cur + slopes[i] * widths[i]
        vals = va
    intercepts = vals - slopes * breaks[:-1]
    return PiecewiseFunction(breaks, slopes, intercepts)
