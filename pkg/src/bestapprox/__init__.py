"""Best finitely supported approximations of probability measures on the line.

Distances are quantile L^r distances (the order-r Wasserstein distance in
one dimension). The package covers prescribed atoms, prescribed weights
and the free problem, the scalar best-constant kernel they rest on, and
rate-of-convergence experiments.
"""
from .asymptotics import (
    RateSeries,
    asym_best_locations,
    quantization_dimension,
    rate_sweep,
    slow_decay_measure,
    uniform_rate_limit,
    zador_limit,
)
from .constrained import best_given_locations, best_given_weights, best_uniform, best_weights_over_orderings
from .errors import DomainError, NumericalError, SpecError, UnsupportedError
from .intervals import QuantileInterval
from .measures import (
    Beta21,
    Cantor,
    Discrete,
    Exponential,
    InverseCantor,
    LebesguePlusAtoms,
    Measure,
    PiecewiseLinearQuantile,
    PointMass,
    StandardNormal,
    Uniform,
    measure_from_json,
)
from .metric import StepApprox, distance_r, distance_r_discrete
from .monotone import PiecewiseFunction
from .step_fit import TauResult, best_single_jump, phi_r_derivative, tau_infinity, tau_one_plus, tau_r
from .unconstrained import SolverConfig, best_free, brute_force_oracle, lloyd_step, solve_free

__version__ = "0.1.0"
