"""SSD-minimal quantile functions under mixed first- and second-order
stochastic dominance constraints, and the expenditure-minimising payoffs
they induce on a scenario market."""

from .dominance import DominanceReport, fsd_check, ssd_check
from .envelope import EnvelopeSolution, reduce_fsd, reduce_ssd, running_max, ssd_minimal
from .market import (
    Market,
    RandomizedPayoff,
    comonotone_intervals,
    optimal_payoff,
    price,
    sdf_quantile,
    solve_expenditure,
)
from .quantile import (
    TOL,
    PiecewiseLinearFn,
    StepQuantile,
    ValidationError,
    evaluate,
    from_samples,
    integrate,
    pointwise_max,
    right_slopes,
)

__all__ = [
    "TOL",
    "DominanceReport",
    "EnvelopeSolution",
    "Market",
    "PiecewiseLinearFn",
    "RandomizedPayoff",
    "StepQuantile",
    "ValidationError",
    "comonotone_intervals",
    "evaluate",
    "from_samples",
    "fsd_check",
    "integrate",
    "optimal_payoff",
    "pointwise_max",
    "price",
    "reduce_fsd",
    "reduce_ssd",
    "right_slopes",
    "running_max",
    "sdf_quantile",
    "solve_expenditure",
    "ssd_check",
    "ssd_minimal",
]
