"""First- and second-order stochastic dominance between quantile functions."""

from __future__ import annotations

from dataclasses import dataclass

from .quantile import TOL, StepQuantile, integrate, merge_grid


@dataclass(frozen=True)
class DominanceReport:
    """Outcome of a dominance check.

    ``margin`` is the smallest slack of the defining inequality over the
    check grid; ``witness`` is the first grid point where the slack falls
    below ``-TOL`` and is ``None`` exactly when the relation holds.
    """

    holds: bool
    witness: float | None
    margin: float


def _report(grid: list[float], slack: list[float]) -> DominanceReport:
    margin = min(slack)
    witness = next((t for t, s in zip(grid, slack) if s < -TOL), None)
    return DominanceReport(witness is None, witness, margin)


def fsd_check(a: StepQuantile, b: StepQuantile) -> DominanceReport:
    """Does ``a`` dominate ``b`` to first order, i.e. ``a(t) >= b(t)`` on [0, 1)?

    Both sides are constant between merged breakpoints, so the breakpoints
    are the only points that need checking.
    """
    grid = merge_grid(a.breakpoints, b.breakpoints)
    return _report(grid, [a(t) - b(t) for t in grid])


def ssd_check(a: StepQuantile, b: StepQuantile) -> DominanceReport:
    """Does ``a`` dominate ``b`` to second order (integrated quantiles)?

    The difference of the two integrals is piecewise linear, so its minimum
    sits on a knot of the merged grid.
    """
    pa, pb = integrate(a), integrate(b)
    grid = merge_grid(pa.xs, pb.xs)
    return _report(grid, [pa(t) - pb(t) for t in grid])


def check(a: StepQuantile, b: StepQuantile, order: int) -> DominanceReport:
    if order == 1:
        return fsd_check(a, b)
    if order == 2:
        return ssd_check(a, b)
    raise ValueError(f"order must be 1 or 2, got {order!r}")
