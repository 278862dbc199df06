"""SSD-minimal quantile under a first-order and a second-order floor.

Given an FSD benchmark ``q1`` and an SSD benchmark ``q2``, the integrated
SSD-minimal quantile is

    phi(t) = max_{s <= t} ( P2(s) + P1(t) - P1(s) ),    Pi = int_0^. qi,

i.e. ``P1`` plus the running maximum of ``P2 - P1``. The quantile itself is
the right derivative of ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

from .dominance import fsd_check, ssd_check
from .quantile import (
    SNAP,
    TOL,
    PiecewiseLinearFn,
    StepQuantile,
    integrate,
    maximum,
    merge_grid,
    pointwise_max,
    right_slopes,
)


class EnvelopeInvariantError(RuntimeError):
    """A postcondition of the envelope construction failed (internal bug)."""


@dataclass(frozen=True)
class EnvelopeSolution:
    phi: PiecewiseLinearFn
    q_star: StepQuantile
    contact_set: tuple[tuple[float, float], ...]
    # breakpoints where the slope of phi and the case formula
    # (q1 off contact, q1 v q2 on contact) disagree; expected empty
    case_mismatches: tuple[float, ...] = ()


def running_max(f: PiecewiseLinearFn) -> PiecewiseLinearFn:
    """``M(t) = max_{s <= t} f(s)`` in one left-to-right sweep."""
    xs, ys, ss = f.xs, f.ys, f.slopes
    out_x, out_y, out_s = [xs[0]], [ys[0]], []
    level = ys[0]
    for i, s in enumerate(ss):
        x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
        if y0 > level:
            # rounding left f a hair above the level at the previous knot
            level = out_y[-1] = y0
        if s <= 0 or y1 <= level:
            out_x.append(x1)
            out_y.append(level)
            out_s.append(0.0)
            continue
        xc = x0 + (level - y0) / s
        if xc - x0 <= SNAP:
            pass
        elif x1 - xc <= SNAP:
            out_x.append(x1)
            out_y.append(level)
            out_s.append(0.0)
            continue
        else:
            out_x.append(xc)
            out_y.append(level)
            out_s.append(0.0)
        out_x.append(x1)
        out_y.append(y1)
        out_s.append(s)
        level = y1
    return PiecewiseLinearFn(tuple(out_x), tuple(out_y), tuple(out_s))


def contact_intervals(phi: PiecewiseLinearFn, p2: PiecewiseLinearFn) -> tuple[tuple[float, float], ...]:
    """Maximal closed intervals on which ``phi == p2`` within TOL."""
    grid = merge_grid(phi.xs, p2.xs)
    out: list[tuple[float, float]] = []
    run_start = None
    prev = None
    for x in grid:
        if phi(x) - p2(x) <= TOL:
            if run_start is None:
                run_start = x
            prev = x
        elif run_start is not None:
            out.append((run_start, prev))
            run_start = None
    if run_start is not None:
        out.append((run_start, prev))
    return tuple(out)


def _in_contact(t: float, contact: Sequence[tuple[float, float]]) -> bool:
    return any(a - SNAP <= t <= b + SNAP for a, b in contact)


def ssd_minimal(q1: StepQuantile, q2: StepQuantile) -> EnvelopeSolution:
    """SSD-minimal quantile among those FSD-above ``q1`` and SSD-above ``q2``."""
    p1, p2 = integrate(q1), integrate(q2)
    phi = p1 + running_max(p2 - p1)
    q_star = right_slopes(phi)
    contact = contact_intervals(phi, p2)

    grid = [t for t in merge_grid(q1.breakpoints, q2.breakpoints, q_star.breakpoints, phi.xs) if t < 1.0]
    mismatches = []
    for t in grid:
        expected = max(q1(t), q2(t)) if _in_contact(t, contact) else q1(t)
        if abs(q_star(t) - expected) > TOL:
            mismatches.append(t)
    sol = EnvelopeSolution(phi, q_star, contact, tuple(mismatches))
    _check_postconditions(sol, q1, q2, p2, grid)
    return sol


def binding_residuals(
    q_star: StepQuantile, phi: PiecewiseLinearFn, q1: StepQuantile, p2: PiecewiseLinearFn, grid: Sequence[float]
) -> list[float]:
    """``min{q_star - q1, phi - P2}`` at each grid point; zero when the constraint binds."""
    return [min(q_star(t) - q1(t), phi(t) - p2(t)) for t in grid]


def _check_postconditions(
    sol: EnvelopeSolution, q1: StepQuantile, q2: StepQuantile, p2: PiecewiseLinearFn, grid: list[float]
) -> None:
    if abs(sol.phi(0.0)) > TOL:
        raise EnvelopeInvariantError(f"phi(0) = {sol.phi(0.0)!r}")
    rep = fsd_check(sol.q_star, q1)
    if not rep.holds:
        raise EnvelopeInvariantError(f"q_star fails FSD floor at t={rep.witness}")
    rep = ssd_check(sol.q_star, q2)
    if not rep.holds:
        raise EnvelopeInvariantError(f"q_star fails SSD floor at t={rep.witness}")
    for t, r in zip(grid, binding_residuals(sol.q_star, sol.phi, q1, p2, grid)):
        if abs(r) > TOL:
            raise EnvelopeInvariantError(f"constraint not binding at t={t}: residual {r!r}")


def reduce_fsd(qs: Sequence[StepQuantile]) -> StepQuantile:
    """Single FSD benchmark equivalent to all of ``qs`` (their pointwise max)."""
    if not qs:
        raise ValueError("need at least one quantile")
    return reduce(pointwise_max, qs)


def reduce_ssd(qs: Sequence[StepQuantile]) -> StepQuantile:
    """Single SSD benchmark whose integral is the upper envelope of the integrals of ``qs``."""
    if not qs:
        raise ValueError("need at least one quantile")
    return right_slopes(reduce(maximum, (integrate(q) for q in qs)))
