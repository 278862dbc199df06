"""Expenditure minimisation on a finite scenario market.

The cheapest payoff with quantile ``Q`` pairs high payoffs with low SDF
states, and costs ``int_0^1 Q(s) Q_rho(1 - s) ds``. On a discrete market a
state may have to be split into sub-states (an auxiliary independent
uniform) to carry more than one payoff value; those splits make the bound
attainable exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .envelope import EnvelopeSolution, reduce_fsd, reduce_ssd, ssd_minimal
from .quantile import SNAP, TOL, StepQuantile, ValidationError, from_samples, merge_grid


class State(NamedTuple):
    p: float
    rho: float


@dataclass(frozen=True)
class Market:
    states: tuple[State, ...]

    def __post_init__(self) -> None:
        states = tuple(State(float(p), float(rho)) for p, rho in self.states)
        if not states:
            raise ValidationError("market needs at least one state")
        for i, (p, rho) in enumerate(states):
            if not (math.isfinite(p) and p > 0):
                raise ValidationError(f"state {i}: probability must be positive, got {p!r}")
            if not (math.isfinite(rho) and rho > 0):
                raise ValidationError(f"state {i}: SDF must be positive, got {rho!r}")
        total = math.fsum(p for p, _ in states)
        if abs(total - 1.0) > TOL:
            raise ValidationError(f"state probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "states", states)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> Market:
        return cls(tuple(State(p, rho) for p, rho in pairs))

    def expectation(self, xs: Sequence[float]) -> float:
        """``E[rho X]`` for a state-indexed payoff."""
        return math.fsum(p * rho * x for (p, rho), x in zip(self.states, xs))


class PayoffEntry(NamedTuple):
    state: int
    mass: float
    value: float


@dataclass(frozen=True)
class RandomizedPayoff:
    entries: tuple[PayoffEntry, ...]

    def __post_init__(self) -> None:
        entries = tuple(PayoffEntry(int(s), float(m), float(v)) for s, m, v in self.entries)
        if any(e.mass <= 0 for e in entries):
            raise ValidationError("entry masses must be positive")
        if any(e.value < 0 for e in entries):
            raise ValidationError("payoff values must be nonnegative")
        total = math.fsum(e.mass for e in entries)
        if abs(total - 1.0) > TOL:
            raise ValidationError(f"payoff masses sum to {total!r}, not 1")
        object.__setattr__(self, "entries", entries)

    def cost(self, market: Market) -> float:
        return math.fsum(e.mass * market.states[e.state].rho * e.value for e in self.entries)

    def distribution(self) -> StepQuantile:
        return from_samples([e.value for e in self.entries], [e.mass for e in self.entries])

    def state_masses(self, n_states: int) -> list[float]:
        acc: list[list[float]] = [[] for _ in range(n_states)]
        for e in self.entries:
            acc[e.state].append(e.mass)
        return [math.fsum(m) for m in acc]


def sdf_quantile(m: Market) -> StepQuantile:
    return from_samples([s.rho for s in m.states], [s.p for s in m.states])


def price(q: StepQuantile, q_rho: StepQuantile) -> float:
    """``int_0^1 q(s) q_rho(1 - s) ds``, exact on the merged breakpoint grid."""
    grid = merge_grid(q.breakpoints, (1.0 - t for t in q_rho.breakpoints), (1.0,))
    terms = []
    for a, b in zip(grid, grid[1:]):
        mid = 0.5 * (a + b)
        terms.append(q(mid) * q_rho(1.0 - mid) * (b - a))
    return math.fsum(terms)


def comonotone_intervals(m: Market) -> list[tuple[float, float]]:
    """Probability interval ``[L, U)`` of each state, ordered by SDF.

    Ties keep input order. Every ``u`` in state i's interval satisfies
    ``Q_rho(u) = rho_i``.
    """
    order = sorted(range(len(m.states)), key=lambda i: m.states[i].rho)
    out: list[tuple[float, float]] = [(0.0, 0.0)] * len(m.states)
    lo, masses = 0.0, []
    for k, i in enumerate(order):
        masses.append(m.states[i].p)
        hi = 1.0 if k == len(order) - 1 else math.fsum(masses)
        out[i] = (lo, hi)
        lo = hi
    return out


def optimal_payoff(q_star: StepQuantile, m: Market) -> RandomizedPayoff:
    """Payoff ``q_star(1 - xi)`` with ``xi`` uniform and comonotone with the SDF."""
    cuts = sorted(1.0 - t for t in q_star.breakpoints[1:])
    entries = []
    for i, (lo, hi) in enumerate(comonotone_intervals(m)):
        pts = [lo, *(c for c in cuts if lo + SNAP < c < hi - SNAP), hi]
        for a, b in zip(pts, pts[1:]):
            entries.append(PayoffEntry(i, b - a, q_star(1.0 - 0.5 * (a + b))))
    return RandomizedPayoff(tuple(entries))


@dataclass(frozen=True)
class ExpenditureSolution:
    fsd_benchmark: StepQuantile
    ssd_benchmark: StepQuantile
    envelope: EnvelopeSolution
    payoff: RandomizedPayoff
    cost: float


def solve_expenditure(
    fsd: Sequence[StepQuantile], ssd: Sequence[StepQuantile], m: Market
) -> ExpenditureSolution:
    """Cheapest payoff whose quantile meets every FSD and SSD benchmark.

    An empty constraint list stands for the zero benchmark, which is vacuous.
    """
    if not fsd and not ssd:
        raise ValueError("at least one FSD or SSD constraint is required")
    zero = StepQuantile.constant(0.0)
    q1 = reduce_fsd(list(fsd) or [zero])
    q2 = reduce_ssd(list(ssd) or [zero])
    env = ssd_minimal(q1, q2)
    payoff = optimal_payoff(env.q_star, m)
    return ExpenditureSolution(q1, q2, env, payoff, price(env.q_star, sdf_quantile(m)))
