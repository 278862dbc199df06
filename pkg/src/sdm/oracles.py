"""Brute-force references and random instance generators.

Nothing here is used by the solvers themselves. The grid oracles integrate
step functions directly with numpy and never touch the piecewise-linear
machinery they are meant to check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .envelope import ssd_minimal
from .market import Market
from .quantile import TOL, StepQuantile, integrate, merge_grid, pointwise_max

_LCG_MUL = 6364136223846793005
_LCG_INC = 1442695040888963407
_MASK64 = (1 << 64) - 1


class Lcg:
    """64-bit linear congruential generator (Knuth's MMIX constants).

    ``state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64``;
    uniforms take the top 53 bits. Portable by construction, so a seed
    names the same instance in any language.
    """

    def __init__(self, seed: int) -> None:
        self.state = int(seed) & _MASK64
        self.next_u64()

    def next_u64(self) -> int:
        self.state = (_LCG_MUL * self.state + _LCG_INC) & _MASK64
        return self.state

    def uniform(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def randint(self, lo: int, hi: int) -> int:
        """Integer in ``[lo, hi]``."""
        return lo + int(self.uniform() * (hi - lo + 1))


def random_quantile(
    rng: Lcg, max_segments: int = 8, vmax: float = 10.0, t_grid: int = 64, v_grid: int = 40
) -> StepQuantile:
    """Random step quantile with breakpoints on ``k / t_grid`` and values on ``vmax * j / v_grid``."""
    k = rng.randint(1, max_segments)
    bps = sorted({rng.randint(1, t_grid - 1) / t_grid for _ in range(k - 1)})
    vals = sorted(vmax * rng.randint(0, v_grid) / v_grid for _ in range(len(bps) + 1))
    return StepQuantile((0.0, *bps), tuple(vals))


def random_market(rng: Lcg, n_states: int = 10) -> Market:
    raw = [rng.randint(1, 100) for _ in range(n_states)]
    total = sum(raw)
    ps = [r / total for r in raw]
    ps[-1] = 1.0 - sum(ps[:-1])
    return Market.from_pairs([(p, 0.1 + 3.0 * rng.uniform()) for p in ps])


@dataclass(frozen=True)
class GridFunction:
    """Values at ``t_k = k / n`` for ``k = 0 .. n - 1``."""

    n: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("grid needs n >= 2")

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.n) / self.n


def _cumulative(q: StepQuantile, t: np.ndarray) -> np.ndarray:
    starts = np.asarray(q.breakpoints)
    ends = np.append(starts[1:], 1.0)
    vals = np.asarray(q.values)
    overlap = np.clip(t[:, None] - starts[None, :], 0.0, (ends - starts)[None, :])
    return overlap @ vals


def _step_values(q: StepQuantile, t: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(np.asarray(q.breakpoints), t, side="right") - 1
    return np.asarray(q.values)[idx]


def brute_phi(q1: StepQuantile, q2: StepQuantile, n: int) -> GridFunction:
    """``max_{s <= t} (P2(s) + P1(t) - P1(s))`` evaluated directly on the grid.

    The inner max runs over grid points and input breakpoints up to t, which
    contain every maximiser since ``P2 - P1`` is linear between breakpoints.
    Quadratic in n; memory is bounded by processing rows in blocks.
    """
    t = np.arange(n) / n
    s = np.unique(np.concatenate([t, q1.breakpoints, q2.breakpoints]))
    g = _cumulative(q2, s) - _cumulative(q1, s)
    best = np.empty(n)
    block = max(1, 2_000_000 // len(s))
    for lo in range(0, n, block):
        tb = t[lo : lo + block]
        best[lo : lo + block] = np.where(s[None, :] <= tb[:, None], g[None, :], -np.inf).max(axis=1)
    return GridFunction(n, best + _cumulative(q1, t))


def recursion_phi(q1: StepQuantile, q2: StepQuantile, n: int) -> GridFunction:
    """Euler steps with projection: ``phi_k = max(phi_{k-1} + q1(t_{k-1}) / n, P2(t_k))``."""
    t = np.arange(n) / n
    inc = _step_values(q1, t) / n
    floor = _cumulative(q2, t)
    phi = np.empty(n)
    phi[0] = 0.0
    for k in range(1, n):
        phi[k] = max(phi[k - 1] + inc[k - 1], floor[k])
    return GridFunction(n, phi)


def perturbed_solution(s: StepQuantile, q1: StepQuantile, q2: StepQuantile) -> StepQuantile:
    """SSD-minimal element after raising the FSD floor from ``q1`` to ``s v q1``."""
    return ssd_minimal(pointwise_max(s, q1), q2).q_star


def feasible_sample(q1: StepQuantile, q2: StepQuantile, seed: int) -> StepQuantile:
    """Random quantile that FSD-dominates ``q1`` and SSD-dominates ``q2``."""
    vmax = 2.0 * max(q1.max_value, q2.max_value) or 1.0
    return perturbed_solution(random_quantile(Lcg(seed), vmax=vmax), q1, q2)


def single_crossing_solution(q1: StepQuantile, q2: StepQuantile) -> StepQuantile | None:
    """Closed form for benchmarks whose difference changes sign at most once.

    Crossing from above: ``q1`` up to ``t* = inf{t : P1(t) < P2(t)}`` and
    ``q2`` afterwards (``t* = 1`` if the set is empty). Crossing from below:
    ``q1 v q2``. Returns ``None`` otherwise.
    """
    grid = merge_grid(q1.breakpoints, q2.breakpoints)
    signs = [d for d in (q1(t) - q2(t) for t in grid) if abs(d) > TOL]
    down = any(a > 0 > b for i, a in enumerate(signs) for b in signs[i + 1 :])
    up = any(a < 0 < b for i, a in enumerate(signs) for b in signs[i + 1 :])
    if down and up:
        return None
    if not down:
        return pointwise_max(q1, q2)

    p1, p2 = integrate(q1), integrate(q2)
    knots = merge_grid(p1.xs, p2.xs)
    t_star = 1.0
    for x0, x1 in zip(knots, knots[1:]):
        d0, d1 = p1(x0) - p2(x0), p1(x1) - p2(x1)
        if d0 < -TOL:
            t_star = x0
            break
        if d1 < -TOL:
            # the gap opens inside this cell, from its last zero
            s1, s2 = p1.slope_at(x0), p2.slope_at(x0)
            t_star = x0 + max(d0, 0.0) / (s2 - s1)
            break
    if t_star >= 1.0:
        return q1
    head = [(b, v) for b, v in zip(q1.breakpoints, q1.values) if b < t_star]
    tail = [(t_star, q2(t_star))] + [(b, v) for b, v in zip(q2.breakpoints, q2.values) if b > t_star]
    bps, vals = zip(*(head + tail))
    return StepQuantile(bps, vals)
