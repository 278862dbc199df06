"""Step quantile functions and their piecewise-linear integrals.

Both types are immutable and canonical on construction: adjacent segments
with equal values (step) or equal slopes (linear) are merged, so two objects
describing the same function compare equal.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate
from typing import Iterable, Sequence

# Absolute tolerance for values, slopes and breakpoints, library-wide.
TOL = 1e-12
# Crossings closer than this to an existing knot snap onto it.
SNAP = 1e-14


class ValidationError(ValueError):
    """Input data violates a structural invariant (ordering, sign, range)."""


def _finite(x: float, what: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"{what} must be finite, got {x!r}")
    return x


def merge_grid(*grids: Iterable[float]) -> list[float]:
    """Sorted union of abscissae with near-duplicates (within SNAP) collapsed."""
    pts = sorted(set().union(*grids))
    out: list[float] = []
    for x in pts:
        if out and x - out[-1] <= SNAP:
            continue
        out.append(x)
    return out


@dataclass(frozen=True, eq=False)
class StepQuantile:
    """Right-continuous, increasing, nonnegative step function on [0, 1).

    ``Q(t) = values[i]`` for ``breakpoints[i] <= t < breakpoints[i + 1]``,
    with an implicit final breakpoint at 1.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        bps = [_finite(b, "breakpoint") for b in self.breakpoints]
        vals = [_finite(v, "value") for v in self.values]
        if not bps or len(bps) != len(vals):
            raise ValidationError("breakpoints and values must be nonempty and of equal length")
        if abs(bps[0]) > TOL:
            raise ValidationError(f"first breakpoint must be 0, got {bps[0]!r}")
        bps[0] = 0.0
        out_b: list[float] = []
        out_v: list[float] = []
        for b, v in zip(bps, vals):
            if v < -TOL:
                raise ValidationError(f"values must be nonnegative, got {v!r}")
            v = max(v, 0.0)
            if b >= 1.0 - TOL:
                if b <= 1.0 + TOL:
                    continue  # trailing zero-length segment carries no mass
                raise ValidationError(f"breakpoints must lie in [0, 1), got {b!r}")
            if out_b:
                if b < out_b[-1] - TOL:
                    raise ValidationError("breakpoints must be increasing")
                if v < out_v[-1] - TOL:
                    raise ValidationError(
                        f"values must be increasing: {v!r} after {out_v[-1]!r} at t={b!r}"
                    )
                if b - out_b[-1] <= TOL:
                    # zero-length segment: the later value takes over
                    out_v[-1] = max(v, out_v[-1])
                    if len(out_v) > 1 and out_v[-1] - out_v[-2] <= TOL:
                        out_b.pop()
                        out_v.pop()
                    continue
                if v - out_v[-1] <= TOL:
                    continue
            out_b.append(b)
            out_v.append(v)
        object.__setattr__(self, "breakpoints", tuple(out_b))
        object.__setattr__(self, "values", tuple(out_v))

    @classmethod
    def constant(cls, c: float) -> StepQuantile:
        return cls((0.0,), (c,))

    def __call__(self, t: float) -> float:
        return evaluate(self, t)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StepQuantile):
            return NotImplemented
        return (
            len(self.breakpoints) == len(other.breakpoints)
            and all(abs(a - b) <= TOL for a, b in zip(self.breakpoints, other.breakpoints))
            and all(abs(a - b) <= TOL for a, b in zip(self.values, other.values))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        segs = ", ".join(f"{v:g}@{b:g}" for b, v in zip(self.breakpoints, self.values))
        return f"StepQuantile({segs})"

    @property
    def segments(self) -> list[tuple[float, float, float]]:
        """``(start, end, value)`` triples covering [0, 1)."""
        ends = self.breakpoints[1:] + (1.0,)
        return list(zip(self.breakpoints, ends, self.values))

    @property
    def max_value(self) -> float:
        return self.values[-1]


@dataclass(frozen=True, eq=False)
class PiecewiseLinearFn:
    """Continuous piecewise-linear function on [0, 1].

    Slopes are stored next to the knot ordinates so that slopes which come
    from exact inputs (quantile values) survive arithmetic without the
    cancellation a finite difference over a short segment would introduce.
    """

    xs: tuple[float, ...]
    ys: tuple[float, ...]
    slopes: tuple[float, ...]

    def __post_init__(self) -> None:
        xs = [_finite(x, "knot abscissa") for x in self.xs]
        ys = [_finite(y, "knot ordinate") for y in self.ys]
        ss = [_finite(s, "slope") for s in self.slopes]
        if len(xs) < 2 or len(ys) != len(xs) or len(ss) != len(xs) - 1:
            raise ValidationError("need at least two knots and one slope per segment")
        if abs(xs[0]) > TOL or abs(xs[-1] - 1.0) > TOL:
            raise ValidationError("knots must span exactly [0, 1]")
        xs[0], xs[-1] = 0.0, 1.0
        for a, b in zip(xs, xs[1:]):
            if not b > a:
                raise ValidationError("knot abscissae must be strictly increasing")
        out_x, out_y, out_s = [xs[0]], [ys[0]], []
        for i, s in enumerate(ss):
            if out_s and abs(s - out_s[-1]) <= TOL:
                out_x[-1], out_y[-1] = xs[i + 1], ys[i + 1]
                continue
            out_x.append(xs[i + 1])
            out_y.append(ys[i + 1])
            out_s.append(s)
        object.__setattr__(self, "xs", tuple(out_x))
        object.__setattr__(self, "ys", tuple(out_y))
        object.__setattr__(self, "slopes", tuple(out_s))

    @classmethod
    def from_knots(cls, knots: Sequence[Sequence[float]]) -> PiecewiseLinearFn:
        xs = [float(k[0]) for k in knots]
        ys = [float(k[1]) for k in knots]
        if len(xs) < 2:
            raise ValidationError("need at least two knots")
        for a, b in zip(xs, xs[1:]):
            if not b > a:
                raise ValidationError("knot abscissae must be strictly increasing")
        slopes = [(y1 - y0) / (x1 - x0) for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:])]
        return cls(tuple(xs), tuple(ys), tuple(slopes))

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.xs, self.ys))

    def __call__(self, x: float) -> float:
        if not 0.0 <= x <= 1.0:
            raise ValidationError(f"argument must lie in [0, 1], got {x!r}")
        i = bisect_right(self.xs, x) - 1
        if self.xs[i] == x:
            return self.ys[i]
        return self.ys[i] + self.slopes[i] * (x - self.xs[i])

    def slope_at(self, x: float) -> float:
        """Right slope at ``x`` (left slope at 1)."""
        i = min(bisect_right(self.xs, x) - 1, len(self.slopes) - 1)
        return self.slopes[i]

    def on_grid(self, grid: Sequence[float]) -> tuple[list[float], list[float]]:
        """Ordinates at each grid point and slope on each grid cell.

        ``grid`` must contain all knots of ``self``.
        """
        ys = [self(x) for x in grid]
        ss = [self.slope_at(0.5 * (a + b)) for a, b in zip(grid, grid[1:])]
        return ys, ss

    def __add__(self, other: PiecewiseLinearFn) -> PiecewiseLinearFn:
        return _combine(self, other, 1.0)

    def __sub__(self, other: PiecewiseLinearFn) -> PiecewiseLinearFn:
        return _combine(self, other, -1.0)

    def __neg__(self) -> PiecewiseLinearFn:
        return PiecewiseLinearFn(self.xs, tuple(-y for y in self.ys), tuple(-s for s in self.slopes))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PiecewiseLinearFn):
            return NotImplemented
        grid = merge_grid(self.xs, other.xs)
        return all(abs(self(x) - other(x)) <= TOL for x in grid)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return "PiecewiseLinearFn(" + ", ".join(f"({x:g}, {y:g})" for x, y in self.knots) + ")"


def _combine(a: PiecewiseLinearFn, b: PiecewiseLinearFn, sign: float) -> PiecewiseLinearFn:
    grid = merge_grid(a.xs, b.xs)
    ya, sa = a.on_grid(grid)
    yb, sb = b.on_grid(grid)
    if sign > 0:
        return PiecewiseLinearFn(
            tuple(grid), tuple(p + q for p, q in zip(ya, yb)), tuple(p + q for p, q in zip(sa, sb))
        )
    return PiecewiseLinearFn(
        tuple(grid), tuple(p - q for p, q in zip(ya, yb)), tuple(p - q for p, q in zip(sa, sb))
    )


def evaluate(q: StepQuantile, t: float) -> float:
    if not 0.0 <= t < 1.0:
        raise ValidationError(f"quantile level must lie in [0, 1), got {t!r}")
    return q.values[bisect_right(q.breakpoints, t) - 1]


def integrate(q: StepQuantile) -> PiecewiseLinearFn:
    """``t -> int_0^t q(r) dr`` as a convex piecewise-linear function."""
    xs = q.breakpoints + (1.0,)
    widths = [b - a for a, b in zip(xs, xs[1:])]
    ys = (0.0,) + tuple(accumulate(v * w for v, w in zip(q.values, widths)))
    return PiecewiseLinearFn(xs, ys, q.values)


def pointwise_max(a: StepQuantile, b: StepQuantile) -> StepQuantile:
    grid = merge_grid(a.breakpoints, b.breakpoints)
    return StepQuantile(tuple(grid), tuple(max(a(t), b(t)) for t in grid))


def maximum(a: PiecewiseLinearFn, b: PiecewiseLinearFn) -> PiecewiseLinearFn:
    """Upper envelope of two piecewise-linear functions.

    Crossing abscissae are inserted as knots; every output slope is copied
    from one of the inputs.
    """
    grid = merge_grid(a.xs, b.xs)
    ya, sa = a.on_grid(grid)
    yb, sb = b.on_grid(grid)
    xs, ys, ss = [grid[0]], [max(ya[0], yb[0])], []
    for i in range(len(grid) - 1):
        x0, x1 = grid[i], grid[i + 1]
        d0, d1 = ya[i] - yb[i], ya[i + 1] - yb[i + 1]
        a_first = d0 > 0 or (d0 == 0 and sa[i] >= sb[i])
        if (d0 > 0 > d1) or (d0 < 0 < d1):
            xc = x0 + d0 / (sb[i] - sa[i])
            if x0 + SNAP < xc < x1 - SNAP:
                xs.append(xc)
                ys.append(a(xc) if a_first else b(xc))
                ss.append(sa[i] if a_first else sb[i])
                a_first = not a_first
            elif xc <= x0 + SNAP:
                a_first = not a_first
        xs.append(x1)
        ys.append(max(ya[i + 1], yb[i + 1]))
        ss.append(sa[i] if a_first else sb[i])
    return PiecewiseLinearFn(tuple(xs), tuple(ys), tuple(ss))


def right_slopes(p: PiecewiseLinearFn) -> StepQuantile:
    """Right derivative of a convex increasing piecewise-linear function."""
    for s0, s1 in zip(p.slopes, p.slopes[1:]):
        if s1 < s0 - TOL:
            raise ValidationError(f"function is not convex: slope {s1!r} follows {s0!r}")
    if p.slopes[0] < -TOL:
        raise ValidationError(f"function is decreasing: slope {p.slopes[0]!r}")
    return StepQuantile(p.xs[:-1], tuple(max(s, 0.0) for s in p.slopes))


def from_samples(values: Sequence[float], weights: Sequence[float] | None = None) -> StepQuantile:
    """Upper empirical quantile ``Q(p) = inf{x : F(x) > p}`` of a weighted sample.

    Parameters
    ----------
    values : sequence of float
        Nonnegative sample points. Duplicates are merged and their weights
        summed.
    weights : sequence of float, optional
        Positive probabilities summing to 1 within ``TOL``. Uniform if omitted.
    """
    vals = [_finite(v, "sample") for v in values]
    if not vals:
        raise ValidationError("sample must be nonempty")
    if any(v < 0 for v in vals):
        raise ValidationError("samples must be nonnegative")
    if weights is None:
        n = len(vals)
        counts: dict[float, int] = {}
        for v in vals:
            counts[v] = counts.get(v, 0) + 1
        xs = sorted(counts)
        cum = list(accumulate(counts[x] for x in xs))
        levels = [c / n for c in cum]
    else:
        ws = [_finite(w, "weight") for w in weights]
        if len(ws) != len(vals):
            raise ValidationError("values and weights differ in length")
        if any(w <= 0 for w in ws):
            raise ValidationError("weights must be positive")
        if abs(math.fsum(ws) - 1.0) > TOL:
            raise ValidationError(f"weights must sum to 1, got {math.fsum(ws)!r}")
        mass: dict[float, list[float]] = {}
        for v, w in zip(vals, ws):
            mass.setdefault(v, []).append(w)
        xs = sorted(mass)
        # fsum over the whole prefix is correctly rounded, so equal masses
        # give bitwise-equal levels however they are grouped or ordered
        levels, prefix = [], []
        for x in xs:
            prefix.extend(mass[x])
            levels.append(math.fsum(prefix))
    return StepQuantile((0.0, *levels[:-1]), tuple(xs))
