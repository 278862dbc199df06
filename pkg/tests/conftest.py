from __future__ import annotations

import pytest
from hypothesis import strategies as st

from sdm.quantile import StepQuantile

S = StepQuantile

# worked examples shared across modules
EX_A = (S((0.0, 0.5), (0.0, 3.0)), S((0.0,), (2.0,)))
EX_B = (S((0.0,), (2.0,)), S((0.0, 0.25), (1.0, 4.0)))


@st.composite
def grid_quantiles(draw, max_segments: int = 8, t_grid: int = 64, vmax: float = 10.0):
    """Step quantiles with breakpoints on k/t_grid and values on multiples of 1/4."""
    k = draw(st.integers(1, max_segments))
    bps = draw(st.lists(st.integers(1, t_grid - 1), min_size=k - 1, max_size=k - 1, unique=True))
    vals = draw(st.lists(st.integers(0, int(4 * vmax)), min_size=k, max_size=k))
    return S((0.0, *sorted(b / t_grid for b in bps)), tuple(v / 4 for v in sorted(vals)))


@st.composite
def float_quantiles(draw, max_segments: int = 8):
    """Step quantiles with arbitrary float breakpoints and values."""
    k = draw(st.integers(1, max_segments))
    bps = draw(
        st.lists(st.floats(1e-6, 1 - 1e-6), min_size=k - 1, max_size=k - 1, unique=True)
    )
    vals = draw(st.lists(st.floats(0, 1e3), min_size=k, max_size=k))
    return S((0.0, *sorted(bps)), tuple(sorted(vals)))


_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
