import sys
from pathlib import Path

import numpy as np
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))


@st.composite
def channels(draw, min_in=1, max_in=4, min_out=1, max_out=4):
    """Row-stochastic matrices with some exact zeros, built from small integer weights."""
    k = draw(st.integers(min_in, max_in))
    j = draw(st.integers(min_out, max_out))
    rows = []
    for _ in range(k):
        weights = draw(st.lists(st.integers(0, 6), min_size=j, max_size=j).filter(lambda r: sum(r) > 0))
        rows.append(np.asarray(weights, dtype=float) / sum(weights))
    return np.vstack(rows)


@st.composite
def distributions(draw, size):
    weights = draw(st.lists(st.integers(0, 9), min_size=size, max_size=size).filter(lambda r: sum(r) > 0))
    return np.asarray(weights, dtype=float) / sum(weights)


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
