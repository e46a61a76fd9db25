import cmath
import math

import numpy as np
import pytest
from hypothesis import strategies as st


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)


def annulus_complex(r_min=0.2, r_max=5.0, gap=0.05):
    """Hypothesis strategy for complex numbers in an annulus, away from 1."""
    return st.builds(
        lambda r, a: r * cmath.exp(1j * a),
        st.floats(min_value=r_min, max_value=r_max),
        st.floats(min_value=-math.pi, max_value=math.pi),
    ).filter(lambda w: abs(w - 1) > gap and abs(w.imag) > 1e-6)


def rel(a, b):
    return abs(a - b) / max(1.0, abs(a), abs(b))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
