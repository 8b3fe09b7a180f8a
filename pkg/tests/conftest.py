from pathlib import Path

import numpy as np
import pytest

from breathing_rotators.hessian import state_from_gauge
from breathing_rotators.sampling import gauge_at, random_generic_polynomial, random_invariants

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_case(rng, m=1.0, ell=1.0):
    """A generic model with a valid state inside its domain."""
    model = random_generic_polynomial(rng)
    P, Q = random_invariants(model, rng)
    c = gauge_at(P, Q, rng)
    return model, c, state_from_gauge(c, m, ell)


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
