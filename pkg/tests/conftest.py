"""Shared fixtures: kernel warmup and the acceptance-criteria summary."""
import numpy as np
import pytest

from eulerlab import (
    AdditiveParams,
    additive_problem,
    euler_solve,
    linear_problem,
    multiplicative_instance,
    multiplicative_problem,
    sup_error,
)

# One line per acceptance criterion, printed after the run so pass/fail
# verdicts are visible even with output capture on.
CRITERIA_LOG: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once, outside any timed region."""
    euler_solve(linear_problem(1.0), 8)
    add = additive_problem(
        AdditiveParams(A=2.0, B1=-2.0, B2=-0.5, alpha=1.0, rho1=1.0, rho2=0.75),
        0.0,
        10.0,
        3.0,
    )
    euler_solve(add, 8)
    mul = multiplicative_problem(multiplicative_instance(), 0.0, 10.0, 3.0)
    euler_solve(mul, 8)
    t1 = euler_solve(linear_problem(1.0), 4)
    t2 = euler_solve(linear_problem(1.0), 8)
    sup_error(t1, t2)


@pytest.fixture
def criterion():
    """Recorder for one acceptance-criterion verdict line."""

    def record(line: str) -> None:
        CRITERIA_LOG.append(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERIA_LOG:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in CRITERIA_LOG:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20260818)
