import numpy as np
import pytest

from v2vpl.estimation import Direction, Trace
from v2vpl.propagation import eval_median, sample_shadowing

F = 59.6


def make_trace(d, pl, direction=Direction.MOVING_IN, speed=13.89, f=F):
    d = np.asarray(d, dtype=float)
    return Trace(np.arange(d.size) * 0.005, d, pl, direction, speed, f)


def model_trace(model, d, sigma=0.0, seed=0, f=F, **kw):
    d = np.asarray(d, dtype=float)
    pl = eval_median(model, f, d)
    if sigma:
        pl = pl + sample_shadowing(sigma, np.random.default_rng(seed), d.size)
    return make_trace(d, pl, f=f, **kw)


def lstsq_oracle(x, y):
    """Intercept and slope through numpy's generic least squares solver."""
    X = np.column_stack([np.ones_like(x), x])
    (a, b), *_ = np.linalg.lstsq(X, y, rcond=None)
    return a, b


@pytest.fixture
def grid():
    return np.linspace(1.0, 35.0, 468)


_acceptance: list[tuple[str, str, float]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _acceptance.append((name, "PASS" if report.passed else "FAIL", report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, duration in _acceptance:
        terminalreporter.write_line(f"{status}  {name}  ({duration:.2f} s)")
