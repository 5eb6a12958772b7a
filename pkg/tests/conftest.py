import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def white_noise(rng, n, t):
    return rng.standard_normal((n, t))


def coupled_pair(rng, t, coef=0.8):
    """x2(t) = coef * x1(t-1) + eps with x1, eps standard white noise."""
    x1 = rng.standard_normal(t)
    eps = rng.standard_normal(t)
    x2 = np.empty(t)
    x2[0] = eps[0]
    x2[1:] = coef * x1[:-1] + eps[1:]
    return np.vstack([x1, x2])


# one line per acceptance criterion, printed after the test session
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    def record(number, title, ok, detail):
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
