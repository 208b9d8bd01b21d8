import math
import time

import pytest

from zetapair import arithmetic, predictions, zeros


TIMINGS = {}


@pytest.fixture(scope="session")
def zeros10k():
    t0 = time.perf_counter()
    zl = zeros.first_zeros(10_000)
    TIMINGS["first_10000_zeros"] = time.perf_counter() - t0
    return zl


@pytest.fixture(scope="session")
def zeros500(zeros10k):
    return zeros10k.first(500)


@pytest.fixture(scope="session")
def zeros5000():
    return zeros.find_zeros(0.0, 5000.0)


@pytest.fixture(scope="session")
def tables_small():
    return arithmetic.build_tables(10_000)


@pytest.fixture(scope="session")
def tables_big():
    return arithmetic.build_tables(10**6)


@pytest.fixture(scope="session")
def ctx(tables_big):
    return predictions.KernelContext(tables=tables_big)


@pytest.fixture(scope="session")
def T10k(zeros10k):
    return float(zeros10k.ordinates[-1])


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


TWO_PI = 2 * math.pi


CRITERIA = {}


def record(n, ok, detail):
    """Print and keep one PASS/FAIL line for an acceptance criterion."""
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERIA[n] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[n])
