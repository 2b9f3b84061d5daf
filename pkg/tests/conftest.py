import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from primerem.integrals import RemainderIntegrals  # noqa: E402
from primerem.nsolve import NSolver  # noqa: E402
from primerem.primes import PrimeEngine  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def engine():
    return PrimeEngine()


@pytest.fixture(scope="session")
def integrals(engine):
    return RemainderIntegrals(engine)


@pytest.fixture(scope="session")
def solver(integrals):
    return NSolver(integrals)


@pytest.fixture(scope="session")
def lifted_solver(engine):
    return NSolver(RemainderIntegrals(engine, delta_max=0.7))


@pytest.fixture(scope="session")
def big_integrals():
    """Engine whose sieve table covers [0, 10^8]."""
    return RemainderIntegrals(PrimeEngine(table_limit=10**8))


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
