import math

import pytest

ACCEPTANCE_LINES = {}


def record_acceptance(number, passed, detail):
    ACCEPTANCE_LINES[number] = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def within(a, b, k, *stderrs):
    """True when ``|a - b| <= k * sqrt(sum of squared stderrs)``."""
    return abs(a - b) <= k * math.sqrt(sum(s * s for s in stderrs))


@pytest.fixture
def acceptance():
    return record_acceptance
