import numpy as np
import pytest

from guideboot.core import FieldLayout, RngStream


@pytest.fixture
def layout():
    return FieldLayout((25, 5, 5))


@pytest.fixture
def small_layout():
    return FieldLayout((4, 3, 2))


@pytest.fixture
def stream():
    return RngStream(1234).derive("tests")


def random_codes(layout, n, seed=0):
    g = np.random.default_rng(seed)
    return np.stack([g.integers(0, c, size=n) for c in layout.cardinalities], axis=1)


# acceptance results, printed as one line per criterion at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def report():
    def record(number: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(ACCEPTANCE_LINES[number])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
