import pytest

from propus.families import DiffFamily
from propus.residues import ResidueSet

ACCEPTANCE_RESULTS = {}


def rs(v, *xs):
    return ResidueSet.of(v, xs)


@pytest.fixture
def fam5():
    """The desk-scale PDF (5;2,1,1,2;1): X1={1,4}, X2=X3={0}, X4={0,1}."""
    return DiffFamily.from_blocks(rs(5, 1, 4), rs(5, 0), rs(5, 0, 1), symbol="s**")


@pytest.fixture
def acceptance():
    return ACCEPTANCE_RESULTS


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
