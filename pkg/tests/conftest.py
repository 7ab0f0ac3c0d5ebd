import pytest

from nullstring.catalog import get_entry
from nullstring.geometry import curvature


@pytest.fixture(scope="session")
def dks():
    return get_entry("dks").build()


@pytest.fixture(scope="session")
def dks_curv(dks):
    return curvature(dks)


@pytest.fixture(scope="session")
def einstein():
    return get_entry("einstein").build()


@pytest.fixture(scope="session")
def einstein0():
    return get_entry("einstein-f0").build()


@pytest.fixture(scope="session")
def ne2():
    return get_entry("non-einstein-2").build()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for suite in mod.CRITERIA:
        terminalreporter.write_line(mod.RESULTS.get(suite, f"NOT RUN {suite}"))
