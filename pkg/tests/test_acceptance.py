"""The eleven acceptance criteria, one test each, via the shared suites."""

import time

import pytest

from nullstring.verify import SUITES, run_suite

CRITERIA = list(SUITES)
RESULTS: dict[str, str] = {}


def test_eleven_criteria():
    assert len(CRITERIA) == 11


@pytest.mark.parametrize("number, suite", list(enumerate(CRITERIA, 1)), ids=CRITERIA)
def test_criterion(number, suite):
    t0 = time.perf_counter()
    checks = run_suite(suite)
    dt = time.perf_counter() - t0
    failed = [c.name for c in checks if not c.ok]
    status = "PASS" if checks and not failed else "FAIL"
    line = f"{status} criterion {number:2d} {suite}: {SUITES[suite][0]} ({len(checks)} checks, {dt:.1f}s)"
    RESULTS[suite] = line
    print(line)
    assert checks, "suite produced no checks"
    assert not failed, f"failing checks: {failed}"


def test_kernel_criterion_detects_epsilon_sign_error(monkeypatch):
    from nullstring import spinor as sp

    monkeypatch.setattr(sp, "EPS_LOWER", ((0, -1), (1, 0)))
    checks = run_suite("kernel")
    assert not all(c.ok for c in checks)
