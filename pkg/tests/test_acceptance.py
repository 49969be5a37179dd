"""Acceptance criteria 1-16 at their stated tolerances, one PASS/FAIL line each."""

import pytest

from blowup1d.cli.checks import CHECKS, Context, run_check

import conftest


@pytest.mark.parametrize("k", sorted(CHECKS))
def test_criterion(k):
    c = run_check(k, Context())
    line = c.line()
    conftest.ACCEPTANCE_LINES[k] = line
    print(line)
    assert c.passed, line
