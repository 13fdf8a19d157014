"""Acceptance criteria at their stated tolerances, one line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the PASS/FAIL lines,
or use ``pinchlab verify``.
"""

import pytest

from pinchlab.acceptance import CHECKS, run_check


@pytest.mark.parametrize("name", list(CHECKS))
def test_criterion(name):
    result = run_check(name)
    print("\n" + result.line())
    assert result.passed, result.line()
