"""One test per acceptance criterion; each prints a PASS/FAIL line.

The lines are also repeated in the terminal summary (see conftest.py), so
they show up in plain ``pytest -v`` output without ``-s``.
"""

import pytest

from quadradyn.verify import CHECKS, run_checks

RESULTS: dict[int, str] = {}


@pytest.mark.parametrize("number", sorted(CHECKS), ids=lambda n: f"criterion_{n:02d}")
def test_acceptance_criterion(number):
    (result,) = run_checks([number])
    RESULTS[number] = result.line()
    print(result.line())
    assert result.passed, result.line()
