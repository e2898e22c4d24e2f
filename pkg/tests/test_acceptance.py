"""The acceptance gate: one test per shipped guarantee, exact comparisons.

Each criterion prints a pass/fail line; run with -s to see them all.
"""

import pytest

from fisoc.acceptance import CRITERIA, _run


@pytest.mark.parametrize("name,limit,fn", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_criterion(name, limit, fn):
    result = _run(name, limit, fn)
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] {result.name}: {result.detail} ({result.seconds:.2f}s)")
    assert result.passed, f"{result.name}: {result.detail}"
    assert result.seconds <= result.limit
