"""Acceptance criteria 1-13, one test each; every test prints a pass/fail line."""

import pytest

from spectregap import verify


@pytest.mark.parametrize("number", sorted(verify.CRITERIA))
def test_criterion(number, capsys):
    result = verify.CRITERIA[number]()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
