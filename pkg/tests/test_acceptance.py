"""Acceptance checks. Each prints one PASS/FAIL line with its measured figures.

Run standalone with ``python tests/test_acceptance.py`` for just the table.
"""
import sys

import pytest

from barenblatt_euler.validation import CRITERIA, run_criterion


def _line(result):
    return (f"[{'PASS' if result.passed else 'FAIL'}] {result.number:>2} {result.name} "
            f"({result.seconds:.1f}s): {result.detail}")


@pytest.mark.parametrize("criterion", CRITERIA,
                         ids=[f"{c.number:02d}-{c.name.replace(' ', '_')}" for c in CRITERIA])
def test_acceptance(criterion, capsys):
    result = run_criterion(criterion)
    with capsys.disabled():
        print("\n" + _line(result))
    assert result.passed, result.detail


if __name__ == "__main__":
    results = [run_criterion(c) for c in CRITERIA]
    for r in results:
        print(_line(r))
    sys.exit(0 if all(r.passed for r in results) else 1)
