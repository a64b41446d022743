"""Acceptance criteria 1-10, one pass/fail line each.

Runs at full scale by default (several minutes).  Set
ISOCRYSTALS_ACCEPTANCE=quick for reduced instance counts.  Also runnable
directly: ``python3 tests/test_acceptance.py``.
"""

import os
import sys

import pytest

from isocrystals.acceptance import FULL, QUICK, run_all

CRITERIA = range(1, 11)


def _scale():
    return QUICK if os.environ.get("ISOCRYSTALS_ACCEPTANCE", "").lower() == "quick" else FULL


@pytest.fixture(scope="module")
def results(request):
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def emit(line):
        # bypass capture so the lines land in the test log
        with capman.global_and_fixture_disabled():
            sys.stdout.write(line + "\n")
            sys.stdout.flush()

    emit("")
    out = run_all(_scale(), report=emit)
    return {r.number: r for r in out}


@pytest.mark.parametrize("number", CRITERIA)
def test_criterion(results, number):
    res = results[number]
    assert res.passed, res.line()


if __name__ == "__main__":
    res = run_all(_scale())
    sys.exit(0 if all(r.passed for r in res) else 1)
