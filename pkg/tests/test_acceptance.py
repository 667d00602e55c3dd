"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The full-scale run plays games on K_20000 and takes most of an hour on one
core.  Set AVOIDER_ENFORCER_QUICK=1 for a small-scale smoke run, or deselect
with ``-m "not acceptance"``.
"""

import os

import pytest

from avoider_enforcer.verify import CRITERIA, MUTATED_CENSUS_SCALE, AcceptanceSuite

pytestmark = pytest.mark.acceptance

QUICK = os.environ.get("AVOIDER_ENFORCER_QUICK", "") not in ("", "0")


@pytest.fixture(scope="module")
def results():
    suite = AcceptanceSuite(seeds=5, quick=QUICK)
    return {r.number: r for r in suite.run()}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, results, capsys):
    res = results[number]
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail


def test_tampered_census_constant_is_caught(capsys):
    suite = AcceptanceSuite(seeds=1, quick=True, census_scale=MUTATED_CENSUS_SCALE)
    (res,) = suite.run(only=[3])
    with capsys.disabled():
        print(f"\nmutation check (constant {MUTATED_CENSUS_SCALE:g} ln n): criterion 3 "
              f"{'FAIL as required' if not res.passed else 'PASS, mutation missed'}")
    assert not res.passed
