"""The twelve acceptance criteria, one test each.

Every test prints a pass/fail line (also collected into the terminal summary).
Run ``python tests/test_acceptance.py`` for the bare list of lines.

Two criteria cannot hold as stated because the published closed forms they
compare against are defective; those tests keep the strict comparison and are
marked as expected failures.  The repaired forms are checked in the rows of
the same result and in test_spectral.py / test_invariants.py.
"""
from __future__ import annotations

import sys

import pytest

from conftest import ACCEPTANCE_LINES
from h4algebra.config import RunConfig
from h4algebra.verification import CHECKS, CheckResult, run_checks

PRINTED_DEFECTS = {
    3: "the printed degree-30 table carries mislabeled partitions and is not invariant",
    9: "two printed eigenfunctions contain typos (a repeated t1^4 term and a halved denominator)",
}


@pytest.fixture(scope="session")
def acceptance(artifacts, config):
    cache: dict[int, CheckResult] = {}

    def result(number: int) -> CheckResult:
        if number not in cache:
            cache[number] = run_checks(artifacts, config, only=[number])[0]
            line = cache[number].line(timing=True)
            ACCEPTANCE_LINES[number] = line
            print(line)
        return cache[number]

    return result


def _criterion(number: int):
    marks = []
    if number in PRINTED_DEFECTS:
        marks.append(pytest.mark.xfail(strict=True, reason=PRINTED_DEFECTS[number]))
    return pytest.param(number, marks=marks, id=f"criterion-{number:02d}")


@pytest.mark.parametrize("number", [_criterion(n) for n in range(1, len(CHECKS) + 1)])
def test_criterion(acceptance, number):
    res = acceptance(number)
    assert res.passed is True, res.detail


def test_repaired_forms_hold(acceptance):
    rows = acceptance(9).rows
    repaired = [r for r in rows if r["form"] == "corrected"]
    assert len(repaired) == 5
    assert all(r.get("holds", r.get("solver_match")) for r in repaired)


def test_derived_coordinates_are_invariant(acceptance):
    assert all(r["invariant"] for r in acceptance(3).rows)
    assert [r["term_for_term"] for r in acceptance(3).rows] == [True, True, True, False]


@pytest.mark.parametrize("number", [8, 10])
def test_spectral_criteria_in_free_case(artifacts, number):
    res = run_checks(artifacts, RunConfig(nu=1), only=[number])[0]
    assert res.passed is True, res.detail


def test_symbolic_mode_skips_spectral_criteria(artifacts):
    res = run_checks(artifacts, RunConfig(nu=None, omega=None), only=[8, 10])
    assert [r.passed for r in res] == [None, None]
    assert all("skipped (symbolic)" in r.detail for r in res)


if __name__ == "__main__":
    from h4algebra.artifacts import Artifacts

    results = run_checks(Artifacts(), RunConfig(), on_result=lambda r: print(r.line(timing=True), flush=True))
    sys.exit(0 if all(r.passed for r in results) else 1)
