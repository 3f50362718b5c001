"""Acceptance criteria 1-10, each at its stated tolerance and runtime limit.

Each test prints one PASS/FAIL line; the lines are repeated in the terminal
summary at the end of the run.
"""

import pytest

from gbta import acceptance

RESULTS = []


def check(number):
    res = acceptance.run(number)
    line = res.line()
    print(line)
    RESULTS.append(line)
    assert res.passed, line


def test_criterion_01_commutativity_and_rows():
    check(1)


def test_criterion_02_polarization():
    check(2)


def test_criterion_03_basis_change():
    check(3)


def test_criterion_04_nilpotents():
    check(4)


def test_criterion_05_idempotents():
    check(5)


def test_criterion_06_solvability():
    check(6)


def test_criterion_07_ideal_lattices():
    check(7)


def test_criterion_08_enveloping():
    check(8)


def test_criterion_09_isomorphism():
    check(9)


def test_criterion_10_trajectory():
    check(10)


if __name__ == "__main__":
    for n in sorted(acceptance.CHECKS):
        print(acceptance.run(n).line(), flush=True)
