"""Shared oracles for the test suite."""

from fractions import Fraction

import numpy as np
import sympy as sp

from gbta.algebra import transformed_table
from gbta.params import new_params

PHENO = ("O", "A", "B", "AB")


def gametes(phenotype, alpha, beta):
    """Gamete distribution of a parent with the given phenotype."""
    return {
        "O": {"O": 1},
        "A": {"O": alpha, "A": 1 - alpha},
        "B": {"O": alpha, "B": 1 - alpha},
        "AB": {"A": beta, "B": 1 - beta},
    }[phenotype]


def offspring(g1, g2):
    pair = {g1, g2}
    if pair == {"O"}:
        return "O"
    if pair == {"A", "B"}:
        return "AB"
    return "A" if "A" in pair else "B"


def punnett_table(alpha, beta):
    """Phenotype structure constants by enumerating gamete pairs."""
    zero = alpha * 0
    c = np.empty((4, 4, 4), dtype=object)
    c[...] = zero
    for i, x in enumerate(PHENO):
        for j, y in enumerate(PHENO):
            for g1, p1 in gametes(x, alpha, beta).items():
                for g2, p2 in gametes(y, alpha, beta).items():
                    c[i, j, PHENO.index(offspring(g1, g2))] += p1 * p2
    return c


def sympy_idempotents(lam, beta):
    """Nonzero real solutions of x.x = x, solved exactly."""
    p = new_params(lam, beta, mode="rational")
    c = transformed_table(p).c
    xs = sp.symbols("x0:4")
    eqs = [
        sp.expand(sum(xs[i] * xs[j] * sp.Rational(c[i, j, k].numerator, c[i, j, k].denominator)
                      for i in range(4) for j in range(4)) - xs[k])
        for k in range(4)
    ]
    sols = sp.solve(eqs, xs, dict=True)
    out = []
    for s in sols:
        v = [s.get(x, x) for x in xs]
        if all(e.is_real for e in v) and any(e != 0 for e in v):
            out.append([Fraction(int(sp.numer(e)), int(sp.denom(e))) if e.is_rational else float(e) for e in v])
    return out


def p_point(m):
    """Rational point of P from the slope m > 3 of a line through (1/3, 1/2).

    With u = 1 - lambda, u (3u - 2) = w^2 is parametrised by w = m (u - 2/3).
    """
    m = Fraction(m)
    u = 2 * m * m / (3 * (m * m - 3))
    w = m * (u - Fraction(2, 3))
    return 1 - u, (1 + w) / 2


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
