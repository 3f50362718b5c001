from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from gbta import linalg
from gbta.enveloping import left_mul_matrices
from gbta.params import new_params

E = np.eye(4)


def test_span_examples():
    assert linalg.span([[1, 0, 0, 0], [1, 1, 0, 0]]).dim == 2
    assert linalg.span([[0, 0, 0, 0]]).dim == 0


def test_left_mul_span_rank():
    for mode in ("float64", "rational"):
        m = left_mul_matrices(new_params("1/2", "3/10", mode=mode))
        rows = [g.reshape(16) for g in m.generators()]
        assert linalg.rank(rows) == 3
    q = new_params("1/2", "3/10", mode="rational")
    exact = sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in g.reshape(16)]
                       for g in left_mul_matrices(q).generators()])
    assert exact.rank() == 3


def test_contains_examples():
    s = linalg.span([E[0], E[1]])
    assert linalg.contains(s, E[0] + E[1])
    assert not linalg.contains(linalg.span([E[0]]), E[1])
    abab = linalg.coordinate(4, [1, 2, 3], exact=True)
    assert not linalg.contains(abab, np.array([Fraction(1), 0, 0, 0], dtype=object))


def test_equal_examples():
    assert linalg.equal(linalg.span([E[0], E[1]]), linalg.span([E[0] + E[1], E[0] - E[1]]))
    assert not linalg.equal(linalg.span([E[0]]), linalg.span([E[1]]))
    assert linalg.span([E[1] + E[2], E[3]]) == linalg.span([E[1] + E[2], 3 * E[3]])


def test_dimension_errors():
    with pytest.raises(linalg.DimensionMismatch):
        linalg.span([[1, 0, 0], [0, 1, 0]])
    with pytest.raises(linalg.DimensionMismatch):
        linalg.span([[1, 0, 0, 0], [0, 1, 0, 0, 0]])
    with pytest.raises(linalg.DimensionMismatch):
        linalg.contains(linalg.span([E[0]]), np.zeros(16))


def test_pivot_tie_breaks_to_lowest_row():
    basis, pivots = linalg.rref(np.array([[1.0, 2, 0, 0], [-1.0, 0, 0, 0]]))
    assert pivots == [0, 1]
    np.testing.assert_allclose(basis, [[1, 0, 0, 0], [0, 1, 0, 0]])


def test_relative_threshold_is_scale_invariant():
    v = np.array([[1.0, 0, 0, 0], [0, 1e-12, 0, 0]])
    assert linalg.rank(v) == 1
    assert linalg.rank(v * 1e-20) == 1
    assert linalg.rank(np.array([[1e-20, 0, 0, 0], [0, 1e-20, 0, 0]])) == 2


small = st.integers(min_value=-1000, max_value=1000)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.sampled_from([4, 16]), st.data())
def test_rank_matches_sympy(nrows, ncols, data):
    rows = data.draw(st.lists(st.lists(small, min_size=ncols, max_size=ncols), min_size=nrows, max_size=nrows))
    # make some rows dependent
    if nrows > 2 and data.draw(st.booleans()):
        rows[-1] = [a + 2 * b for a, b in zip(rows[0], rows[1])]
    expected = sp.Matrix(rows).rank()
    assert linalg.rank(np.array(rows, dtype=float)) == expected
    exact = np.array([[Fraction(x) for x in r] for r in rows], dtype=object)
    assert linalg.rank(exact) == expected


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.floats(-10, 10), min_size=16, max_size=16), min_size=1, max_size=5))
def test_span_idempotent_and_contains_generators(rows):
    s = linalg.span(rows)
    assert linalg.span(s.basis_rows) == s
    for r in rows:
        assert linalg.contains(s, r)


def test_join_and_subspace():
    a = linalg.coordinate(4, [3])
    b = linalg.coordinate(4, [1, 3])
    assert a <= b and not b <= a
    assert linalg.join([a], [E[1]]) == b
    assert linalg.join([a, linalg.coordinate(4, [2])]).dim == 2


def test_exact_residual():
    s = linalg.span(np.array([[Fraction(1), Fraction(1), 0, 0]], dtype=object))
    r = linalg.residual(s, np.array([Fraction(2), Fraction(2), 0, Fraction(1)], dtype=object))
    assert list(r) == [0, 0, 0, 1]
