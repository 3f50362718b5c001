import numpy as np
import pytest

from gbta import linalg
from gbta.algebra import Element, multiply, transformed_table
from gbta.enveloping import (EXPECTED_DIM, Pattern, enveloping, generate_subalgebra, is_product_closed,
                             left_mul_matrices, match_pattern, pattern_space)
from gbta.params import new_params


def test_left_mul_examples():
    p = new_params(0.75, 0.5)
    m = left_mul_matrices(p)
    np.testing.assert_allclose(m.l_o @ [0, 1, 0, 0], [0, 0.75, 0, 0])
    assert not np.any(m.l_ab)
    # oracle: a-coordinate of a.b
    ab = multiply(transformed_table(p), Element.unit("a"), Element.unit("b"))
    assert m.l_a[1, 2] == pytest.approx(1 / 3) == pytest.approx(ab.coords[1])


def test_left_mul_consistent_with_multiply():
    rng = np.random.default_rng(0)
    for lam, beta in rng.uniform(0.05, 0.95, size=(50, 2)):
        p = new_params(lam, beta)
        t = transformed_table(p)
        m = left_mul_matrices(p)
        for name, mat in zip(("o", "a", "b", "ab"), (m.l_o, m.l_a, m.l_b, m.l_ab)):
            v = rng.standard_normal(4)
            np.testing.assert_allclose(mat @ v, t.product(np.eye(4)[["o", "a", "b", "ab"].index(name)], v), atol=1e-12)


def test_generate_examples():
    e11 = np.zeros((4, 4))
    e11[0, 0] = 1
    assert generate_subalgebra([e11]).dim == 1
    assert generate_subalgebra(left_mul_matrices(new_params(0.5, 0.5)).generators()).dim == 8
    assert generate_subalgebra(left_mul_matrices(new_params(0.5, 0.3)).generators()).dim == 10


@pytest.mark.parametrize("lam,beta,dim,pattern", [
    (0.5, 0.5, 8, Pattern.M0), (0.3, 0.3, 9, Pattern.M2), (0.6, 0.4, 9, Pattern.M1), (0.5, 0.3, 10, Pattern.M3),
])
def test_patterns(lam, beta, dim, pattern):
    for p in (new_params(lam, beta), new_params(str(lam), str(beta), mode="rational")):
        rep = enveloping(p)
        assert (rep.dimension, rep.pattern) == (dim, pattern)
        assert rep.generators_verified and rep.closed


def test_unrecognized():
    assert match_pattern(linalg.span([np.eye(4).reshape(16)])) is Pattern.UNRECOGNIZED


def test_pattern_dims():
    for pat, d in EXPECTED_DIM.items():
        assert pattern_space(pat).dim == d
        assert is_product_closed(pattern_space(pat))


def test_closure_detects_non_algebra():
    # span of l_a alone is not closed
    s = linalg.span([left_mul_matrices(new_params(0.5, 0.3)).l_a.reshape(16)])
    assert not is_product_closed(s)


def test_random_draws():
    rng = np.random.default_rng(1)
    for lam in rng.uniform(0.05, 0.95, 30):
        if abs(lam - 0.5) < 1e-3:
            continue
        assert enveloping(new_params(lam, lam)).pattern is Pattern.M2
        assert enveloping(new_params(lam, 1 - lam)).pattern is Pattern.M1
