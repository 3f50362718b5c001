"""Associative algebra generated by the left multiplications of B'(lambda, beta).

Matrices act on coordinate columns: (l_x) v = x . v. For span arithmetic a
4x4 matrix is flattened row-major into R^16.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import linalg
from .algebra import TRANSFORMED, Element, multiply, transformed_table
from .classify import VerificationFailed
from .params import Params

MAX_ROUNDS = 16


class NoConvergence(RuntimeError):
    pass


class Pattern(enum.Enum):
    M0 = "M0"
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    UNRECOGNIZED = "Unrecognized"


# nonzero positions (row, col), 0-based; all patterns share the first column
_BASE = [(0, 0), (1, 0), (2, 0), (3, 0), (1, 1), (2, 2), (3, 1), (3, 2)]
STARS = {
    Pattern.M0: _BASE,
    Pattern.M1: _BASE + [(1, 2)],
    Pattern.M2: _BASE + [(2, 1)],
    Pattern.M3: _BASE + [(1, 2), (2, 1)],
}
EXPECTED_DIM = {pat: len(s) for pat, s in STARS.items()}


@dataclass(frozen=True)
class LeftMulSet:
    l_o: np.ndarray
    l_a: np.ndarray
    l_b: np.ndarray
    l_ab: np.ndarray

    def generators(self) -> list[np.ndarray]:
        """The generating set {l_o, l_a, l_b}; l_ab is zero."""
        return [self.l_o, self.l_a, self.l_b]


def _E(i: int, j: int, p: Params) -> np.ndarray:
    m = np.zeros((4, 4), dtype=object if p.exact else float)
    if p.exact:
        m[...] = p.one() * 0
    m[i - 1, j - 1] = p.one()
    return m


def left_mul_matrices(p: Params) -> LeftMulSet:
    """The four left-multiplication matrices, written out from their closed form.

    Raises:
        VerificationFailed: a column disagrees with the multiplication table.
    """
    lam, be = p.lam, p.beta
    u = (lam - be) / lam
    w = (lam + be - 1) / lam
    E = lambda i, j: _E(i, j, p)  # noqa: E731
    l_o = E(1, 1) + lam * E(2, 2) + lam * E(3, 3)
    l_a = lam * E(2, 1) + E(2, 2) + u * E(2, 3) + w * E(3, 3) + E(4, 3)
    l_b = u * E(2, 2) + lam * E(3, 1) + w * E(3, 2) + E(3, 3) + E(4, 2)
    l_ab = E(1, 1) * 0
    mats = LeftMulSet(l_o, l_a, l_b, l_ab)

    t = transformed_table(p)
    for name, m in zip(TRANSFORMED.names, (l_o, l_a, l_b, l_ab)):
        x = Element.unit(name, TRANSFORMED, exact=p.exact)
        for j, vname in enumerate(TRANSFORMED.names):
            v = Element.unit(vname, TRANSFORMED, exact=p.exact)
            prod = multiply(t, x, v).coords
            col = m[:, j]
            ok = all(a == b for a, b in zip(col, prod)) if p.exact else np.allclose(col, prod, rtol=0, atol=p.tol)
            if not ok:
                raise VerificationFailed(f"column {vname} of l_{name} disagrees with {name}.{vname}")
    return mats


def _flat(mats) -> np.ndarray:
    return np.array([np.asarray(m).reshape(16) for m in mats])


def _unflat(rows: np.ndarray) -> np.ndarray:
    return rows.reshape(-1, 4, 4)


def generate_subalgebra(gens, tol: float = linalg.DEFAULT_TOL) -> linalg.Subspace:
    """Smallest product-closed subspace of 4x4 matrices containing ``gens``.

    Every round multiplies all ordered pairs of current basis matrices and
    re-spans, until the dimension stops growing. No identity is adjoined.

    Raises:
        NoConvergence: the dimension still grows after 16 rounds.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("at least one generator is required")
    s = linalg.span(_flat(gens), tol)
    for _ in range(MAX_ROUNDS):
        if s.dim == 0:
            return s
        basis = _unflat(s.basis_rows)
        prods = np.einsum("aij,bjk->abik", basis, basis).reshape(-1, 16)
        grown = linalg.join([s], prods, tol)
        if grown.dim == s.dim:
            return s
        s = grown
    raise NoConvergence(f"dimension still growing after {MAX_ROUNDS} rounds")


def pattern_space(pattern: Pattern, exact: bool = False, tol: float = linalg.DEFAULT_TOL) -> linalg.Subspace:
    return linalg.coordinate(16, [4 * i + j for i, j in STARS[pattern]], exact=exact, tol=tol)


def match_pattern(basis16: linalg.Subspace) -> Pattern:
    """The star pattern whose coordinate subspace equals ``basis16``, if any."""
    if basis16.ambient_dim != 16:
        raise linalg.DimensionMismatch(f"expected a subspace of R^16, got R^{basis16.ambient_dim}")
    for pat in STARS:
        if basis16.dim == EXPECTED_DIM[pat] and linalg.equal(
                basis16, pattern_space(pat, basis16.exact, basis16.tol_used)):
            return pat
    return Pattern.UNRECOGNIZED


def is_product_closed(s: linalg.Subspace, samples: int = 20, seed: int = 0) -> bool:
    """Check AB in ``s`` for random A, B in ``s`` and for all basis pairs."""
    if s.dim == 0:
        return True
    basis = _unflat(s.basis_rows.astype(float))
    rng = np.random.default_rng(seed)
    pairs = np.einsum("aij,bjk->abik", basis, basis).reshape(-1, 16)
    ca, cb = rng.standard_normal((2, samples, s.dim))
    A = np.einsum("na,aij->nij", ca, basis)
    B = np.einsum("nb,bij->nij", cb, basis)
    rand = np.einsum("nij,njk->nik", A, B).reshape(-1, 16)
    return linalg.contains_all(s, pairs) and linalg.contains_all(s, rand)


@dataclass(frozen=True)
class EnvelopingReport:
    dimension: int
    pattern: Pattern
    basis16: linalg.Subspace
    generators_verified: bool
    closed: bool

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "pattern": self.pattern.value,
            "generators_verified": self.generators_verified,
            "product_closed": self.closed,
        }


def enveloping(p: Params) -> EnvelopingReport:
    """Generate the algebra of {l_o, l_a, l_b} and identify its pattern."""
    mats = left_mul_matrices(p)
    gens = mats.generators()
    s = generate_subalgebra(gens, p.tol)
    pat = match_pattern(s)
    inside = pattern_space(pat, s.exact, p.tol) if pat is not Pattern.UNRECOGNIZED else s
    verified = all(linalg.contains(s, g.reshape(16)) and linalg.contains(inside, g.reshape(16)) for g in gens)
    return EnvelopingReport(s.dim, pat, s, verified, is_product_closed(s))
