"""Multiplication tables of the ABO algebra in both bases.

Phenotype basis (O, A, B, AB): the ten meiosis products with
alpha = P(O | A) = P(O | B) and beta = P(A | AB).

Transformed basis (o, a, b, ab)::

    o  = O
    a  = (O - A) / lambda^2
    b  = (O - B) / lambda^2
    ab = (alpha O - beta A - (1 - beta) B + lambda AB) / lambda^3

in which o.o = o, o.a = lambda a, o.b = lambda b, a.a = a, b.b = b,
a.b = ((lambda - beta) a + (lambda + beta - 1) b) / lambda + ab, and ab
annihilates everything.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .params import Params


class BasisMismatch(ValueError):
    pass


class Basis(enum.Enum):
    PHENOTYPE = "phenotype"
    TRANSFORMED = "transformed"

    @property
    def names(self) -> tuple[str, str, str, str]:
        if self is Basis.PHENOTYPE:
            return ("O", "A", "B", "AB")
        return ("o", "a", "b", "ab")

    def index(self, name: str) -> int:
        return self.names.index(name)


PHENOTYPE = Basis.PHENOTYPE
TRANSFORMED = Basis.TRANSFORMED


def _coerce(coords, exact: bool | None = None) -> np.ndarray:
    arr = np.asarray(coords)
    if arr.shape != (4,):
        raise ValueError(f"an element needs 4 coordinates, got shape {arr.shape}")
    if exact is None:
        exact = arr.dtype == object
    if exact:
        out = np.array([Fraction(x) for x in arr.tolist()], dtype=object)
    else:
        out = arr.astype(float)
        if not np.all(np.isfinite(out)):
            raise ValueError(f"non-finite coordinates {coords!r}")
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Element:
    """Coordinates of an algebra element in a declared basis.

    Elements carry no parameters; the table is always passed explicitly so
    one element can be evaluated across many (lambda, beta).
    """

    coords: np.ndarray
    basis: Basis = TRANSFORMED

    def __post_init__(self):
        object.__setattr__(self, "coords", _coerce(self.coords))

    @classmethod
    def of(cls, coords, basis: Basis | str = TRANSFORMED, exact: bool | None = None) -> "Element":
        basis = Basis(basis)
        return cls(_coerce(coords, exact), basis)

    @classmethod
    def unit(cls, name: str | int, basis: Basis | str = TRANSFORMED, exact: bool = False) -> "Element":
        basis = Basis(basis)
        i = name if isinstance(name, int) else basis.index(name)
        v = [0, 0, 0, 0]
        v[i] = 1
        return cls.of(v, basis, exact)

    @classmethod
    def zero(cls, basis: Basis | str = TRANSFORMED, exact: bool = False) -> "Element":
        return cls.of([0, 0, 0, 0], basis, exact)

    @property
    def exact(self) -> bool:
        return self.coords.dtype == object

    def _check(self, other: "Element") -> None:
        if not isinstance(other, Element):
            raise TypeError(f"expected an Element, got {type(other).__name__}")
        if other.basis is not self.basis:
            raise BasisMismatch(f"cannot combine {self.basis.value} and {other.basis.value} coordinates")

    def _wrap(self, coords) -> "Element":
        return Element(coords, self.basis)

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        return self._wrap(self.coords + other.coords)

    def __sub__(self, other: "Element") -> "Element":
        self._check(other)
        return self._wrap(self.coords - other.coords)

    def __neg__(self) -> "Element":
        return self._wrap(-self.coords)

    def __mul__(self, scalar) -> "Element":
        if isinstance(scalar, Element):
            raise TypeError("use multiply(table, x, y) for the algebra product")
        if self.exact:
            scalar = Fraction(scalar)
        return self._wrap(self.coords * scalar)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return self.basis is other.basis and bool(np.all(self.coords == other.coords))

    __hash__ = None

    def norm_inf(self) -> float:
        return float(max(abs(x) for x in self.coords))

    def isclose(self, other: "Element", atol: float) -> bool:
        self._check(other)
        return (self - other).norm_inf() <= atol

    def tolist(self) -> list[float]:
        return [float(x) for x in self.coords]

    def __repr__(self) -> str:
        terms = " + ".join(f"{x}*{n}" for x, n in zip(self.coords.tolist(), self.basis.names) if x != 0)
        return f"Element({terms or '0'}, {self.basis.value})"


@dataclass(frozen=True, eq=False)
class StructureTensor:
    """c[i, j, k] is the coefficient of basis vector k in e_i . e_j."""

    c: np.ndarray
    basis: Basis
    params: Params

    @property
    def exact(self) -> bool:
        return self.c.dtype == object

    def product(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Bilinear product of raw coordinate arrays; leading axes broadcast."""
        return np.einsum("...i,...j,ijk->...k", x, y, self.c)

    def left_matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix L with L @ v = x . v (column action)."""
        return np.einsum("i,ijk->kj", x, self.c)

    def check(self, x: Element) -> None:
        if x.basis is not self.basis:
            raise BasisMismatch(
                f"element in {x.basis.value} basis given to a {self.basis.value} table")


def _empty(p: Params) -> np.ndarray:
    if p.exact:
        c = np.empty((4, 4, 4), dtype=object)
        c[...] = Fraction(0)
        return c
    return np.zeros((4, 4, 4))


def _set(c: np.ndarray, i: int, j: int, coeffs) -> None:
    c[i, j, :] = coeffs
    c[j, i, :] = coeffs


def phenotype_table(p: Params) -> StructureTensor:
    """Structure constants of B(alpha, beta) on (O, A, B, AB)."""
    al, be = p.alpha, p.beta
    one, zero = p.one(), p.one() * 0
    c = _empty(p)
    O, A, B, AB = range(4)
    _set(c, O, O, [one, zero, zero, zero])
    _set(c, O, A, [al, 1 - al, zero, zero])
    _set(c, O, B, [al, zero, 1 - al, zero])
    _set(c, O, AB, [zero, be, 1 - be, zero])
    _set(c, A, A, [al**2, 1 - al**2, zero, zero])
    _set(c, A, B, [al**2, al * (1 - al), al * (1 - al), (1 - al) ** 2])
    _set(c, A, AB, [zero, be, al * (1 - be), (1 - al) * (1 - be)])
    _set(c, B, B, [al**2, zero, 1 - al**2, zero])
    _set(c, B, AB, [zero, al * be, 1 - be, (1 - al) * be])
    _set(c, AB, AB, [zero, be**2, (1 - be) ** 2, 2 * be * (1 - be)])
    c.flags.writeable = False
    return StructureTensor(c, PHENOTYPE, p)


def transformed_table(p: Params) -> StructureTensor:
    """Structure constants of B'(lambda, beta) on (o, a, b, ab)."""
    lam, be = p.lam, p.beta
    one, zero = p.one(), p.one() * 0
    c = _empty(p)
    o, a, b, ab = range(4)
    _set(c, o, o, [one, zero, zero, zero])
    _set(c, o, a, [zero, lam, zero, zero])
    _set(c, o, b, [zero, zero, lam, zero])
    _set(c, a, a, [zero, one, zero, zero])
    _set(c, b, b, [zero, zero, one, zero])
    _set(c, a, b, [zero, (lam - be) / lam, (lam - (1 - be)) / lam, one])
    c.flags.writeable = False
    return StructureTensor(c, TRANSFORMED, p)


def table(p: Params, basis: Basis | str = TRANSFORMED) -> StructureTensor:
    basis = Basis(basis)
    return phenotype_table(p) if basis is PHENOTYPE else transformed_table(p)


def multiply(t: StructureTensor, x: Element, y: Element) -> Element:
    """z_k = sum_ij x_i y_j c[i, j, k]."""
    t.check(x)
    t.check(y)
    if t.exact != x.exact or t.exact != y.exact:
        xs, ys = (_coerce(v.coords, t.exact) for v in (x, y))
    else:
        xs, ys = x.coords, y.coords
    return Element(t.product(xs, ys), t.basis)


def change_matrix(p: Params) -> np.ndarray:
    """Rows are o, a, b, ab written in phenotype coordinates."""
    lam, al, be = p.lam, p.alpha, p.beta
    one, zero = p.one(), p.one() * 0
    rows = [
        [one, zero, zero, zero],
        [1 / lam**2, -1 / lam**2, zero, zero],
        [1 / lam**2, zero, -1 / lam**2, zero],
        [al / lam**3, -be / lam**3, -(1 - be) / lam**3, 1 / lam**2],
    ]
    return np.array(rows, dtype=object if p.exact else float)


def inverse_change_matrix(p: Params) -> np.ndarray:
    """Rows are O, A, B, AB written in transformed coordinates."""
    lam, be = p.lam, p.beta
    one, zero = p.one(), p.one() * 0
    rows = [
        [one, zero, zero, zero],
        [one, -lam**2, zero, zero],
        [one, zero, -lam**2, zero],
        [one, -be * lam, -(1 - be) * lam, lam**2],
    ]
    return np.array(rows, dtype=object if p.exact else float)


def to_transformed(p: Params, x: Element) -> Element:
    if x.basis is not PHENOTYPE:
        raise BasisMismatch("to_transformed expects phenotype coordinates")
    return Element(_coerce(x.coords, p.exact) @ inverse_change_matrix(p), TRANSFORMED)


def from_transformed(p: Params, x: Element) -> Element:
    if x.basis is not TRANSFORMED:
        raise BasisMismatch("from_transformed expects transformed coordinates")
    return Element(_coerce(x.coords, p.exact) @ change_matrix(p), PHENOTYPE)


def swap_ab(x: Element) -> Element:
    """Exchange the a and b (or A and B) coordinates."""
    c = x.coords
    return Element(np.array([c[0], c[2], c[1], c[3]], dtype=c.dtype), x.basis)
