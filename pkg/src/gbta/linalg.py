"""Tolerant row reduction for the small spaces this package needs (R^4 and R^16).

Float input is reduced with a zero threshold relative to the largest input
entry. Object arrays of :class:`fractions.Fraction` are reduced exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .params import DEFAULT_TOL

AMBIENT_DIMS = (4, 16)


class DimensionMismatch(ValueError):
    pass


def _is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def _as_rows(vectors, ambient_dim: int | None = None) -> np.ndarray:
    if isinstance(vectors, np.ndarray):
        rows = vectors
    else:
        vectors = [np.asarray(v) for v in vectors]
        if not vectors:
            if ambient_dim is None:
                raise DimensionMismatch("cannot infer the ambient dimension of an empty list")
            return np.zeros((0, ambient_dim))
        lengths = {v.size for v in vectors}
        if len(lengths) != 1:
            raise DimensionMismatch(f"vectors of differing lengths {sorted(lengths)}")
        exact = any(v.dtype == object for v in vectors)
        rows = np.array([v.ravel() for v in vectors], dtype=object if exact else float)
    if rows.ndim == 1:
        rows = rows[None, :]
    if rows.ndim != 2:
        raise DimensionMismatch(f"expected a list of row vectors, got shape {rows.shape}")
    if rows.dtype != object:
        rows = rows.astype(float)
    n = rows.shape[1]
    if n not in AMBIENT_DIMS:
        raise DimensionMismatch(f"ambient dimension must be one of {AMBIENT_DIMS}, got {n}")
    if ambient_dim is not None and n != ambient_dim:
        raise DimensionMismatch(f"expected ambient dimension {ambient_dim}, got {n}")
    return rows


def _rref_lists(m: np.ndarray, tol: float) -> tuple[np.ndarray, list[int]]:
    # Same pivot rules as rref, on Python lists: faster for 4 columns.
    exact = _is_exact(m)
    rows = m.tolist()
    ncols = m.shape[1]
    if exact:
        thr = 0
    else:
        scale = max((abs(x) for row in rows for x in row), default=0.0)
        if scale == 0.0:
            return np.zeros((0, ncols)), []
        thr = tol * scale
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        i, best = r, abs(rows[r][c])
        for k in range(r + 1, len(rows)):
            v = abs(rows[k][c])
            if v > best:
                i, best = k, v
        if not best > thr:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        piv = rows[r][c]
        prow = [x / piv for x in rows[r]]
        prow[c] = prow[c] * 0 + 1
        rows[r] = prow
        for k in range(len(rows)):
            f = rows[k][c]
            if k != r and f:
                row = rows[k]
                rows[k] = [x - f * y for x, y in zip(row, prow)]
                rows[k][c] = f * 0
        pivots.append(c)
        r += 1
    out = rows[:r]
    if exact:
        arr = np.empty((r, ncols), dtype=object)
        for k, row in enumerate(out):
            arr[k, :] = row
        return arr, pivots
    arr = np.array(out, dtype=float).reshape(r, ncols)
    arr[np.abs(arr) <= thr] = 0.0
    return arr, pivots


def rref(m: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``m`` and its pivot columns.

    Columns are processed left to right; in each the row of largest absolute
    value is the pivot, the lowest row index winning ties. Float entries at or
    below ``tol * max|m|`` count as zero and are cleared from the output.
    """
    if m.shape[1] <= 4 or _is_exact(m):
        return _rref_lists(m, tol)
    m = m.copy()
    nrows, ncols = m.shape
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if scale == 0.0:
        return m[:0], []
    thr = tol * scale
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        col = np.abs(m[r:, c])
        i = int(np.argmax(col))
        if not col[i] > thr:
            m[r:, c] = 0.0
            continue
        if i:
            m[[r, r + i]] = m[[r + i, r]]
        m[r] = m[r] / m[r, c]
        others = np.arange(nrows) != r
        m[others] -= np.outer(m[others, c], m[r])
        m[others, c] = 0.0
        m[r, c] = 1.0
        pivots.append(c)
        r += 1
    out = m[:r]
    out[np.abs(out) <= thr] = 0.0
    return out, pivots


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace held as the reduced echelon basis of its rows."""

    ambient_dim: int
    basis_rows: np.ndarray
    tol_used: float
    pivots: tuple[int, ...] = ()
    _q: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.basis_rows.shape[0]

    @property
    def exact(self) -> bool:
        return _is_exact(self.basis_rows)

    def __contains__(self, v) -> bool:
        return contains(self, v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return equal(self, other)

    __hash__ = None

    def __le__(self, other: "Subspace") -> bool:
        return is_subspace(self, other)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"

    def orthonormal(self) -> np.ndarray:
        """Orthonormal basis (columns) of the float subspace."""
        if self._q is None:
            q = np.linalg.qr(self.basis_rows.astype(float).T)[0] if self.dim else np.zeros((self.ambient_dim, 0))
            object.__setattr__(self, "_q", q)
        return self._q


def span(vectors, tol: float = DEFAULT_TOL, ambient_dim: int | None = None) -> Subspace:
    """Echelon basis of the span of ``vectors`` (rows of equal length 4 or 16).

    Raises:
        DimensionMismatch: vectors of unequal or unsupported length.
    """
    rows = _as_rows(vectors, ambient_dim)
    basis, pivots = rref(rows, tol)
    basis.flags.writeable = False
    return Subspace(rows.shape[1], basis, tol, tuple(pivots))


def rank(vectors, tol: float = DEFAULT_TOL) -> int:
    return span(vectors, tol).dim


def zero(ambient_dim: int, exact: bool = False, tol: float = DEFAULT_TOL) -> Subspace:
    rows = np.zeros((0, ambient_dim), dtype=object if exact else float)
    return span(rows, tol)


def coordinate(ambient_dim: int, indices: Iterable[int], exact: bool = False,
               tol: float = DEFAULT_TOL) -> Subspace:
    """Span of the standard basis vectors with the given indices."""
    one = Fraction(1) if exact else 1.0
    rows = []
    for i in indices:
        e = np.zeros(ambient_dim, dtype=object if exact else float)
        if exact:
            e[:] = Fraction(0)
        e[i] = one
        rows.append(e)
    if not rows:
        return zero(ambient_dim, exact, tol)
    return span(rows, tol)


def _check_dim(s: Subspace, n: int) -> None:
    if s.ambient_dim != n:
        raise DimensionMismatch(f"subspace lives in R^{s.ambient_dim}, vector in R^{n}")


def residual(s: Subspace, v) -> np.ndarray:
    """Component of ``v`` left over after removing its part in ``s``.

    Float subspaces use the orthogonal projection; exact ones subtract
    pivot multiples of the echelon rows.
    """
    v = np.asarray(v).ravel()
    _check_dim(s, v.size)
    if s.exact:
        r = np.array(v, dtype=object)
        for row, c in zip(s.basis_rows, s.pivots):
            r = r - r[c] * row
        return r
    v = v.astype(float)
    q = s.orthonormal()
    return v - q @ (q.T @ v)


def contains(s: Subspace, v) -> bool:
    """Whether ``v`` lies in ``s``: residual norm at most tol * (1 + |v|)."""
    r = residual(s, v)
    if s.exact and np.asarray(v).dtype == object:
        return all(x == 0 for x in r)
    v = np.asarray(v, dtype=float).ravel()
    r = r.astype(float)
    return float(np.sqrt(r @ r)) <= s.tol_used * (1.0 + float(np.sqrt(v @ v)))


def contains_all(s: Subspace, vectors) -> bool:
    """Whether every row of ``vectors`` lies in ``s``."""
    rows = np.asarray(vectors)
    if rows.ndim == 1:
        rows = rows[None, :]
    if rows.shape[0] == 0:
        return True
    if s.exact or rows.dtype == object:
        return all(contains(s, v) for v in rows)
    _check_dim(s, rows.shape[1])
    rows = rows.astype(float)
    q = s.orthonormal()
    r = rows - (rows @ q) @ q.T
    rn = np.sqrt(np.einsum("ij,ij->i", r, r))
    vn = np.sqrt(np.einsum("ij,ij->i", rows, rows))
    return bool(np.all(rn <= s.tol_used * (1.0 + vn)))


def is_subspace(s1: Subspace, s2: Subspace) -> bool:
    """Whether s1 is contained in s2."""
    if s1.ambient_dim != s2.ambient_dim:
        raise DimensionMismatch(f"R^{s1.ambient_dim} vs R^{s2.ambient_dim}")
    if s1.dim > s2.dim:
        return False
    return contains_all(s2, s1.basis_rows)


def equal(s1: Subspace, s2: Subspace) -> bool:
    """Mutual containment of echelon bases."""
    if s1.ambient_dim != s2.ambient_dim:
        raise DimensionMismatch(f"R^{s1.ambient_dim} vs R^{s2.ambient_dim}")
    return s1.dim == s2.dim and is_subspace(s1, s2) and is_subspace(s2, s1)


def join(spaces: Sequence[Subspace], extra=(), tol: float | None = None) -> Subspace:
    """Span of the union of several subspaces and optional extra vectors."""
    n = spaces[0].ambient_dim
    tol = spaces[0].tol_used if tol is None else tol
    parts = [s.basis_rows for s in spaces]
    extra = list(extra)
    if extra:
        parts.append(_as_rows(extra, n))
    exact = any(p.dtype == object for p in parts)
    rows = np.concatenate([p.astype(object) if exact else p.astype(float) for p in parts], axis=0)
    if rows.shape[0] == 0:
        return zero(n, exact, tol)
    return span(rows, tol)
