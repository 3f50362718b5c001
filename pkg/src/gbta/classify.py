"""Absolute nilpotents, idempotents and solvable elements of B'(lambda, beta).

Each closed form comes with a numeric counterpart (multi-start Newton on the
defining polynomial system) that never consults the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .algebra import TRANSFORMED, Element, StructureTensor, multiply, transformed_table
from .params import Params, p_membership, p_residual
from .roots import cluster, levenberg_marquardt, match

DEFAULT_CAP = 64


class DenominatorVanishes(ArithmeticError):
    pass


class BadIndex(ValueError):
    pass


class VerificationFailed(AssertionError):
    pass


def _unit(name: str, p: Params) -> Element:
    return Element.unit(name, TRANSFORMED, exact=p.exact)


def absolute_nilpotents(p: Params) -> linalg.Subspace:
    """The elements with x.x = 0: exactly the line spanned by ab."""
    return linalg.coordinate(4, [3], exact=p.exact, tol=p.tol)


def idempotent_defect(t: StructureTensor, e: Element) -> float:
    """|e.e - e|_inf scaled by max(1, |e|_inf^2) so large idempotents near P are judged fairly."""
    d = (multiply(t, e, e) - e).norm_inf()
    return d / max(1.0, e.norm_inf() ** 2)


@dataclass(frozen=True)
class IdempotentSet:
    items: tuple[Element, ...]
    labels: tuple[str, ...]
    degenerate: bool
    # formula entries that coincided with an earlier item and were dropped
    merged: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.items)

    def arrays(self) -> list[np.ndarray]:
        return [np.array(e.coords, dtype=float) for e in self.items]


def j_element(p: Params, alpha: int) -> Element:
    """The idempotent j_alpha (alpha in {0, 1}) that exists off P.

    x = lam (1 - 2 alpha lam)(2 beta - lam) / D, y = lam (1 - 2 alpha lam)(2 - 2 beta - lam) / D,
    z = 2 x y, with D = -3 lam^2 + 4 beta^2 + 4 lam - 4 beta.
    """
    lam, be = p.lam, p.beta
    den = -3 * lam**2 + 4 * be**2 + 4 * lam - 4 * be
    if den == 0 or (not p.exact and abs(den) <= p.tol):
        raise DenominatorVanishes(f"idempotent denominator {den} vanishes at {p}")
    k = lam * (1 - 2 * alpha * lam) / den
    x = k * (2 * be - lam)
    y = k * (2 - 2 * be - lam)
    return Element.of([alpha, x, y, 2 * x * y], TRANSFORMED, exact=p.exact)


def idempotents(p: Params) -> IdempotentSet:
    """All idempotents of B'(lambda, beta), each re-verified by multiplication.

    Off P there are seven: o, a, b, o + (1 - 2 lam) a, o + (1 - 2 lam) b, j_0, j_1.
    On P the two j's do not exist. On the lines lam = 1/2, beta = lam/2 and
    beta = 1 - lam/2 some of the seven coincide; duplicates are dropped and
    named in ``merged``.

    Raises:
        DenominatorVanishes: |D| <= tol although (lambda, beta) is not on P.
        VerificationFailed: an item fails e.e = e.
    """
    o, a, b = (_unit(n, p) for n in ("o", "a", "b"))
    c = 1 - 2 * p.lam
    cand = [("o", o), ("a", a), ("b", b), ("o+(1-2l)a", o + a * c), ("o+(1-2l)b", o + b * c)]
    membership = p_membership(p)
    if not membership.in_p:
        cand += [("j0", j_element(p, 0)), ("j1", j_element(p, 1))]

    t = transformed_table(p)
    items, labels, merged = [], [], []
    for label, e in cand:
        if any(e.isclose(f, p.tol * max(1.0, f.norm_inf())) for f in items):
            merged.append(label)
            continue
        if p.exact:
            ok = multiply(t, e, e) == e
        else:
            ok = idempotent_defect(t, e) <= p.tol
        if not ok:
            raise VerificationFailed(f"{label} = {e} is not idempotent at {p}")
        items.append(e)
        labels.append(label)
    return IdempotentSet(tuple(items), tuple(labels), membership.in_p, tuple(merged))


@dataclass(frozen=True)
class SolvableFamily:
    """Elements a_coeff * t * a + t * b + s * ab (t != 0) of solvability index ``index``.

    For index 2 the family is the nilpotent line s * ab and ``a_coeff`` is 0.
    """

    index: int
    a_coeff: float | Fraction

    def member(self, t=1, s=0, exact: bool = False) -> Element:
        if self.index == 2:
            return Element.of([0, 0, 0, s], TRANSFORMED, exact=exact)
        if t == 0:
            raise ValueError("family members need t != 0")
        return Element.of([0, self.a_coeff * t, t, s], TRANSFORMED, exact=exact)


def _ratio_factor(p: Params):
    """r = 2 (lam + beta - 1) / lam; on P, X/Y is divided by r at every squaring."""
    return 2 * (p.lam + p.beta - 1) / p.lam


def solvable_family(p: Params, n: int) -> SolvableFamily | None:
    """Solvable elements of index ``n``, or None when there are none.

    Index 2 is the nilpotent line. Index n >= 3 requires (lambda, beta) on P,
    where the a-coefficient is -(2 (lam + beta - 1) / lam)^(n - 4).

    At the single point of P where that ratio factor equals -1, namely
    (1/3, 1/2), the coefficient only takes the values +-1 and every member has
    index 3 or 4, so no family is returned for n >= 5 there.

    Raises:
        BadIndex: n < 2.
    """
    if n < 2:
        raise BadIndex(f"solvability index is at least 2, got {n}")
    if n == 2:
        return SolvableFamily(2, p.one() * 0)
    if not p_membership(p).in_p:
        return None
    r = _ratio_factor(p)
    if n >= 5 and (r == -1 if p.exact else abs(r + 1) <= p.tol):
        return None
    return SolvableFamily(n, -(r ** (n - 4)))


@dataclass
class Solvability:
    index: int | None
    # plenary powers rescaled to unit max-norm (solvability is scale invariant)
    sequence: list[Element] = field(default_factory=list)
    # False when exact arithmetic gave way to floats part of the way
    exact: bool = False


EXACT_BITS = 4096


def _zero(x: np.ndarray, tol: float, exact: bool) -> bool:
    if exact:
        return all(v == 0 for v in x)
    return float(np.max(np.abs(x))) <= tol


def _bits(x: np.ndarray) -> int:
    return max(max(v.numerator.bit_length(), v.denominator.bit_length()) for v in x)


def solvability(t: StructureTensor, m: Element, cap: int = DEFAULT_CAP, tol: float | None = None) -> Solvability:
    """Least n <= cap with m^[n] = 0, plus the rescaled plenary powers up to it.

    Each power is divided by its largest entry before squaring. In float
    mode "zero" then means |m^[n]| <= tol * |m^[n-1]|^2: a vanishing
    direction, not mere underflow of a shrinking element.

    Rational mode tests exact zeros. Exact heights double at every squaring,
    so once an entry needs more than 4096 bits the remaining steps continue
    in floats and ``exact`` is reported False. In the transformed basis an
    element with nonzero o-coordinate is never solvable (the o-coordinate of
    m.m is its square), which is decided at once, and a rescaled power that
    repeats exactly means the sequence cycles without reaching zero.
    """
    if cap < 2:
        raise ValueError(f"cap must be at least 2, got {cap}")
    t.check(m)
    tol = t.params.tol if tol is None else tol
    exact = t.exact
    c = t.c
    u = m.coords
    seq = [m]
    if _zero(u, tol, exact):
        return Solvability(1, seq, exact)
    if exact and t.basis is TRANSFORMED and u[0] != 0:
        return Solvability(None, seq, True)
    seen = set()
    for k in range(1, cap):
        if exact and _bits(u) > EXACT_BITS:
            exact = False
            c = c.astype(float)
            u = u.astype(float)
        s = max(abs(v) for v in u)
        w = u / s
        sq = np.einsum("i,j,ijk->k", w, w, c)
        seq.append(Element(sq, t.basis))
        if _zero(sq, tol, exact):
            return Solvability(k + 1, seq, exact)
        if exact:
            key = tuple(sq / max(abs(v) for v in sq))
            if key in seen:
                return Solvability(None, seq, True)
            seen.add(key)
        u = sq
    return Solvability(None, seq, exact)


def solvability_index(t: StructureTensor, m: Element, cap: int = DEFAULT_CAP,
                      tol: float | None = None) -> int | None:
    """Solvability index of ``m``, or None if it is not solvable within ``cap``."""
    return solvability(t, m, cap, tol).index


# Numeric oracles -------------------------------------------------------------


@dataclass(frozen=True)
class NilpotentSearch:
    seeds: int
    converged: int
    roots: np.ndarray          # converged roots, one per row
    max_distance: float        # largest distance of a converged root from <ab>

    @property
    def outside(self) -> int:
        return int(np.sum(np.linalg.norm(self.roots[:, :3], axis=1) > 1e-6)) if len(self.roots) else 0


def nilpotent_search(p: Params, seeds: int = 10_000, seed: int = 0) -> NilpotentSearch:
    """Solve x.x = 0 numerically from random standard-normal starts.

    Each start x0 is confined to its own hyperplane c.x = 1, c = x0/|x0|^2,
    which removes the trivial root x = 0 and the scaling freedom; the
    hyperplane is parametrised exactly as x = c/|c|^2 + N y with N an
    orthonormal basis of c-perp. A start counts as converged when
    |x.x|_inf <= 1e-24 max(1, |x|_inf^2). The roots are singular, so
    convergence is only linear and the cost floor sits far below 1e-30.
    """
    tc = transformed_table(_float_params(p)).c
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal((seeds, 4))
    base = x0.copy()                                   # c / |c|^2 equals x0 itself
    perp = np.linalg.svd(x0[:, None, :])[2][:, 1:, :]  # (n, 3, 4) rows span c-perp

    def point(y, rows):
        return base[rows] + np.einsum("nj,nji->ni", y, perp[rows])

    def fun(y, rows):
        x = point(y, rows)
        return np.einsum("ni,nj,ijk->nk", x, x, tc)

    def jac(y, rows):
        x = point(y, rows)
        lx = np.einsum("ni,ijk->nkj", x, tc)
        return 2 * np.einsum("nkj,nlj->nkl", lx, perp[rows])

    res = levenberg_marquardt(fun, jac, np.zeros((seeds, 3)), max_iter=400, ftol=1e-50)
    x = point(res.x, np.arange(seeds))
    size = np.maximum(1.0, np.abs(x).max(axis=1) ** 2)
    conv = res.residual <= 1e-24 * size
    roots = x[conv]
    dist = float(np.linalg.norm(roots[:, :3], axis=1).max()) if len(roots) else 0.0
    return NilpotentSearch(seeds, int(conv.sum()), roots, dist)


@dataclass(frozen=True)
class IdempotentSearch:
    roots: list[np.ndarray]            # clustered converged roots
    unexpected: list[np.ndarray]       # roots matching no closed-form idempotent
    missed: list[str]                  # closed-form idempotents never reached
    starts: int


def idempotent_grid(random_starts: int = 20, grid: int = 5, seed: int = 0, wide_starts: int = 400) -> np.ndarray:
    """Seeded random starts on [-2, 2]^4, a regular grid, and wide starts.

    Wide starts have random directions and log-uniform sizes in [0.1, 1e4];
    near P the j idempotents have coordinates far outside [-2, 2].
    """
    rng = np.random.default_rng(seed)
    pts = [rng.uniform(-2.0, 2.0, size=(random_starts, 4))]
    if grid:
        axis = np.linspace(-2.0, 2.0, grid)
        pts.append(np.stack(np.meshgrid(axis, axis, axis, axis, indexing="ij"), -1).reshape(-1, 4))
    if wide_starts:
        d = rng.standard_normal((wide_starts, 4))
        d /= np.abs(d).max(axis=1, keepdims=True)
        pts.append(d * 10.0 ** rng.uniform(-1.0, 4.0, size=(wide_starts, 1)))
    return np.concatenate(pts)


def idempotent_search(p: Params, starts: np.ndarray | None = None, radius: float = 1e-6) -> IdempotentSearch:
    """Solve x.x = x by Newton from many starts and compare with :func:`idempotents`.

    Converged nonzero roots are clustered at ``radius``; ``unexpected`` lists
    clusters that match no closed-form idempotent, ``missed`` the closed-form
    idempotents no start reached.
    """
    c = transformed_table(_float_params(p)).c
    x0 = idempotent_grid() if starts is None else np.asarray(starts, dtype=float)
    eye = np.eye(4)

    def fun(x, rows):
        return np.einsum("ni,nj,ijk->nk", x, x, c) - x

    def jac(x, rows):
        return 2 * np.einsum("ni,ijk->nkj", x, c) - eye

    res = levenberg_marquardt(fun, jac, x0, max_iter=200)
    scale = np.maximum(1.0, np.abs(res.x).max(axis=1) ** 2)
    conv = res.residual <= 1e-11 * scale
    # 0 is trivially idempotent and is not part of the classification
    nonzero = np.abs(res.x).max(axis=1) > radius
    roots = cluster(res.x[conv & nonzero], radius)
    expected = idempotents(p)
    _, lost, free = match(roots, expected.arrays(), radius)
    return IdempotentSearch(roots, [roots[i] for i in lost],
                            [expected.labels[j] for j in free], len(x0))


def _float_params(p: Params) -> Params:
    if not p.exact:
        return p
    from .params import new_params
    return new_params(float(p.lam), float(p.beta), p.tol)
