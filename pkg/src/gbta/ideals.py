"""Ideals of B'(lambda, beta): closure, the four lattice shapes, falsification."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import linalg
from .algebra import Element, StructureTensor, transformed_table
from .classify import VerificationFailed
from .params import Params

AB = "⟨ab⟩"
A_AB = "⟨a,ab⟩"
B_AB = "⟨b,ab⟩"
A_B_AB = "⟨a,b,ab⟩"
FULL = "full"
ZERO = "zero"
OTHER = "other"

# coordinate positions in the (o, a, b, ab) basis
NAMED = {
    ZERO: (),
    AB: (3,),
    A_AB: (1, 3),
    B_AB: (2, 3),
    A_B_AB: (1, 2, 3),
    FULL: (0, 1, 2, 3),
}


class Case(enum.Enum):
    BETA_EQ_LAMBDA = "beta=lambda"
    BETA_EQ_1_MINUS_LAMBDA = "beta=1-lambda"
    GENERIC = "generic"
    HALF = "lambda=beta=1/2"


PROPER_IDEALS = {
    Case.GENERIC: (AB, A_B_AB),
    Case.BETA_EQ_LAMBDA: (AB, B_AB, A_B_AB),
    Case.BETA_EQ_1_MINUS_LAMBDA: (AB, A_AB, A_B_AB),
    Case.HALF: (AB, A_AB, B_AB, A_B_AB),
}


@lru_cache(maxsize=None)
def named_space(label: str, exact: bool = False, tol: float = linalg.DEFAULT_TOL) -> linalg.Subspace:
    return linalg.coordinate(4, NAMED[label], exact=exact, tol=tol)


def label_of(space: linalg.Subspace) -> str:
    for label, idx in NAMED.items():
        if len(idx) == space.dim and linalg.equal(space, named_space(label, space.exact, space.tol_used)):
            return label
    return OTHER


@dataclass(frozen=True)
class Ideal:
    space: linalg.Subspace
    label: str

    @property
    def dim(self) -> int:
        return self.space.dim


def _rows(generators) -> list:
    if isinstance(generators, linalg.Subspace):
        return list(generators.basis_rows)
    return [g.coords if isinstance(g, Element) else np.asarray(g) for g in generators]


def absorbs(t: StructureTensor, space: linalg.Subspace) -> bool:
    """Whether e_j . v lies in ``space`` for every basis row v and basis vector e_j."""
    if space.dim == 0:
        return True
    prods = np.einsum("ri,ijk->rjk", space.basis_rows, t.c).reshape(-1, 4)
    return linalg.contains_all(space, prods)


def ideal_closure(t: StructureTensor, generators, tol: float | None = None) -> Ideal:
    """Smallest ideal containing ``generators`` (Elements, rows, or a Subspace)."""
    tol = t.params.tol if tol is None else tol
    rows = _rows(generators)
    if isinstance(generators, (list, tuple)):
        for g in generators:
            if isinstance(g, Element):
                t.check(g)
    c = t.c
    if t.exact:
        rows = [np.array([Fraction(x) for x in np.asarray(r).tolist()], dtype=object) for r in rows]
    s = linalg.span(rows, tol, ambient_dim=4) if rows else linalg.zero(4, t.exact, tol)
    for _ in range(5):
        if s.dim in (0, 4):
            break
        prods = np.einsum("ri,ijk->rjk", s.basis_rows, c).reshape(-1, 4)
        grown = linalg.join([s], prods, tol)
        if grown.dim == s.dim:
            break
        s = grown
    return Ideal(s, label_of(s))


@dataclass(frozen=True)
class LatticeReport:
    case: Case
    proper_ideals: tuple[Ideal, ...]
    hasse_edges: tuple[tuple[str, str], ...]   # (lower, upper) covering pairs
    warning: str | None = None

    def labels(self) -> list[str]:
        return [i.label for i in self.proper_ideals]

    def to_json(self) -> dict:
        return {
            "case": self.case.value,
            "ideals": [
                {"label": i.label, "dim": i.dim,
                 "basis": [[float(x) for x in row] for row in i.space.basis_rows]}
                for i in self.proper_ideals
            ],
            "hasse": [list(e) for e in self.hasse_edges],
            "warning": self.warning,
        }


def _gaps(p: Params):
    return {
        "beta=lambda": p.beta - p.lam,
        "beta=1-lambda": p.beta - (1 - p.lam),
        "lambda=1/2": p.lam - p.one() / 2,
    }


def select_case(p: Params) -> tuple[Case, str | None]:
    """Which lattice shape applies; boundaries within tol count as special.

    The second value is a warning when a boundary is near but not exact.
    """
    gaps = _gaps(p)
    if p.exact:
        on = {k: v == 0 for k, v in gaps.items()}
        warning = None
    else:
        on = {k: abs(v) <= p.tol for k, v in gaps.items()}
        near = [k for k, v in gaps.items() if 0 < abs(v) <= 10 * p.tol]
        warning = f"parameters within 10*tol of {', '.join(near)}; the ideal lattice is discontinuous there" if near else None
    if on["beta=lambda"] and on["beta=1-lambda"]:
        case = Case.HALF
    elif on["beta=lambda"]:
        case = Case.BETA_EQ_LAMBDA
    elif on["beta=1-lambda"]:
        case = Case.BETA_EQ_1_MINUS_LAMBDA
    else:
        case = Case.GENERIC
    return case, warning


def hasse(ideals: list[Ideal]) -> list[tuple[str, str]]:
    """Covering pairs of the containment order on ``ideals``."""
    below = {
        (i.label, j.label)
        for i in ideals for j in ideals
        if i is not j and i.dim < j.dim and linalg.is_subspace(i.space, j.space)
    }
    edges = []
    for lo, hi in below:
        if not any((lo, mid) in below and (mid, hi) in below for mid in (k.label for k in ideals)):
            edges.append((lo, hi))
    order = {i.label: n for n, i in enumerate(ideals)}
    return sorted(edges, key=lambda e: (order[e[0]], order[e[1]]))


def lattice(p: Params) -> LatticeReport:
    """Nonzero proper ideals of B'(lambda, beta) and their Hasse diagram.

    Raises:
        VerificationFailed: a listed subspace is not closed under multiplication.
    """
    case, warning = select_case(p)
    t = transformed_table(p)
    ideals = []
    for label in PROPER_IDEALS[case]:
        space = named_space(label, p.exact, p.tol)
        if not absorbs(t, space):
            raise VerificationFailed(f"{label} is not an ideal at {p}")
        ideals.append(Ideal(space, label))
    return LatticeReport(case, tuple(ideals), tuple(hasse(ideals)), warning)


@dataclass(frozen=True)
class Falsification:
    trials: int
    violations: int
    counts: dict = field(default_factory=dict)   # closure label -> occurrences
    examples: tuple = ()                         # generator sets of violating trials


def falsify_lattice(p: Params, trials: int = 10_000, seed: int = 0) -> Falsification:
    """Look for ideals missing from :func:`lattice` by closing random subspaces.

    Each trial picks a nonempty set of coordinate axes (the host), then spans
    k standard-normal vectors supported on the host, k uniform in 1..min(3, |host|).
    Hosts let closures land on small ideals instead of always filling the
    algebra. A violation is any closure that is neither zero, the full algebra,
    nor one of the listed proper ideals.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rep = lattice(p)
    allowed = set(rep.labels()) | {ZERO, FULL}
    t = transformed_table(p)
    rng = np.random.default_rng(seed)
    counts: dict[str, int] = {}
    bad = []
    for _ in range(trials):
        mask = rng.integers(1, 16)
        host = [i for i in range(4) if mask >> i & 1]
        k = int(rng.integers(1, min(3, len(host)) + 1))
        gens = np.zeros((k, 4))
        gens[:, host] = rng.standard_normal((k, len(host)))
        ideal = ideal_closure(t, list(gens))
        counts[ideal.label] = counts.get(ideal.label, 0) + 1
        if ideal.label not in allowed:
            bad.append(gens)
    return Falsification(trials, len(bad), counts, tuple(bad[:10]))
