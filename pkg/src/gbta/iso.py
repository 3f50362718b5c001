"""Isomorphisms between B'(lambda, beta) and B'(lambda', beta').

A map phi is a 4x4 matrix whose row i holds the image of the i-th basis
vector (o', a', b', ab') of the source B'(p2), written in the basis
(o, a, b, ab) of the target B'(p1).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .algebra import transformed_table
from .params import Params
from .roots import levenberg_marquardt

DET_FLOOR = 0.01

# entries of phi left free by the search: phi(o') has o-coordinate 1 and the
# o-coordinates of phi(a'), phi(b') vanish, as does everything but the ab
# coordinate of phi(ab')
FREE = [(0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (3, 3)]

_PAIRS = [(i, j) for i in range(4) for j in range(i, 4)]


class Reason(enum.Enum):
    IDENTITY = "Identity"
    SWAP_BETA = "SwapBeta"
    NOT_ISOMORPHIC = "NotIsomorphic"


@dataclass(frozen=True)
class IsoReport:
    isomorphic: bool
    reason: Reason
    witness: np.ndarray | None = None
    # True when the two parameter pairs coincide, i.e. the same algebra
    same_algebra: bool = False

    def to_json(self) -> dict:
        return {
            "isomorphic": self.isomorphic,
            "reason": self.reason.value,
            "witness": None if self.witness is None else [[float(x) for x in row] for row in self.witness],
            "same_algebra": self.same_algebra,
        }


SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=float)
IDENTITY = np.eye(4)


def _close(x, y, tol: float, exact: bool) -> bool:
    return x == y if exact else abs(float(x) - float(y)) <= tol


def decide_isomorphic(p1: Params, p2: Params) -> IsoReport:
    """Isomorphic iff lambda' = lambda and beta' in {beta, 1 - beta}.

    Comparisons use the tolerance of ``p1`` (exact when both are rational).
    Equal parameters give the identity witness and ``same_algebra``; otherwise
    the witness exchanges a and b.
    """
    exact = p1.exact and p2.exact
    tol = p1.tol
    if not _close(p1.lam, p2.lam, tol, exact):
        return IsoReport(False, Reason.NOT_ISOMORPHIC)
    if _close(p1.beta, p2.beta, tol, exact):
        report = IsoReport(True, Reason.IDENTITY, IDENTITY.copy(), same_algebra=True)
    elif _close(p2.beta, 1 - p1.beta, tol, exact):
        report = IsoReport(True, Reason.SWAP_BETA, SWAP.copy())
    else:
        return IsoReport(False, Reason.NOT_ISOMORPHIC)
    if not verify_homomorphism(p1, p2, report.witness):
        raise AssertionError(f"witness {report.reason.value} fails between {p1} and {p2}")
    return report


def homomorphism_defect(p1: Params, p2: Params, phi) -> float:
    """max over basis pairs of |phi(e_i .' e_j) - phi(e_i) . phi(e_j)|_inf."""
    d = np.asarray(phi, dtype=float)
    c1 = transformed_table(p1).c.astype(float)
    c2 = transformed_table(p2).c.astype(float)
    lhs = np.einsum("ijl,lk->ijk", c2, d)
    rhs = np.einsum("ia,jb,abk->ijk", d, d, c1)
    return float(np.abs(lhs - rhs).max())


def verify_homomorphism(p1: Params, p2: Params, phi) -> bool:
    """Whether ``phi`` is an invertible algebra map B'(p2) -> B'(p1), within p1.tol."""
    d = np.asarray(phi, dtype=float)
    if d.shape != (4, 4) or not np.all(np.isfinite(d)):
        return False
    if abs(float(np.linalg.det(d))) <= p1.tol:
        return False
    return homomorphism_defect(p1, p2, d) <= p1.tol


def _residual_system(p1: Params, p2: Params):
    c1 = transformed_table(p1).c.astype(float)
    c2 = transformed_table(p2).c.astype(float)
    pi = np.array([i for i, _ in _PAIRS])
    pj = np.array([j for _, j in _PAIRS])
    rows = np.array([r for r, _ in FREE])
    cols = np.array([s for _, s in FREE])

    def build(theta):
        d = np.zeros((theta.shape[0], 4, 4))
        d[:, 0, 0] = 1.0
        d[:, rows, cols] = theta
        return d

    def det(d):
        return d[:, 3, 3] * (d[:, 1, 1] * d[:, 2, 2] - d[:, 1, 2] * d[:, 2, 1])

    def fun(theta, _rows=None):
        d = build(theta)
        lhs = np.einsum("pl,nlk->npk", c2[pi, pj], d)
        rhs = np.einsum("npa,npb,abk->npk", d[:, pi], d[:, pj], c1)
        pen = np.maximum(0.0, DET_FLOOR - np.abs(det(d)))
        return np.concatenate([(lhs - rhs).reshape(len(theta), -1), pen[:, None]], axis=1)

    def jac(theta, _rows=None):
        n = len(theta)
        d = build(theta)
        # g[n, j, s, k]: coefficient of e_k in (row j of phi) . e_s
        g = np.einsum("njb,sbk->njsk", d, c1)
        jm = np.zeros((n, len(_PAIRS), 4, len(FREE)))
        for m, (r, s) in enumerate(FREE):
            jm[:, :, s, m] += c2[pi, pj, r][None, :]
            jm[:, :, :, m] -= (pi == r)[None, :, None] * g[:, pj, s, :]
            jm[:, :, :, m] -= (pj == r)[None, :, None] * g[:, pi, s, :]
        jm = jm.reshape(n, -1, len(FREE))
        dd = det(d)
        grad = np.zeros((n, len(FREE)))
        grad[:, FREE.index((1, 1))] = d[:, 3, 3] * d[:, 2, 2]
        grad[:, FREE.index((2, 2))] = d[:, 3, 3] * d[:, 1, 1]
        grad[:, FREE.index((1, 2))] = -d[:, 3, 3] * d[:, 2, 1]
        grad[:, FREE.index((2, 1))] = -d[:, 3, 3] * d[:, 1, 2]
        grad[:, FREE.index((3, 3))] = d[:, 1, 1] * d[:, 2, 2] - d[:, 1, 2] * d[:, 2, 1]
        active = (np.abs(dd) < DET_FLOOR)[:, None]
        pen = np.where(active, -np.sign(dd)[:, None] * grad, 0.0)
        return np.concatenate([jm, pen[:, None, :]], axis=1)

    return build, fun, jac


def search_isomorphism(p1: Params, p2: Params, trials: int = 100, seed: int = 0) -> np.ndarray | None:
    """Numerically look for an isomorphism B'(p2) -> B'(p1).

    Multi-start damped Newton on the 40 product-preservation equations in the
    10 free entries of phi, starts drawn from a seeded standard normal, with a
    penalty once |det phi| drops below 0.01. Returns the verified witness of
    the lowest-numbered successful start, or None.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    build, fun, jac = _residual_system(p1, p2)
    theta0 = np.random.default_rng(seed).standard_normal((trials, len(FREE)))
    res = levenberg_marquardt(fun, jac, theta0, max_iter=200)
    for k in np.argsort(res.residual, kind="stable"):
        if res.residual[k] > 1e-8:
            break
        d = build(res.x[k:k + 1])[0]
        if verify_homomorphism(p1, p2, d):
            return d
    return None
