"""Batched multi-start damped Newton for small polynomial systems.

Each start runs its own Levenberg-Marquardt damping, so square systems get
Newton steps near regular roots and over-determined or singular ones still
make progress. All starts advance together as one stacked array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

Residual = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class BatchResult:
    x: np.ndarray          # (n, k) final iterates
    residual: np.ndarray   # (n,) max-norm of the residual at x
    iterations: int


def levenberg_marquardt(
    fun: Residual,
    jac: Residual,
    x0: np.ndarray,
    max_iter: int = 200,
    ftol: float = 1e-30,
    mu0: float = 1e-6,
) -> BatchResult:
    """Minimise |fun(x)|^2 from every row of ``x0``.

    ``fun(x, rows)`` maps (n, k) to (n, m) and ``jac(x, rows)`` to (n, m, k);
    ``rows`` holds the indices into ``x0`` of the rows being evaluated, so
    residuals may depend on per-start data.
    """
    x = np.array(x0, dtype=float)
    n, k = x.shape
    f = fun(x, np.arange(n))
    cost = np.einsum("nm,nm->n", f, f)
    mu = np.full(n, mu0)
    eye = np.eye(k)
    active = cost > ftol
    it = 0
    for it in range(1, max_iter + 1):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        xa, fa = x[idx], f[idx]
        ja = jac(xa, idx)
        # damped least squares solved by QR of [J; sqrt(mu D)], never J^T J,
        # so singular roots are still resolved to full precision
        diag = np.maximum(np.einsum("nmi,nmi->ni", ja, ja), 1e-12)
        damp = np.sqrt(mu[idx, None] * diag)[:, :, None] * eye
        aug = np.concatenate([ja, damp], axis=1)
        rhs = np.concatenate([fa, np.zeros((idx.size, k))], axis=1)
        q, r = np.linalg.qr(aug)
        qtf = np.einsum("nmi,nm->ni", q, rhs)
        try:
            step = -np.linalg.solve(r, qtf[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = -np.einsum("nij,nj->ni", np.linalg.pinv(r), qtf)
        xn = xa + step
        fn = fun(xn, idx)
        cn = np.einsum("nm,nm->n", fn, fn)
        ok = np.isfinite(cn) & (cn < cost[idx])
        acc = idx[ok]
        x[acc], f[acc], cost[acc] = xn[ok], fn[ok], cn[ok]
        mu[acc] = np.maximum(mu[acc] / 3, 1e-15)
        rej = idx[~ok]
        mu[rej] = mu[rej] * 4
        tiny = np.abs(step).max(axis=1) <= 1e-17 * (1 + np.abs(xa).max(axis=1))
        done = (cost[idx] <= ftol) | (ok & tiny) | (mu[idx] > 1e16)
        active[idx[done]] = False
    return BatchResult(x, np.abs(f).max(axis=1), it)


def cluster(points: np.ndarray, radius: float = 1e-6) -> list[np.ndarray]:
    """Greedy clustering; distances are relative to max(1, |centre|)."""
    centres: list[np.ndarray] = []
    for p in points:
        for c in centres:
            if np.abs(p - c).max() <= radius * max(1.0, float(np.abs(c).max())):
                break
        else:
            centres.append(p)
    return centres


def match(found: list[np.ndarray], expected: list[np.ndarray], radius: float = 1e-6):
    """Greedy nearest matching of two point sets.

    Returns (pairs, unmatched_found, unmatched_expected) as index lists.
    """
    free = list(range(len(expected)))
    pairs, lost = [], []
    for i, p in enumerate(found):
        best, best_d = None, None
        for j in free:
            q = expected[j]
            d = float(np.abs(p - q).max()) / max(1.0, float(np.abs(q).max()))
            if d <= radius and (best_d is None or d < best_d):
                best, best_d = j, d
        if best is None:
            lost.append(i)
        else:
            pairs.append((i, best))
            free.remove(best)
    return pairs, lost, free
