"""Evolutionary operator V on phenotype frequencies and plenary powers."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO

import numpy as np

from .algebra import Element, StructureTensor, multiply
from .params import Params

MAX_STEPS = 10**6


class NotOnSimplex(ValueError):
    pass


@dataclass(frozen=True)
class AlleleFreqs:
    p_O: float
    p_A: float
    p_B: float

    def total(self):
        return self.p_O + self.p_A + self.p_B


def _state(s, p: Params) -> np.ndarray:
    if isinstance(s, Element):
        s = s.coords
    s = np.asarray(s)
    if s.dtype != object:
        s = s.astype(float)
    if s.shape[-1] != 4:
        raise ValueError(f"a state has 4 coordinates, got shape {s.shape}")
    return s


def _allele_arrays(p: Params, x: np.ndarray):
    al, be = p.alpha, p.beta
    x1, x2, x3, x4 = (x[..., i] for i in range(4))
    p_o = x1 + al * x2 + al * x3
    p_a = (1 - al) * x2 + be * x4
    p_b = (1 - al) * x3 + (1 - be) * x4
    return p_o, p_a, p_b


def allele_freqs(p: Params, s) -> AlleleFreqs:
    """Allele frequencies (p_O, p_A, p_B) underlying phenotype proportions ``s``."""
    p_o, p_a, p_b = _allele_arrays(p, _state(s, p))
    return AlleleFreqs(p_o, p_a, p_b)


def evolve(p: Params, s) -> np.ndarray:
    """One generation of the quadratic operator V.

    Works on any real 4-vector (or a stack of them), not only the simplex:
    the polarization identity evaluates V at x +- y.
    """
    x = _state(s, p)
    p_o, p_a, p_b = _allele_arrays(p, x)
    out = np.stack([
        p_o * p_o,
        p_a * p_a + 2 * p_a * p_o,
        p_b * p_b + 2 * p_b * p_o,
        2 * p_a * p_b,
    ], axis=-1)
    return out


def polarized_multiply(p: Params, x, y) -> np.ndarray:
    """x . y recovered from V alone: (V(x + y) - V(x - y)) / 4."""
    x, y = _state(x, p), _state(y, p)
    return (evolve(p, x + y) - evolve(p, x - y)) / 4


def on_simplex(s: np.ndarray, tol: float) -> bool:
    s = np.asarray(s, dtype=float)
    return bool(np.all(s >= -tol) and abs(float(s.sum()) - 1.0) <= tol)


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray          # (n + 1, 4), row k is V^k(s0)
    converged: bool
    converged_at: int | None = None  # first k with |V^k - V^(k-1)| < 10 tol

    @property
    def steps(self) -> int:
        return self.states.shape[0] - 1

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def trajectory(p: Params, s0, n: int, tol: float | None = None) -> Trajectory:
    """The states s0, V(s0), ..., V^n(s0).

    ``converged`` is set once successive states differ by less than
    ``10 * tol`` in max norm; all ``n`` steps are still returned. V squares the total
    mass, so in float mode each state is divided by its sum to stop rounding
    drift from growing; on the simplex this changes nothing.

    Raises:
        NotOnSimplex: ``s0`` is not a probability vector within ``tol``.
    """
    tol = p.tol if tol is None else tol
    if not 0 <= n <= MAX_STEPS:
        raise ValueError(f"steps must lie in [0, {MAX_STEPS}], got {n}")
    x = _state(s0, p)
    if not on_simplex(x, tol):
        raise NotOnSimplex(f"{x.tolist()} is not on the simplex")
    states = [x]
    at = None
    for k in range(1, n + 1):
        nxt = evolve(p, states[-1])
        if not p.exact:
            nxt = nxt / nxt.sum()
        if at is None and float(np.max(np.abs((nxt - states[-1]).astype(float)))) < 10 * tol:
            at = k
        states.append(nxt)
    return Trajectory(np.array(states), at is not None, at)


def write_trajectory_csv(traj: Trajectory, fh: IO[str]) -> None:
    """CSV with header ``step,x1,x2,x3,x4`` and 17 significant digits."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["step", "x1", "x2", "x3", "x4"])
    for k, s in enumerate(traj.states):
        w.writerow([k] + [f"{float(v):.17g}" for v in s])


def plenary_powers(t: StructureTensor, m: Element, n: int) -> list[Element]:
    """[m^[1], ..., m^[n]] with m^[k+1] = m^[k] . m^[k]."""
    if n < 1:
        raise ValueError(f"plenary powers start at 1, got {n}")
    seq = [m]
    for _ in range(n - 1):
        seq.append(multiply(t, seq[-1], seq[-1]))
    return seq


def plenary_power(t: StructureTensor, m: Element, n: int) -> Element:
    return plenary_powers(t, m, n)[-1]
