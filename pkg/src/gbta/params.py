"""Parameter pair (lambda, beta), the degenerate curve P, and numeric policy.

``lambda`` is stored rather than ``alpha`` because every formula of the
transformed algebra is written in it; ``alpha = 1 - lambda`` is derived.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from numbers import Rational, Real

DEFAULT_TOL = 1e-9

# Largest denominator a float may carry to be accepted as an exact ratio.
MAX_FLOAT_DENOMINATOR = 10**6


class ParamsError(ValueError):
    """Base class for invalid parameter input."""


class OutOfRange(ParamsError):
    pass


class BadTol(ParamsError):
    pass


class ModeUnavailable(ParamsError):
    pass


class Mode(enum.Enum):
    FLOAT64 = "float64"
    RATIONAL = "rational"


class Branch(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"
    NOT_APPLICABLE = "n/a"


def _as_fraction(value) -> Fraction:
    if isinstance(value, bool):
        raise ModeUnavailable(f"{value!r} is not a number")
    if isinstance(value, (Rational, Decimal)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ModeUnavailable(f"cannot read {value!r} as an exact ratio") from exc
    if isinstance(value, Real):
        x = float(value)
        if not math.isfinite(x):
            raise ModeUnavailable(f"{value!r} is not finite")
        exact = Fraction(x)
        if exact.denominator > MAX_FLOAT_DENOMINATOR:
            raise ModeUnavailable(
                f"float {x!r} is not an exact small ratio; pass it as a string such as '3/10'"
            )
        return exact
    raise ModeUnavailable(f"cannot read {value!r} as an exact ratio")


def _as_float(value) -> float:
    if isinstance(value, str):
        value = Fraction(value.strip()) if "/" in value else float(value)
    x = float(value)
    if not math.isfinite(x):
        raise OutOfRange(f"{value!r} is not finite")
    return x


@dataclass(frozen=True)
class Params:
    """Validated parameters of B'(lambda, beta).

    Construct through :func:`new_params`; direct construction skips validation.
    In rational mode ``lam`` and ``beta`` are :class:`fractions.Fraction`.
    """

    lam: float | Fraction
    beta: float | Fraction
    tol: float = DEFAULT_TOL
    mode: Mode = Mode.FLOAT64

    @property
    def alpha(self):
        return 1 - self.lam

    @property
    def exact(self) -> bool:
        return self.mode is Mode.RATIONAL

    def one(self):
        """Multiplicative unit of the active number field."""
        return Fraction(1) if self.exact else 1.0

    def scalar(self, value):
        """Coerce a number into the active field."""
        return _as_fraction(value) if self.exact else float(value)

    def with_beta(self, beta) -> "Params":
        return new_params(self.lam, beta, self.tol, self.mode)

    def swapped(self) -> "Params":
        """Parameters of the algebra with a and b exchanged, i.e. beta -> 1 - beta."""
        return new_params(self.lam, 1 - self.beta, self.tol, self.mode)

    def __str__(self) -> str:
        return f"(lambda={self.lam}, beta={self.beta})"


def new_params(lam, beta, tol: float = DEFAULT_TOL, mode: Mode | str = Mode.FLOAT64) -> Params:
    """Validate and build a :class:`Params`.

    Raises:
        OutOfRange: lambda or beta not strictly inside (0, 1).
        BadTol: tol is not a positive finite number.
        ModeUnavailable: rational mode requested for inputs that are not exact ratios.
    """
    mode = Mode(mode)
    try:
        tol = float(tol)
    except (TypeError, ValueError) as exc:
        raise BadTol(f"tol must be a number, got {tol!r}") from exc
    if not (tol > 0 and math.isfinite(tol)):
        raise BadTol(f"tol must be positive, got {tol!r}")

    if mode is Mode.RATIONAL:
        lam_v, beta_v = _as_fraction(lam), _as_fraction(beta)
    else:
        lam_v, beta_v = _as_float(lam), _as_float(beta)

    for name, v in (("lambda", lam_v), ("beta", beta_v)):
        if not 0 < v < 1:
            raise OutOfRange(f"{name} must lie in the open interval (0, 1), got {v}")
    return Params(lam_v, beta_v, tol, mode)


def from_alpha(alpha, beta, tol: float = DEFAULT_TOL, mode: Mode | str = Mode.FLOAT64) -> Params:
    """Build parameters from the gamete probability alpha = P(O | A) = P(O | B)."""
    mode = Mode(mode)
    a = _as_fraction(alpha) if mode is Mode.RATIONAL else _as_float(alpha)
    if not 0 < a < 1:
        raise OutOfRange(f"alpha must lie in the open interval (0, 1), got {a}")
    return new_params(1 - a, beta, tol, mode)


@dataclass(frozen=True)
class PMembership:
    in_p: bool
    residual: float | Fraction
    branch: Branch


def p_residual(lam, beta):
    """(2 beta - 1)^2 - (1 - 3 lambda)(1 - lambda).

    Equal to the idempotent denominator -3 lambda^2 + 4 beta^2 + 4 lambda - 4 beta.
    """
    return (2 * beta - 1) ** 2 - (1 - 3 * lam) * (1 - lam)


def p_membership(p: Params) -> PMembership:
    """Decide whether (lambda, beta) lies on the curve P.

    P = {0 < lambda <= 1/3, beta = (1 +- sqrt((1 - lambda)(1 - 3 lambda))) / 2}.
    In rational mode membership requires an exactly vanishing residual.
    """
    residual = p_residual(p.lam, p.beta)
    if p.exact:
        in_p = p.lam <= Fraction(1, 3) and residual == 0
    else:
        in_p = p.lam <= 1 / 3 + p.tol and abs(residual) <= p.tol
    if not in_p:
        branch = Branch.NOT_APPLICABLE
    else:
        branch = Branch.PLUS if 2 * p.beta >= 1 else Branch.MINUS
    return PMembership(bool(in_p), residual, branch)


def beta_on_p(lam: float, branch: Branch | str = Branch.PLUS) -> float:
    """The beta value placing (lambda, beta) on P for 0 < lambda <= 1/3."""
    branch = Branch(branch)
    if not 0 < lam <= 1 / 3:
        raise OutOfRange(f"P only exists for 0 < lambda <= 1/3, got {lam}")
    root = math.sqrt(max((1 - lam) * (1 - 3 * lam), 0.0))
    sign = 1.0 if branch is Branch.PLUS else -1.0
    return 0.5 * (1 + sign * root)
