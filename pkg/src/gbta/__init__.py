"""Generalized ABO-blood-type algebras B(alpha, beta) and B'(lambda, beta)."""

from .params import Mode, Params, from_alpha, new_params

__version__ = "0.1.0"

__all__ = ["Mode", "Params", "from_alpha", "new_params", "__version__"]
