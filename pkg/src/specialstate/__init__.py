"""Numerical laboratory for special-state measurement models.

Submodules: :mod:`~specialstate.decay` (survival curves), :mod:`~specialstate.special`
(eigenvectors of ``C^dagger C``), :mod:`~specialstate.catmap` (cat-map entropy and
two-time boundary problems), :mod:`~specialstate.kicks` (Cauchy kick statistics),
:mod:`~specialstate.fields` (Stern-Gerlach wire-loop fields) and
:mod:`~specialstate.cli` (command-line front end).
"""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    NumericError, PreconditionError, ResourceExhausted, SingularityError,
    SpecialStateError, ValidationError,
)

__all__ = [
    "__version__", "SpecialStateError", "ValidationError", "PreconditionError",
    "SingularityError", "NumericError", "ResourceExhausted",
]
