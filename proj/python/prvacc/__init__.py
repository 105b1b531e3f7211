"""Numerical privacy accountant with staged FFT composition.

Build privacy loss mechanisms with :func:`laplace`, :func:`gaussian` or
:func:`subsampled_gaussian`, compose them with :func:`compose` (or
:func:`compose_heterogeneous` for a mixed list), and query the result's
``sandwich(eps)`` for rigorous (lower, estimate, upper) brackets of the
privacy curve.
"""

from ._core import (
    CompositionResult,
    Mechanism,
    NumericalError,
    compose,
    compose_heterogeneous,
    gaussian,
    laplace,
    subsampled_gaussian,
)

__all__ = [
    "CompositionResult",
    "Mechanism",
    "NumericalError",
    "compose",
    "compose_heterogeneous",
    "gaussian",
    "laplace",
    "subsampled_gaussian",
]

__version__ = "0.1.0"
