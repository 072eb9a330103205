"""Modulus of averagedness: exact calculus, sampled bounds and iteration dynamics."""
__version__ = "0.1.0"

from . import calculus, dynamics, estimator, operators  # noqa: E402

__all__ = ["__version__", "calculus", "dynamics", "estimator", "operators"]
