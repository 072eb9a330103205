"""Convex sets, convex functions, monotone operators and nonexpansive operators."""
from .functions import (ConvexFunction, HalfDistanceSquared, Huber, Indicator, MoreauEnvelope,
                        Quadratic, ScalarPiecewiseConvex, Support)
from .monotone import LinearMonotone, MonotoneOperator, NormalCone, Scaled, Subdifferential, Yosida
from .nonexpansive import (Affine, Compose, Constant, ConvexCombination, DouglasRachford, Identity,
                           LimitOperator, LinearMatrix, Operator, Projection, Prox, Reflector,
                           ReflectedResolvent, Relaxation, Resolvent, ScalarPiecewise, Shift, evaluate)
from .sets import (AffineSubspace, Ball, Box, ConvexSet, Halfspace, HalfspaceIntersection,
                   LinearSubspace, Singleton)


def prox_evaluate(f, x):
    """Proximal map of ``f`` at ``x``."""
    return evaluate(Prox(f), x)


__all__ = [
    "AffineSubspace", "Ball", "Box", "ConvexSet", "Halfspace", "HalfspaceIntersection",
    "LinearSubspace", "Singleton",
    "ConvexFunction", "HalfDistanceSquared", "Huber", "Indicator", "MoreauEnvelope", "Quadratic",
    "ScalarPiecewiseConvex", "Support",
    "LinearMonotone", "MonotoneOperator", "NormalCone", "Scaled", "Subdifferential", "Yosida",
    "Affine", "Compose", "Constant", "ConvexCombination", "DouglasRachford", "Identity",
    "LimitOperator", "LinearMatrix", "Operator", "Projection", "Prox", "Reflector",
    "ReflectedResolvent", "Relaxation", "Resolvent", "ScalarPiecewise", "Shift", "evaluate",
    "prox_evaluate",
]
