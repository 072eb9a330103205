"""Structural derivation of the modulus of averagedness.

:func:`exact_modulus` walks an operator tree and combines closed-form rules
into a certified interval ``[lower, upper]`` for ``k(T)``. Every rule that
fires is recorded as a :class:`TraceStep`.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..errors import AveragednessError
from ..operators import functions as F
from ..operators import monotone as M
from ..operators import nonexpansive as N
from ..operators import sets as S
from .matrix import SubspacePair, is_orthogonal, matrix_modulus, scalar_modulus, two_subspace_modulus

HALF = 0.5


@dataclass(frozen=True)
class TraceStep:
    rule: str
    node: str
    inputs: dict = field(default_factory=dict)
    lower: float = 0.0
    upper: float = 1.0

    def to_dict(self):
        return {"rule": self.rule, "node": self.node, "inputs": dict(self.inputs),
                "lower": self.lower, "upper": self.upper}


@dataclass(frozen=True)
class ModulusBound:
    """Certified interval for ``k(T)`` with the rules that produced it."""

    lower: float
    upper: float
    exact: bool = False
    trace: tuple = ()

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError(f"invalid modulus interval [{lo}, {hi}]")
        if self.exact and lo != hi:
            raise ValueError("an exact bound needs lower == upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "trace", tuple(self.trace))

    @property
    def value(self) -> Optional[float]:
        return self.upper if self.exact else None

    @property
    def rules(self) -> List[str]:
        return [s.rule for s in self.trace]

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact,
                "trace": [s.to_dict() for s in self.trace]}


UNKNOWN = ModulusBound(0.0, 1.0)


def _name(node):
    return type(node).__name__


def _exact(value, rule, node, trace=(), **inputs):
    v = float(min(max(value, 0.0), 1.0))
    step = TraceStep(rule, _name(node), inputs, v, v)
    return ModulusBound(v, v, True, tuple(trace) + (step,))


def _interval(lo, hi, rule, node, trace=(), **inputs):
    step = TraceStep(rule, _name(node), inputs, float(lo), float(hi))
    return ModulusBound(lo, hi, False, tuple(trace) + (step,))


def ogura_yamada(k1, k2):
    """Upper bound for the modulus of a composition of a k1- and a k2-averaged map."""
    if k1 >= 1.0 or k2 >= 1.0:
        return 1.0
    return min(1.0, (k1 + k2 - 2.0 * k1 * k2) / (1.0 - k1 * k2))


# ---------------------------------------------------------------- functions


def prox_modulus(f, scale=1.0) -> ModulusBound:
    """Modulus of the proximal map of ``scale * f``."""
    t = float(scale)
    if isinstance(f, F.Indicator):
        return _set_projection(f.set, f)
    if isinstance(f, F.Quadratic):
        ell = f.gradient_lipschitz(t)
        return _exact(0.5 * ell / (1.0 + ell), "prox_lipschitz_value", f, lipschitz=ell)
    if isinstance(f, F.HalfDistanceSquared):
        if f.set.is_whole_space:
            return _exact(0.0, "zero_function_prox", f)
        a = t * f.scale
        return _exact(a / (2.0 * (1.0 + a)), "half_distance_squared_prox", f, alpha=a)
    if isinstance(f, F.Huber):
        a = t * f.scale
        return _exact(a / (2.0 * (f.mu + a)), "huber_prox", f, alpha=a, mu=f.mu)
    if isinstance(f, F.Support):
        if f.set.is_singleton:
            return _exact(0.0, "support_singleton_shift", f)
        return _exact(HALF, "support_nonsmooth", f, scale=t * f.scale)
    if isinstance(f, F.MoreauEnvelope):
        a = t * f.scale
        inner = prox_modulus(f.inner, f.mu + a)
        w = a / (f.mu + a)
        return _scaled(inner, w, "moreau_envelope_prox", f, alpha=a, mu=f.mu)
    if isinstance(f, F.ScalarPiecewiseConvex):
        if f.is_affine:
            return _exact(0.0, "affine_function_shift", f)
        return _exact(HALF, "nonsmooth_prox", f)
    return _interval(0.0, HALF, "firm_upper_bound", f)


def _scaled(inner, w, rule, node, **inputs):
    lo, hi = w * inner.lower, w * inner.upper
    if inner.exact:
        return _exact(hi, rule, node, inner.trace, weight=w, **inputs)
    return _interval(lo, hi, rule, node, inner.trace, weight=w, **inputs)


def _set_projection(C, node):
    if C.is_whole_space:
        return _exact(0.0, "whole_space_projection", node)
    return _exact(HALF, "projection_is_special", node)


# ---------------------------------------------------------------- resolvents


def resolvent_modulus(A, alpha=1.0) -> ModulusBound:
    """Modulus of ``J_{alpha A}``."""
    a = float(alpha)
    if isinstance(A, M.Subdifferential):
        return prox_modulus(A.function, a)
    if isinstance(A, M.NormalCone):
        return _set_projection(A.set, A)
    if isinstance(A, M.Scaled):
        return resolvent_modulus(A.operator, a * A.beta)
    if isinstance(A, M.Yosida):
        inner = resolvent_modulus(A.operator, A.mu + a)
        return _scaled(inner, a / (A.mu + a), "yosida_resolvent", A, alpha=a, mu=A.mu)
    try:
        c = A.cocoercive_value()
    except (NotImplementedError, AveragednessError):
        return _interval(0.0, HALF, "firm_upper_bound", A)
    k = 0.0 if np.isinf(c) else a / (2.0 * (a + c))
    return _exact(k, "resolvent_cocoercive_value", A, alpha=a, cocoercive_value=c)


# ---------------------------------------------------------------- structure


def _flatten(ops):
    out = []
    for op in ops:
        if isinstance(op, N.Compose):
            out.extend(_flatten(op.operators))
        else:
            out.append(op)
    return out


def _is_identity(op):
    return isinstance(op, N.Identity) or (isinstance(op, N.Relaxation) and op.lam == 0.0)


def not_injective(op) -> bool:
    """Structural witness that ``op`` is not injective."""
    if isinstance(op, N.Constant):
        return True
    if isinstance(op, N.Projection):
        return not op.set.is_whole_space
    if isinstance(op, N.Prox) and isinstance(op.function, F.Indicator):
        return not op.function.set.is_whole_space
    if isinstance(op, (N.LinearMatrix, N.Affine)):
        return np.linalg.matrix_rank(op.matrix) < op.dim
    if isinstance(op, N.Compose):
        ops = [o for o in _flatten(op.operators) if not _is_identity(o)]
        return bool(ops) and (not_injective(ops[-1]) or any(isinstance(o, N.Constant) for o in ops))
    return False


def not_surjective(op) -> bool:
    """Structural witness that ``op`` is not surjective."""
    if isinstance(op, N.Constant):
        return True
    if isinstance(op, N.Projection):
        return not op.set.is_whole_space
    if isinstance(op, N.Prox) and isinstance(op.function, F.Indicator):
        return not op.function.set.is_whole_space
    if isinstance(op, (N.LinearMatrix, N.Affine)):
        return np.linalg.matrix_rank(op.matrix) < op.dim
    if isinstance(op, N.Compose):
        ops = [o for o in _flatten(op.operators) if not _is_identity(o)]
        return bool(ops) and (not_surjective(ops[0]) or any(isinstance(o, N.Constant) for o in ops))
    return False


def _non_bijective(op):
    return not_injective(op) or not_surjective(op)


def _affine_modulus(op, m, trace=()):
    if np.allclose(m, np.eye(m.shape[0]), atol=1e-15, rtol=0):
        return _exact(0.0, "shift_is_zero", op, trace)
    if is_orthogonal(m):
        return _exact(1.0, "orthogonal_matrix", op, trace)
    return _exact(matrix_modulus(m), "matrix_modulus", op, trace, dim=m.shape[0])


def _collapsed(op, m, trace=()):
    step = TraceStep("affine_collapse", _name(op), {"dim": m.shape[0]})
    return _affine_modulus(op, m, tuple(trace) + (step,))


def _flat_linear_part(C):
    if isinstance(C, S.LinearSubspace):
        return C
    if isinstance(C, S.AffineSubspace):
        return C.linear_part()
    return None


# ---------------------------------------------------------------- nodes


def _compose(op):
    ops = [o for o in _flatten(op.operators) if not _is_identity(o)]
    trace = []
    # shifts at either end do not change the modulus
    while ops and isinstance(ops[0], N.Shift):
        ops.pop(0)
        trace.append(TraceStep("shift_invariance", "Shift"))
    while ops and isinstance(ops[-1], N.Shift):
        ops.pop()
        trace.append(TraceStep("shift_invariance", "Shift"))
    if not ops:
        return _exact(0.0, "shift_is_zero", op, trace)
    if any(isinstance(o, N.Constant) for o in ops):
        return _exact(HALF, "constant_map", op, trace)
    if len(ops) == 1:
        inner = _bound(ops[0])
        return ModulusBound(inner.lower, inner.upper, inner.exact, tuple(trace) + inner.trace)

    if len(ops) == 2 and all(isinstance(o, N.Projection) for o in ops):
        v, u = (_flat_linear_part(o.set) for o in ops)
        if u is not None and v is not None:
            if u.is_whole_space or v.is_whole_space or u.same_as(v):
                rest = ops[1] if v.is_whole_space else ops[0]
                inner = _bound(rest)
                return ModulusBound(inner.lower, inner.upper, inner.exact, tuple(trace) + inner.trace)
            pair = SubspacePair(u, v)
            k = two_subspace_modulus(pair)
            return _exact(k, "two_subspace_modulus", op, trace, friedrichs_cosine=pair.friedrichs_cosine)

    forms = [o.affine_form(op.dim) for o in ops]
    if op.dim is not None and all(f is not None for f in forms):
        m = np.eye(op.dim)
        for mi, _ in reversed(forms):
            m = mi @ m
        return _collapsed(op, m, trace)

    bounds = [_bound(o) for o in ops]
    hi = bounds[0].upper
    for b in bounds[1:]:
        hi = ogura_yamada(hi, b.upper)
    for b in bounds:
        trace.extend(b.trace)
    lo = HALF if (not_surjective(ops[0]) or not_injective(ops[-1])) else 0.0
    if lo > 0:
        trace.append(TraceStep("non_bijective_lower_bound", _name(op), {}, lo, 1.0))
    hi = max(hi, lo)
    return _interval(lo, hi, "ogura_yamada_bound", op, trace, factors=len(ops))


def _convex_combination(op):
    pairs = [(w, o) for w, o in zip(op.weights, op.operators) if w > 0]
    trivial = [(w, o) for w, o in pairs if _is_identity(o) or isinstance(o, N.Shift)]
    rest = [(w, o) for w, o in pairs if not (_is_identity(o) or isinstance(o, N.Shift))]
    if not rest:
        return _exact(0.0, "shift_is_zero", op)
    if len(rest) == 1:
        lam, inner_op = rest[0]
        inner = _bound(inner_op)
        trace = [TraceStep("shift_invariance", "Shift")] if any(isinstance(o, N.Shift) for _, o in trivial) else []
        b = _scaled(inner, lam, "relaxation_scaling", op, lam=lam)
        return ModulusBound(b.lower, b.upper, b.exact, tuple(trace) + b.trace)

    form = op.affine_form()
    if form is not None:
        return _collapsed(op, form[0])

    bounds = [(w, _bound(o)) for w, o in pairs]
    hi = sum(w * b.upper for w, b in bounds)
    trace = [s for _, b in bounds for s in b.trace]
    return _interval(0.0, min(hi, 1.0), "convexity_bound", op, trace)


def _douglas_rachford(op):
    u, v = _flat_linear_part(op.first), _flat_linear_part(op.second)
    if u is not None and v is not None:
        trace = ()
        if isinstance(op.first, S.AffineSubspace) or isinstance(op.second, S.AffineSubspace):
            trace = (TraceStep("shift_invariance", "AffineSubspace"),)
        if u.same_as(v):
            return _exact(0.0, "douglas_rachford_equal_subspaces", op, trace)
        return _exact(HALF, "douglas_rachford_subspaces", op, trace)
    form = op.affine_form()
    if form is not None:
        return _collapsed(op, form[0])
    return _interval(0.0, HALF, "firm_upper_bound", op)


def _limit(op):
    inner_op = op.inner
    inner = _bound(inner_op)
    if isinstance(inner_op, N.Projection):
        return ModulusBound(inner.lower, inner.upper, inner.exact,
                            inner.trace + (TraceStep("idempotent_limit", _name(op)),))
    if inner.upper >= 1.0:
        return _interval(0.0, 1.0, "no_rule", op, inner.trace)
    form = inner_op.affine_form(op.dim)
    if form is not None:
        m, b = form
        n = m.shape[0]
        sol, *_ = np.linalg.lstsq(np.eye(n) - m, b, rcond=None)
        if np.linalg.norm((np.eye(n) - m) @ sol - b) <= 1e-9 * (1.0 + np.linalg.norm(b)):
            if np.allclose(m, np.eye(n), atol=1e-15, rtol=0):
                return _exact(0.0, "identity_limit", op, inner.trace)
            return _exact(HALF, "affine_limit_is_projection", op, inner.trace)
    if isinstance(inner_op, N.ScalarPiecewise) and inner.upper <= HALF:
        fix = inner_op.fixed_points()
        if fix and fix != [(-np.inf, np.inf)]:
            return _exact(HALF, "firm_scalar_limit", op, inner.trace)
    if inner.lower > 0.0:
        return _interval(HALF, 1.0, "limit_operator_range", op, inner.trace)
    return _interval(0.0, 1.0, "limit_operator_range", op, inner.trace)


def _bound(op) -> ModulusBound:
    if isinstance(op, N.Identity):
        return _exact(0.0, "identity", op)
    if isinstance(op, N.Shift):
        return _exact(0.0, "shift_is_zero", op)
    if isinstance(op, N.Constant):
        return _exact(HALF, "constant_map", op)
    if isinstance(op, N.LinearMatrix):
        return _affine_modulus(op, op.matrix)
    if isinstance(op, N.Affine):
        return _affine_modulus(op, op.matrix, trace=(TraceStep("shift_invariance", "Affine"),))
    if isinstance(op, N.Projection):
        return _set_projection(op.set, op)
    if isinstance(op, N.Reflector):
        if op.set.is_whole_space:
            return _exact(0.0, "whole_space_projection", op)
        return _exact(1.0, "reflector_modulus", op)
    if isinstance(op, N.Prox):
        return prox_modulus(op.function)
    if isinstance(op, N.Resolvent):
        return resolvent_modulus(op.operator, op.alpha)
    if isinstance(op, N.ReflectedResolvent):
        inner = resolvent_modulus(op.operator, op.alpha)
        return _scaled(inner, 2.0, "reflected_resolvent", op)
    if isinstance(op, N.Relaxation):
        return _scaled(_bound(op.inner), op.lam, "relaxation_scaling", op, lam=op.lam)
    if isinstance(op, N.Compose):
        return _compose(op)
    if isinstance(op, N.ConvexCombination):
        return _convex_combination(op)
    if isinstance(op, N.DouglasRachford):
        return _douglas_rachford(op)
    if isinstance(op, N.ScalarPiecewise):
        return _exact(scalar_modulus(op), "scalar_modulus", op)
    if isinstance(op, N.LimitOperator):
        return _limit(op)
    return _default(op)


def _default(op):
    firm = isinstance(op, (N.Prox, N.Projection, N.Resolvent))
    hi = HALF if firm else 1.0
    lo = HALF if _non_bijective(op) else 0.0
    return ModulusBound(lo, max(lo, hi), lo == hi, ())


def exact_modulus(T) -> ModulusBound:
    """Exact value or tightest derivable interval for the modulus of ``T``.

    Never raises: a tree no rule can handle yields ``[0, 1]`` with an empty
    trace.

    Examples
    --------
    >>> from averagedness.operators import Projection, Halfspace
    >>> exact_modulus(Projection(Halfspace([1.0, 1.0], 0.0))).value
    0.5
    """
    try:
        b = _bound(T)
    except AveragednessError:
        return UNKNOWN
    if not b.exact:
        lo = b.lower
        if lo == 0.0 and _non_bijective(T):
            lo = HALF
            b = ModulusBound(lo, max(lo, b.upper), False,
                             b.trace + (TraceStep("non_bijective_lower_bound", _name(T), {}, lo, 1.0),))
        if isinstance(T, (N.Prox, N.Projection, N.Resolvent)) and b.upper > HALF:
            b = ModulusBound(min(b.lower, HALF), HALF, False,
                             b.trace + (TraceStep("firm_upper_bound", _name(T), {}, 0.0, HALF),))
    return b
