"""Nonexpansive operators on R^n as immutable, evaluable trees.

Every node evaluates batches ``X`` of shape ``(m, n)`` through ``_apply``.
``T(x)`` evaluates a single vector and :func:`evaluate` adds the input
checks used by the command line front end.
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .. import _linalg
from ..errors import DimensionMismatch, NonConvergence, NotNonexpansive, ValidationError
from .functions import ConvexFunction
from .monotone import MonotoneOperator
from .sets import CLOSED_FORM_ACCURACY, ConvexSet, batch, unbatch


class Operator:
    """Base class for nonexpansive operators."""

    dim: Optional[int] = None

    def __call__(self, x):
        X, squeeze = batch(x, self.dim)
        return unbatch(self._apply(X), squeeze)

    def _apply(self, X):
        raise NotImplementedError

    @property
    def children(self):
        return ()

    @property
    def accuracy(self):
        """Absolute evaluation error per unit of ``1 + ||x||``."""
        return CLOSED_FORM_ACCURACY

    def affine_form(self, dim=None):
        """``(M, b)`` with ``T x = M x + b`` when the tree is affine, else None."""
        return None


def check_input(T, x):
    """``x`` as a fresh float vector, validated against ``T``."""
    v = np.array(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("input vector must have finite entries")
    if T.dim is not None and v.shape[0] != T.dim:
        raise DimensionMismatch(f"operator acts on R^{T.dim}, got a vector of length {v.shape[0]}")
    return v


def evaluate(T, x):
    """Evaluate ``T`` at a single finite vector ``x``."""
    return T(check_input(T, x))


def _common_dim(ops):
    dims = {op.dim for op in ops if op.dim is not None}
    if len(dims) > 1:
        raise DimensionMismatch(f"operands act on different dimensions: {sorted(dims)}")
    return dims.pop() if dims else None


def _certify_matrix(m):
    m = _linalg.as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValidationError("operator matrix must be square")
    norm = _linalg.certified_norm(m)
    if norm > 1 + _linalg.NONEXPANSIVE_SLACK:
        raise NotNonexpansive(f"spectral norm {norm:.17g} exceeds 1")
    return _linalg.frozen(m)


def _linear_accuracy(n):
    return CLOSED_FORM_ACCURACY * max(1, n)


@dataclass(frozen=True, eq=False)
class Identity(Operator):
    dim: Optional[int] = None

    def _apply(self, X):
        return X.copy()

    @property
    def accuracy(self):
        return 0.0

    def affine_form(self, dim=None):
        n = self.dim or dim
        return None if n is None else (np.eye(n), np.zeros(n))


@dataclass(frozen=True, eq=False)
class Constant(Operator):
    point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", _linalg.frozen(_linalg.as_vector(self.point, "point")))

    @property
    def dim(self):
        return self.point.shape[0]

    def _apply(self, X):
        return np.broadcast_to(self.point, X.shape).copy()

    @property
    def accuracy(self):
        return 0.0

    def affine_form(self, dim=None):
        return np.zeros((self.dim, self.dim)), self.point.copy()


@dataclass(frozen=True, eq=False)
class Shift(Operator):
    """``x -> x + v``."""

    vector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vector", _linalg.frozen(_linalg.as_vector(self.vector, "vector")))

    @property
    def dim(self):
        return self.vector.shape[0]

    def _apply(self, X):
        return X + self.vector

    def affine_form(self, dim=None):
        return np.eye(self.dim), self.vector.copy()


@dataclass(frozen=True, eq=False)
class LinearMatrix(Operator):
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _certify_matrix(self.matrix))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def _apply(self, X):
        return X @ self.matrix.T

    @property
    def accuracy(self):
        return _linear_accuracy(self.dim)

    def affine_form(self, dim=None):
        return self.matrix.copy(), np.zeros(self.dim)


@dataclass(frozen=True, eq=False)
class Affine(Operator):
    """``x -> M x + b`` with ``||M||_2 <= 1``."""

    matrix: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        m = _certify_matrix(self.matrix)
        b = _linalg.as_vector(self.shift, "shift")
        if b.shape[0] != m.shape[0]:
            raise DimensionMismatch("shift length does not match the matrix")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "shift", _linalg.frozen(b))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def _apply(self, X):
        return X @ self.matrix.T + self.shift

    @property
    def accuracy(self):
        return _linear_accuracy(self.dim)

    def affine_form(self, dim=None):
        return self.matrix.copy(), self.shift.copy()


@dataclass(frozen=True, eq=False)
class Projection(Operator):
    set: ConvexSet

    @property
    def dim(self):
        return self.set.dim

    def _apply(self, X):
        return self.set._project(X)

    @property
    def accuracy(self):
        return self.set.accuracy

    def affine_form(self, dim=None):
        return self.set.affine_projector()


@dataclass(frozen=True, eq=False)
class Reflector(Operator):
    """``2 P_C - Id``."""

    set: ConvexSet

    @property
    def dim(self):
        return self.set.dim

    def _apply(self, X):
        return 2.0 * self.set._project(X) - X

    @property
    def accuracy(self):
        return 2.0 * self.set.accuracy

    def affine_form(self, dim=None):
        form = self.set.affine_projector()
        if form is None:
            return None
        p, b = form
        return 2.0 * p - np.eye(self.dim), 2.0 * b


@dataclass(frozen=True, eq=False)
class Prox(Operator):
    function: ConvexFunction

    @property
    def dim(self):
        return self.function.dim

    def _apply(self, X):
        return self.function._prox(X, 1.0)

    @property
    def accuracy(self):
        return self.function.accuracy

    def affine_form(self, dim=None):
        from .functions import Indicator, Quadratic

        if isinstance(self.function, Indicator):
            return self.function.set.affine_projector()
        if isinstance(self.function, Quadratic):
            n = self.function.dim
            return np.linalg.inv(np.eye(n) + self.function.Q), np.zeros(n)
        return None


@dataclass(frozen=True, eq=False)
class Resolvent(Operator):
    """``J_{alpha A} = (Id + alpha A)^{-1}``."""

    operator: MonotoneOperator
    alpha: float = 1.0

    def __post_init__(self):
        a = float(self.alpha)
        if not (np.isfinite(a) and a > 0):
            raise ValidationError("resolvent scale must be a finite positive number")
        object.__setattr__(self, "alpha", a)

    @property
    def dim(self):
        return self.operator.dim

    def _apply(self, X):
        return self.operator._resolvent(X, self.alpha)

    @property
    def accuracy(self):
        return self.operator.accuracy

    def affine_form(self, dim=None):
        from .monotone import LinearMonotone

        if isinstance(self.operator, LinearMonotone):
            return self.operator.resolvent_matrix(self.alpha), np.zeros(self.dim)
        return None


@dataclass(frozen=True, eq=False)
class ReflectedResolvent(Operator):
    """``R_{alpha A} = 2 J_{alpha A} - Id``."""

    operator: MonotoneOperator
    alpha: float = 1.0

    def __post_init__(self):
        a = float(self.alpha)
        if not (np.isfinite(a) and a > 0):
            raise ValidationError("resolvent scale must be a finite positive number")
        object.__setattr__(self, "alpha", a)

    @property
    def dim(self):
        return self.operator.dim

    def _apply(self, X):
        return 2.0 * self.operator._resolvent(X, self.alpha) - X

    @property
    def accuracy(self):
        return 2.0 * self.operator.accuracy

    def resolvent(self):
        return Resolvent(self.operator, self.alpha)

    def affine_form(self, dim=None):
        form = self.resolvent().affine_form(dim)
        if form is None:
            return None
        m, b = form
        return 2.0 * m - np.eye(self.dim), 2.0 * b


@dataclass(frozen=True, eq=False)
class Relaxation(Operator):
    """``(1 - lam) Id + lam T`` with ``lam`` in [0, 1]."""

    lam: float
    inner: Operator

    def __post_init__(self):
        lam = float(self.lam)
        if not 0.0 <= lam <= 1.0:
            raise ValidationError(f"relaxation parameter must lie in [0, 1], got {self.lam!r}")
        object.__setattr__(self, "lam", lam)

    @property
    def dim(self):
        return self.inner.dim

    def _apply(self, X):
        return (1.0 - self.lam) * X + self.lam * self.inner._apply(X)

    @property
    def children(self):
        return (self.inner,)

    @property
    def accuracy(self):
        return self.inner.accuracy + CLOSED_FORM_ACCURACY

    def affine_form(self, dim=None):
        form = self.inner.affine_form(dim)
        if form is None:
            return None
        m, b = form
        return (1.0 - self.lam) * np.eye(m.shape[0]) + self.lam * m, self.lam * b


@dataclass(frozen=True, eq=False)
class Compose(Operator):
    """``T_1 o T_2 o ... o T_m``; the last operator is applied first."""

    operators: Tuple[Operator, ...]

    def __post_init__(self):
        ops = tuple(self.operators)
        if not ops:
            raise ValidationError("Compose needs at least one operator")
        _common_dim(ops)
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self):
        return _common_dim(self.operators)

    def _apply(self, X):
        for op in reversed(self.operators):
            X = op._apply(X)
        return X

    @property
    def children(self):
        return self.operators

    @property
    def accuracy(self):
        return sum(op.accuracy for op in self.operators)

    def affine_form(self, dim=None):
        n = self.dim or dim
        if n is None:
            return None
        m, b = np.eye(n), np.zeros(n)
        for op in reversed(self.operators):
            form = op.affine_form(n)
            if form is None:
                return None
            mi, bi = form
            m, b = mi @ m, mi @ b + bi
        return m, b


@dataclass(frozen=True, eq=False)
class ConvexCombination(Operator):
    weights: Tuple[float, ...]
    operators: Tuple[Operator, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        ops = tuple(self.operators)
        if w.ndim != 1 or w.shape[0] != len(ops) or not ops:
            raise ValidationError("need one weight per operator")
        if np.any(w < 0) or not np.all(np.isfinite(w)) or abs(w.sum() - 1.0) > 1e-12:
            raise ValidationError("weights must be nonnegative and sum to 1")
        _common_dim(ops)
        object.__setattr__(self, "weights", tuple(float(v) for v in w))
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self):
        return _common_dim(self.operators)

    def _apply(self, X):
        out = np.zeros_like(X)
        for w, op in zip(self.weights, self.operators):
            out += w * op._apply(X)
        return out

    @property
    def children(self):
        return self.operators

    @property
    def accuracy(self):
        return max(op.accuracy for op in self.operators) + CLOSED_FORM_ACCURACY

    def affine_form(self, dim=None):
        n = self.dim or dim
        if n is None:
            return None
        m, b = np.zeros((n, n)), np.zeros(n)
        for w, op in zip(self.weights, self.operators):
            form = op.affine_form(n)
            if form is None:
                return None
            m, b = m + w * form[0], b + w * form[1]
        return m, b


@dataclass(frozen=True, eq=False)
class DouglasRachford(Operator):
    """``Id - P_A + P_B (2 P_A - Id)``."""

    first: ConvexSet
    second: ConvexSet

    def __post_init__(self):
        if self.first.dim != self.second.dim:
            raise DimensionMismatch("Douglas-Rachford sets live in different dimensions")

    @property
    def dim(self):
        return self.first.dim

    def _apply(self, X):
        pa = self.first._project(X)
        return X - pa + self.second._project(2.0 * pa - X)

    @property
    def accuracy(self):
        return 3.0 * self.first.accuracy + self.second.accuracy

    def affine_form(self, dim=None):
        fa, fb = self.first.affine_projector(), self.second.affine_projector()
        if fa is None or fb is None:
            return None
        (pa, a), (pb, b) = fa, fb
        n = self.dim
        return np.eye(n) - pa + pb @ (2.0 * pa - np.eye(n)), -a + pb @ (2.0 * a) + b


@dataclass(frozen=True, eq=False)
class ScalarPiecewise(Operator):
    """Continuous piecewise-affine map on R.

    Piece ``i`` is ``x -> slopes[i] * x + intercepts[i]`` and applies left of
    ``breakpoints[i]`` (the last piece applies right of the last breakpoint).
    """

    breakpoints: np.ndarray
    slopes: np.ndarray
    intercepts: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float).reshape(-1)
        s = np.asarray(self.slopes, dtype=float).reshape(-1)
        c = np.asarray(self.intercepts, dtype=float).reshape(-1)
        if s.shape != c.shape or s.shape[0] != b.shape[0] + 1:
            raise ValidationError("need one slope and one intercept per piece, and one piece more than breakpoints")
        if not all(np.all(np.isfinite(a)) for a in (b, s, c)):
            raise ValidationError("piecewise data must be finite")
        if np.any(np.diff(b) <= 0):
            raise ValidationError("breakpoints must be strictly increasing")
        if np.any(np.abs(s) > 1.0):
            raise NotNonexpansive("every piece slope must lie in [-1, 1]")
        left = s[:-1] * b + c[:-1]
        right = s[1:] * b + c[1:]
        if np.any(np.abs(left - right) > 1e-12 * (1.0 + np.abs(b))):
            raise ValidationError("piecewise map is discontinuous at a breakpoint")
        for name, a in (("breakpoints", b), ("slopes", s), ("intercepts", c)):
            object.__setattr__(self, name, _linalg.frozen(a))

    dim = 1

    @classmethod
    def from_values(cls, breakpoints, slopes, value_at_first):
        """Build from slopes and the value at the first breakpoint (or at 0)."""
        b = np.asarray(breakpoints, dtype=float).reshape(-1)
        s = np.asarray(slopes, dtype=float).reshape(-1)
        x0 = b[0] if b.size else 0.0
        c = np.empty_like(s)
        c[0] = value_at_first - s[0] * x0
        for j in range(b.size):
            c[j + 1] = s[j] * b[j] + c[j] - s[j + 1] * b[j]
        return cls(b, s, c)

    def _apply(self, X):
        x = X[:, 0]
        i = np.searchsorted(self.breakpoints, x, side="left")
        return (self.slopes[i] * x + self.intercepts[i])[:, None]

    def fixed_points(self):
        """Fixed point set as a list of closed intervals ``(lo, hi)`` (may be infinite)."""
        b = self.breakpoints
        edges = np.concatenate([[-np.inf], b, [np.inf]])
        pieces = []
        for i, (s, c) in enumerate(zip(self.slopes, self.intercepts)):
            lo, hi = edges[i], edges[i + 1]
            if s == 1.0:
                if c == 0.0:
                    pieces.append((lo, hi))
            else:
                x = c / (1.0 - s)
                if lo <= x <= hi:
                    pieces.append((x, x))
        merged = []
        for lo, hi in pieces:
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        return merged

    def affine_form(self, dim=None):
        if np.all(self.slopes == self.slopes[0]) and np.all(self.intercepts == self.intercepts[0]):
            return np.array([[self.slopes[0]]]), np.array([self.intercepts[0]])
        return None


@dataclass(frozen=True, eq=False)
class LimitOperator(Operator):
    """``x -> lim T^n x``, computed by iterating until ``||T x - x|| <= tol``."""

    inner: Operator
    tol: float = 1e-10
    max_iter: int = 1_000_000

    def __post_init__(self):
        if not float(self.tol) > 0:
            raise ValidationError("tolerance must be positive")
        if int(self.max_iter) < 0:
            raise ValidationError("max_iter must be nonnegative")
        object.__setattr__(self, "tol", float(self.tol))
        object.__setattr__(self, "max_iter", int(self.max_iter))

    @property
    def dim(self):
        return self.inner.dim

    @property
    def children(self):
        return (self.inner,)

    def _apply(self, X):
        X = X.copy()
        active = np.arange(X.shape[0])
        for _ in range(self.max_iter + 1):
            Xa = X[active]
            TX = self.inner._apply(Xa)
            done = np.linalg.norm(TX - Xa, axis=1) <= self.tol
            X[active[~done]] = TX[~done]
            active = active[~done]
            if active.size == 0:
                return X
        raise NonConvergence(f"limit iteration did not reach tolerance {self.tol:g} in {self.max_iter} steps")

    @property
    def accuracy(self):
        # the terminal residual bounds the distance to the limit only up to the rate
        return self.inner.accuracy + 100.0 * self.tol
