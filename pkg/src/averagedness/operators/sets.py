"""Closed convex sets with projection routines.

Every set works on points of R^n given either as a single vector of shape
``(n,)`` or as a batch of shape ``(m, n)``; projections preserve the shape.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

from .. import _linalg
from ..errors import DimensionMismatch, NonConvergence, ValidationError

# Per-unit-scale rounding error of the closed-form projections.
CLOSED_FORM_ACCURACY = 64 * _linalg.EPS


def batch(x, dim=None):
    """Return ``(X, squeeze)`` with ``X`` two-dimensional."""
    a = np.asarray(x, dtype=float)
    squeeze = a.ndim <= 1
    a = np.atleast_2d(a)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a vector or a batch of vectors, got shape {a.shape}")
    if dim is not None and a.shape[1] != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {a.shape[1]}")
    return a, squeeze


def unbatch(a, squeeze):
    return a[0] if squeeze else a


class ConvexSet:
    """Nonempty closed convex subset of R^n."""

    dim: int

    def project(self, x):
        X, squeeze = batch(x, self.dim)
        return unbatch(self._project(X), squeeze)

    def _project(self, X):
        raise NotImplementedError

    def contains(self, x, tol=1e-9):
        X, squeeze = batch(x, self.dim)
        gap = np.linalg.norm(self._project(X) - X, axis=1)
        inside = gap <= tol * (1.0 + np.linalg.norm(X, axis=1))
        return bool(inside[0]) if squeeze else inside

    def distance(self, x):
        X, squeeze = batch(x, self.dim)
        d = np.linalg.norm(self._project(X) - X, axis=1)
        return float(d[0]) if squeeze else d

    @property
    def is_whole_space(self):
        return False

    @property
    def is_singleton(self):
        return False

    def affine_projector(self):
        """``(P, b)`` with ``P_C x = P x + b`` when the projection is affine, else None."""
        return None

    @property
    def accuracy(self):
        return CLOSED_FORM_ACCURACY


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValidationError("Box bounds must be vectors of equal length")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValidationError("Box bounds must not be NaN")
        if np.any(lo > hi):
            raise ValidationError("Box requires lower <= upper")
        if np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise ValidationError("Box would be empty")
        object.__setattr__(self, "lower", _linalg.frozen(lo))
        object.__setattr__(self, "upper", _linalg.frozen(hi))

    @property
    def dim(self):
        return self.lower.shape[0]

    def _project(self, X):
        return np.clip(X, self.lower, self.upper)

    @property
    def is_whole_space(self):
        return bool(np.all(np.isneginf(self.lower)) and np.all(np.isposinf(self.upper)))

    @property
    def is_singleton(self):
        return bool(np.all(self.lower == self.upper))

    def affine_projector(self):
        if self.is_whole_space:
            return np.eye(self.dim), np.zeros(self.dim)
        if self.is_singleton:
            return np.zeros((self.dim, self.dim)), self.lower.copy()
        return None


@dataclass(frozen=True, eq=False)
class Ball(ConvexSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = _linalg.as_vector(self.center, "center")
        r = float(self.radius)
        if not r >= 0:
            raise ValidationError("Ball radius must be >= 0")
        object.__setattr__(self, "center", _linalg.frozen(c))
        object.__setattr__(self, "radius", r)

    @property
    def dim(self):
        return self.center.shape[0]

    def _project(self, X):
        if np.isinf(self.radius):
            return X.copy()
        D = X - self.center
        nrm = np.linalg.norm(D, axis=1)
        out = X.copy()
        outside = nrm > self.radius
        out[outside] = self.center + D[outside] * (self.radius / nrm[outside])[:, None]
        return out

    @property
    def is_whole_space(self):
        return bool(np.isinf(self.radius))

    @property
    def is_singleton(self):
        return self.radius == 0.0

    def affine_projector(self):
        if self.is_whole_space:
            return np.eye(self.dim), np.zeros(self.dim)
        if self.is_singleton:
            return np.zeros((self.dim, self.dim)), self.center.copy()
        return None


@dataclass(frozen=True, eq=False)
class Halfspace(ConvexSet):
    """The set ``{x : <normal, x> >= offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = _linalg.as_vector(self.normal, "normal")
        if not np.any(n != 0):
            raise ValidationError("Halfspace normal must be nonzero")
        object.__setattr__(self, "normal", _linalg.frozen(n))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self):
        return self.normal.shape[0]

    def _project(self, X):
        gap = np.minimum(0.0, X @ self.normal - self.offset)
        return X - np.outer(gap, self.normal) / (self.normal @ self.normal)

    def boundary_point(self):
        return self.normal * (self.offset / (self.normal @ self.normal))


class _FlatMixin:
    """Shared projection for subspaces kept with their spanning generators.

    Projecting with the Gram matrix of the original generators keeps simple
    rational inputs exact, e.g. the line spanned by (1, 1).
    """

    def _flat_project(self, D):
        g = self._generators
        if g.shape[1] == 0:
            return np.zeros_like(D)
        coef = np.linalg.solve(g.T @ g, g.T @ D.T)
        return (g @ coef).T


def _check_orthonormal(basis):
    k = basis.shape[1]
    if k and not np.allclose(basis.T @ basis, np.eye(k), atol=1e-12, rtol=0):
        raise ValidationError("basis columns must be orthonormal to 1e-12; use .span() for raw generators")


def _generators_from_span(vectors, dim):
    v = np.asarray(vectors, dtype=float)
    if v.size == 0:
        if dim is None:
            raise ValidationError("dimension required for the zero subspace")
        return np.zeros((dim, 0)), np.zeros((dim, 0))
    v = np.atleast_2d(v)
    if not np.all(np.isfinite(v)):
        raise ValidationError("spanning vectors must be finite")
    g = v.T
    basis = _linalg.orthonormal_columns(g)
    if basis.shape[1] < g.shape[1]:
        # dependent generators: fall back to the orthonormal basis
        g = basis
    return basis, g


@dataclass(frozen=True, eq=False)
class LinearSubspace(_FlatMixin, ConvexSet):
    """Linear subspace given by an ``n x k`` matrix with orthonormal columns."""

    basis: np.ndarray
    _generators: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValidationError("basis must be an n x k matrix")
        _check_orthonormal(b)
        g = b if self._generators is None else np.asarray(self._generators, dtype=float)
        object.__setattr__(self, "basis", _linalg.frozen(b))
        object.__setattr__(self, "_generators", _linalg.frozen(g))

    @classmethod
    def span(cls, vectors, dim=None):
        """Subspace spanned by the rows of ``vectors``."""
        basis, g = _generators_from_span(vectors, dim)
        return cls(basis, g)

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def rank(self):
        return self.basis.shape[1]

    def _project(self, X):
        return self._flat_project(X)

    @property
    def is_whole_space(self):
        return self.rank == self.dim

    @property
    def is_singleton(self):
        return self.rank == 0

    def projector_matrix(self):
        return self._flat_project(np.eye(self.dim)).T

    def affine_projector(self):
        return self.projector_matrix(), np.zeros(self.dim)

    def same_as(self, other, tol=1e-10):
        return (self.dim == other.dim and self.rank == other.rank
                and np.allclose(self.projector_matrix(), other.projector_matrix(), atol=tol, rtol=0))


@dataclass(frozen=True, eq=False)
class AffineSubspace(_FlatMixin, ConvexSet):
    """``anchor + span(basis)`` with orthonormal basis columns."""

    basis: np.ndarray
    anchor: np.ndarray
    _generators: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValidationError("basis must be an n x k matrix")
        _check_orthonormal(b)
        a = _linalg.as_vector(self.anchor, "anchor")
        if a.shape[0] != b.shape[0]:
            raise DimensionMismatch("anchor and basis dimensions differ")
        g = b if self._generators is None else np.asarray(self._generators, dtype=float)
        object.__setattr__(self, "basis", _linalg.frozen(b))
        object.__setattr__(self, "anchor", _linalg.frozen(a))
        object.__setattr__(self, "_generators", _linalg.frozen(g))

    @classmethod
    def span(cls, vectors, anchor):
        anchor = _linalg.as_vector(anchor, "anchor")
        basis, g = _generators_from_span(vectors, anchor.shape[0])
        return cls(basis, anchor, g)

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def rank(self):
        return self.basis.shape[1]

    def _project(self, X):
        return self.anchor + self._flat_project(X - self.anchor)

    @property
    def is_whole_space(self):
        return self.rank == self.dim

    @property
    def is_singleton(self):
        return self.rank == 0

    def linear_part(self):
        return LinearSubspace(self.basis, self._generators)

    def affine_projector(self):
        p = self._flat_project(np.eye(self.dim)).T
        return p, self.anchor - p @ self.anchor


@dataclass(frozen=True, eq=False)
class Singleton(ConvexSet):
    point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", _linalg.frozen(_linalg.as_vector(self.point, "point")))

    @property
    def dim(self):
        return self.point.shape[0]

    def _project(self, X):
        return np.broadcast_to(self.point, X.shape).copy()

    @property
    def is_singleton(self):
        return True

    def affine_projector(self):
        return np.zeros((self.dim, self.dim)), self.point.copy()


@dataclass(frozen=True, eq=False)
class HalfspaceIntersection(ConvexSet):
    """Finite intersection of halfspaces, projected by Dykstra's algorithm."""

    halfspaces: tuple
    tol: float = 1e-10
    max_sweeps: int = 100_000

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        if not hs:
            raise ValidationError("HalfspaceIntersection needs at least one halfspace")
        if not all(isinstance(h, Halfspace) for h in hs):
            raise ValidationError("HalfspaceIntersection members must be Halfspace")
        if len({h.dim for h in hs}) != 1:
            raise DimensionMismatch("halfspaces have different dimensions")
        object.__setattr__(self, "halfspaces", hs)
        if not self._feasible():
            raise ValidationError("halfspace intersection is empty")

    def _constraints(self):
        a = np.array([h.normal for h in self.halfspaces])
        b = np.array([h.offset for h in self.halfspaces])
        return a, b

    def _feasible(self):
        a, b = self._constraints()
        res = linprog(np.zeros(self.dim), A_ub=-a, b_ub=-b, bounds=[(None, None)] * self.dim,
                      method="highs")
        return res.status == 0

    @property
    def dim(self):
        return self.halfspaces[0].dim

    def _project(self, X):
        X = X.copy()
        a, b = self._constraints()
        norms = np.sqrt(np.einsum("ij,ij->i", a, a))
        u, c = a / norms[:, None], b / norms
        incr = np.zeros((len(c),) + X.shape)
        active = np.arange(X.shape[0])
        Xa, Ia = X, incr
        for _ in range(self.max_sweeps):
            prev = Xa.copy()
            for j in range(len(c)):
                Y = Xa + Ia[j]
                gap = np.minimum(0.0, Y @ u[j] - c[j])
                Xa = Y - gap[:, None] * u[j]
                Ia[j] = Y - Xa
            X[active], incr[:, active] = Xa, Ia
            change = np.sqrt(np.einsum("ij,ij->i", Xa - prev, Xa - prev))
            violation = np.max(np.maximum(c - Xa @ u.T, 0.0), axis=1)
            tol = self.tol * (1.0 + np.sqrt(np.einsum("ij,ij->i", Xa, Xa)))
            done = (change <= tol) & (violation <= tol)
            if done.all():
                return X
            if done.any():
                active = active[~done]
                Xa, Ia = X[active], incr[:, active]
        raise NonConvergence(f"Dykstra projection did not converge in {self.max_sweeps} sweeps")

    @property
    def accuracy(self):
        return 10.0 * self.tol + CLOSED_FORM_ACCURACY

    @cached_property
    def is_singleton(self):
        a, b = self._constraints()
        lo = np.empty(self.dim)
        hi = np.empty(self.dim)
        for i in range(self.dim):
            c = np.zeros(self.dim)
            c[i] = 1.0
            for sign, store in ((1.0, lo), (-1.0, hi)):
                res = linprog(sign * c, A_ub=-a, b_ub=-b, bounds=[(None, None)] * self.dim,
                              method="highs")
                if res.status != 0:
                    return False
                store[i] = res.x[i]
        return bool(np.all(hi - lo <= 1e-12))
