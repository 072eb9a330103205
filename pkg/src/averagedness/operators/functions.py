"""Proper lsc convex functions with closed-form proximal maps.

``f.prox(x, scale=t)`` evaluates the proximal map of ``t * f``. Smooth
variants also expose ``gradient`` and the Lipschitz constant of the gradient
of ``t * f`` through ``gradient_lipschitz``.
"""
from dataclasses import dataclass

import numpy as np

from .. import _linalg
from ..errors import DimensionMismatch, UnsupportedFunction, ValidationError
from .sets import ConvexSet, batch, unbatch


def _scalar(value, name, positive=True):
    v = float(value)
    if not np.isfinite(v) or (positive and v <= 0):
        raise ValidationError(f"{name} must be a finite positive number, got {value!r}")
    return v


def norm_prox(X, t):
    """Proximal map of ``t * ||.||`` (block soft thresholding)."""
    nrm = np.linalg.norm(X, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        shrink = np.where(nrm > t, 1.0 - t / np.where(nrm > 0, nrm, 1.0), 0.0)
    return X * shrink[:, None]


class ConvexFunction:
    """Base class; ``dim`` is None for dimension-free variants."""

    dim = None

    def prox(self, x, scale=1.0):
        X, squeeze = batch(x, self.dim)
        return unbatch(self._prox(X, float(scale)), squeeze)

    def value(self, x):
        X, squeeze = batch(x, self.dim)
        v = self._value(X)
        return float(v[0]) if squeeze else v

    def gradient(self, x, scale=1.0):
        if not self.lipschitz_smooth:
            raise UnsupportedFunction(f"{type(self).__name__} is not differentiable everywhere")
        X, squeeze = batch(x, self.dim)
        return unbatch(self._gradient(X, float(scale)), squeeze)

    @property
    def lipschitz_smooth(self):
        """Whether ``f`` is differentiable on all of R^n with Lipschitz gradient."""
        raise NotImplementedError

    def gradient_lipschitz(self, scale=1.0):
        """Best Lipschitz constant of the gradient of ``scale * f`` (inf if not smooth)."""
        raise NotImplementedError

    @property
    def accuracy(self):
        return 64 * _linalg.EPS

    def _prox(self, X, t):
        raise NotImplementedError

    def _value(self, X):
        raise NotImplementedError

    def _gradient(self, X, t):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Indicator(ConvexFunction):
    set: ConvexSet

    @property
    def dim(self):
        return self.set.dim

    def _prox(self, X, t):
        return self.set._project(X)

    def _value(self, X):
        return np.where(self.set.contains(X), 0.0, np.inf)

    @property
    def lipschitz_smooth(self):
        return self.set.is_whole_space

    def gradient_lipschitz(self, scale=1.0):
        return 0.0 if self.set.is_whole_space else np.inf

    def _gradient(self, X, t):
        return np.zeros_like(X)

    @property
    def accuracy(self):
        return self.set.accuracy


@dataclass(frozen=True, eq=False)
class Quadratic(ConvexFunction):
    """``x -> 0.5 <x, Q x>`` with ``Q`` symmetric positive semidefinite."""

    Q: np.ndarray

    def __post_init__(self):
        q = _linalg.as_matrix(self.Q, "Q")
        if q.shape[0] != q.shape[1]:
            raise ValidationError("Q must be square")
        if not np.allclose(q, q.T, atol=1e-12, rtol=0):
            raise ValidationError("Q must be symmetric")
        if _linalg.min_eig(q) < -1e-12:
            raise ValidationError("Q must be positive semidefinite")
        object.__setattr__(self, "Q", _linalg.frozen(q))

    @property
    def dim(self):
        return self.Q.shape[0]

    def _prox(self, X, t):
        return np.linalg.solve(np.eye(self.dim) + t * self.Q, X.T).T

    def _value(self, X):
        return 0.5 * np.einsum("ij,jk,ik->i", X, self.Q, X)

    @property
    def lipschitz_smooth(self):
        return True

    def gradient_lipschitz(self, scale=1.0):
        return scale * float(np.linalg.eigvalsh(self.Q)[-1])

    def _gradient(self, X, t):
        return t * X @ self.Q


@dataclass(frozen=True, eq=False)
class HalfDistanceSquared(ConvexFunction):
    """``x -> (scale/2) d_C(x)^2``."""

    set: ConvexSet
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "scale", _scalar(self.scale, "scale"))

    @property
    def dim(self):
        return self.set.dim

    def _prox(self, X, t):
        a = t * self.scale
        return (X + a * self.set._project(X)) / (1.0 + a)

    def _value(self, X):
        return 0.5 * self.scale * np.linalg.norm(X - self.set._project(X), axis=1) ** 2

    @property
    def lipschitz_smooth(self):
        return True

    def gradient_lipschitz(self, scale=1.0):
        return 0.0 if self.set.is_whole_space else scale * self.scale

    def _gradient(self, X, t):
        return t * self.scale * (X - self.set._project(X))

    @property
    def accuracy(self):
        return self.set.accuracy


@dataclass(frozen=True, eq=False)
class Huber(ConvexFunction):
    """``scale * H_mu`` where ``H_mu`` is the Moreau envelope of the Euclidean norm."""

    mu: float
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mu", _scalar(self.mu, "mu"))
        object.__setattr__(self, "scale", _scalar(self.scale, "scale"))

    def _prox(self, X, t):
        a = t * self.scale
        mu = self.mu
        return (mu / (mu + a)) * X + (a / (mu + a)) * norm_prox(X, mu + a)

    def _value(self, X):
        r = np.linalg.norm(X, axis=1)
        return self.scale * np.where(r <= self.mu, r ** 2 / (2 * self.mu), r - self.mu / 2)

    @property
    def lipschitz_smooth(self):
        return True

    def gradient_lipschitz(self, scale=1.0):
        return scale * self.scale / self.mu

    def _gradient(self, X, t):
        r = np.linalg.norm(X, axis=1)
        denom = np.maximum(r, self.mu)
        return t * self.scale * X / denom[:, None]


@dataclass(frozen=True, eq=False)
class Support(ConvexFunction):
    """``x -> scale * sup_{c in C} <c, x>``."""

    set: ConvexSet
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "scale", _scalar(self.scale, "scale"))

    @property
    def dim(self):
        return self.set.dim

    def _prox(self, X, t):
        lam = t * self.scale
        return X - lam * self.set._project(X / lam)

    def _value(self, X):
        return self.scale * support_value(self.set, X)

    @property
    def lipschitz_smooth(self):
        return self.set.is_singleton

    def gradient_lipschitz(self, scale=1.0):
        return 0.0 if self.set.is_singleton else np.inf

    def _gradient(self, X, t):
        p = self.set._project(np.zeros((1, self.dim)))[0]
        return np.broadcast_to(t * self.scale * p, X.shape).copy()

    @property
    def accuracy(self):
        return self.set.accuracy


@dataclass(frozen=True, eq=False)
class MoreauEnvelope(ConvexFunction):
    """``x -> scale * min_u { inner(u) + ||u - x||^2 / (2 mu) }``."""

    inner: ConvexFunction
    mu: float
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mu", _scalar(self.mu, "mu"))
        object.__setattr__(self, "scale", _scalar(self.scale, "scale"))

    @property
    def dim(self):
        return self.inner.dim

    def _prox(self, X, t):
        a = t * self.scale
        mu = self.mu
        return (mu / (mu + a)) * X + (a / (mu + a)) * self.inner._prox(X, mu + a)

    def _value(self, X):
        P = self.inner._prox(X, self.mu)
        return self.scale * (self.inner._value(P) + np.linalg.norm(P - X, axis=1) ** 2 / (2 * self.mu))

    @property
    def lipschitz_smooth(self):
        return True

    def gradient_lipschitz(self, scale=1.0):
        # l = 2k / (1 - 2k) with k the modulus of the prox of scale * self
        from ..calculus.rules import prox_modulus

        k = prox_modulus(self, scale).upper
        return 2 * k / (1 - 2 * k)

    def _gradient(self, X, t):
        return (t * self.scale / self.mu) * (X - self.inner._prox(X, self.mu))

    @property
    def accuracy(self):
        return self.inner.accuracy


@dataclass(frozen=True, eq=False)
class ScalarPiecewiseConvex(ConvexFunction):
    """Convex piecewise-linear function on R.

    ``slopes[i]`` is the slope left of ``breakpoints[i]`` (the last slope
    applies right of the last breakpoint). The function takes the value
    ``offset`` at the first breakpoint, or at 0 when there is none.
    """

    breakpoints: np.ndarray
    slopes: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.breakpoints, dtype=float)) if np.size(self.breakpoints) else np.zeros(0)
        s = np.atleast_1d(np.asarray(self.slopes, dtype=float))
        if s.shape[0] != b.shape[0] + 1:
            raise ValidationError("need exactly one more slope than breakpoints")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(s))):
            raise ValidationError("breakpoints and slopes must be finite")
        if np.any(np.diff(b) <= 0):
            raise ValidationError("breakpoints must be strictly increasing")
        if np.any(np.diff(s) < 0):
            raise ValidationError("slopes must be nondecreasing for convexity")
        object.__setattr__(self, "breakpoints", _linalg.frozen(b))
        object.__setattr__(self, "slopes", _linalg.frozen(s))
        object.__setattr__(self, "offset", float(self.offset))

    dim = 1

    def _knots(self, t):
        b, s = self.breakpoints, self.slopes
        xs, us = [], []
        for j, bj in enumerate(b):
            xs += [bj + t * s[j], bj + t * s[j + 1]]
            us += [bj, bj]
        return np.array(xs), np.array(us)

    def _prox(self, X, t):
        x = X[:, 0]
        if self.breakpoints.size == 0:
            return (x - t * self.slopes[0])[:, None]
        xs, us = self._knots(t)
        u = np.interp(x, xs, us)
        u = np.where(x < xs[0], x - t * self.slopes[0], u)
        u = np.where(x > xs[-1], x - t * self.slopes[-1], u)
        return u[:, None]

    def prox_as_piecewise(self, t=1.0):
        """The proximal map of ``t * f`` as a :class:`ScalarPiecewise` operator."""
        from .nonexpansive import ScalarPiecewise

        s0 = self.slopes[0]
        if self.breakpoints.size == 0:
            return ScalarPiecewise([], [1.0], [-t * s0])
        xs, us = self._knots(t)
        bps, slopes, icpts = [], [1.0], [-t * s0]
        for i in range(len(xs)):
            piece = (0.0, us[i]) if i % 2 == 0 else (1.0, us[i] - xs[i])
            if bps and xs[i] <= bps[-1]:
                # zero-length flat piece (equal neighbouring slopes)
                slopes[-1], icpts[-1] = piece
                continue
            bps.append(xs[i])
            slopes.append(piece[0])
            icpts.append(piece[1])
        return ScalarPiecewise(bps, slopes, icpts)

    def _value(self, X):
        x = X[:, 0]
        b, s = self.breakpoints, self.slopes
        if b.size == 0:
            return self.offset + s[0] * x
        vals = np.concatenate([[self.offset], self.offset + np.cumsum(s[1:-1] * np.diff(b))])
        i = np.clip(np.searchsorted(b, x, side="right") - 1, 0, b.size - 1)
        left = x < b[0]
        v = vals[i] + s[i + 1] * (x - b[i])
        return np.where(left, self.offset + s[0] * (x - b[0]), v)

    @property
    def is_affine(self):
        return bool(np.all(self.slopes == self.slopes[0]))

    @property
    def lipschitz_smooth(self):
        return self.is_affine

    def gradient_lipschitz(self, scale=1.0):
        return 0.0 if self.is_affine else np.inf

    def _gradient(self, X, t):
        return np.full_like(X, t * self.slopes[0])


def support_value(C, X):
    """``sigma_C`` evaluated row-wise (may be +inf)."""
    from . import sets as S

    if isinstance(C, S.Singleton):
        return X @ C.point
    if isinstance(C, S.Ball):
        if np.isinf(C.radius):
            return np.where(np.linalg.norm(X, axis=1) == 0, 0.0, np.inf)
        return X @ C.center + C.radius * np.linalg.norm(X, axis=1)
    if isinstance(C, S.Box):
        with np.errstate(invalid="ignore"):
            terms = np.where(X > 0, X * C.upper, np.where(X < 0, X * C.lower, 0.0))
        return terms.sum(axis=1)
    if isinstance(C, (S.LinearSubspace, S.AffineSubspace)):
        P, b = C.affine_projector()
        ortho = np.linalg.norm(X @ P.T, axis=1) <= 1e-12 * (1 + np.linalg.norm(X, axis=1))
        base = X @ b if isinstance(C, S.AffineSubspace) else np.zeros(X.shape[0])
        return np.where(ortho, base, np.inf)
    if isinstance(C, S.Halfspace):
        n = C.normal
        t = -(X @ n) / (n @ n)
        on_ray = (t >= 0) & (np.linalg.norm(X + np.outer(t, n), axis=1) <= 1e-12 * (1 + np.linalg.norm(X, axis=1)))
        return np.where(on_ray, -t * C.offset, np.inf)
    if isinstance(C, S.HalfspaceIntersection):
        from scipy.optimize import linprog

        a, b = C._constraints()
        out = np.empty(X.shape[0])
        for i, x in enumerate(X):
            res = linprog(-x, A_ub=-a, b_ub=-b, bounds=[(None, None)] * C.dim, method="highs")
            out[i] = -res.fun if res.status == 0 else np.inf
        return out
    raise UnsupportedFunction(f"no support function for {type(C).__name__}")


def check_dim(f, dim):
    if f.dim is not None and dim is not None and f.dim != dim:
        raise DimensionMismatch(f"function dimension {f.dim} != {dim}")
