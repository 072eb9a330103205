"""Maximally monotone operators with closed-form resolvents.

``A.resolvent(x, alpha)`` returns ``(Id + alpha A)^{-1} x``. Variants that are
single-valued everywhere also support ``A.apply(x)``. ``cocoercive_value``
gives the exact best cocoercivity constant ``c(A)`` where the catalog knows it.
"""
from dataclasses import dataclass

import numpy as np

from .. import _linalg
from ..errors import SetValuedError, ValidationError
from .functions import ConvexFunction, _scalar
from .sets import ConvexSet, batch, unbatch


class MonotoneOperator:
    dim = None

    def resolvent(self, x, alpha=1.0):
        X, squeeze = batch(x, self.dim)
        return unbatch(self._resolvent(X, float(alpha)), squeeze)

    def apply(self, x):
        if not self.single_valued:
            raise SetValuedError(f"{type(self).__name__} is set-valued; only its resolvent is available")
        X, squeeze = batch(x, self.dim)
        return unbatch(self._apply(X), squeeze)

    @property
    def single_valued(self):
        return False

    def cocoercive_value(self):
        """Best cocoercivity constant ``c(A)`` (``inf`` for the zero operator)."""
        raise NotImplementedError

    @property
    def accuracy(self):
        return 64 * _linalg.EPS

    def _resolvent(self, X, alpha):
        raise NotImplementedError

    def _apply(self, X):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Subdifferential(MonotoneOperator):
    function: ConvexFunction

    @property
    def dim(self):
        return self.function.dim

    def _resolvent(self, X, alpha):
        return self.function._prox(X, alpha)

    @property
    def single_valued(self):
        return self.function.lipschitz_smooth

    def _apply(self, X):
        return self.function._gradient(X, 1.0)

    def cocoercive_value(self):
        # Baillon-Haddad: c(grad f) = 1 / Lip(grad f)
        lip = self.function.gradient_lipschitz(1.0)
        if lip == 0:
            return np.inf
        return 0.0 if np.isinf(lip) else 1.0 / lip

    @property
    def accuracy(self):
        return self.function.accuracy


@dataclass(frozen=True, eq=False)
class LinearMonotone(MonotoneOperator):
    """``x -> M x`` with ``M + M^T`` positive semidefinite (skew matrices allowed)."""

    M: np.ndarray

    def __post_init__(self):
        m = _linalg.as_matrix(self.M, "M")
        if m.shape[0] != m.shape[1]:
            raise ValidationError("M must be square")
        if _linalg.min_eig(m) < -1e-12:
            raise ValidationError("M must have a positive semidefinite symmetric part")
        object.__setattr__(self, "M", _linalg.frozen(m))

    @property
    def dim(self):
        return self.M.shape[0]

    def _resolvent(self, X, alpha):
        return np.linalg.solve(np.eye(self.dim) + alpha * self.M, X.T).T

    @property
    def single_valued(self):
        return True

    def _apply(self, X):
        return X @ self.M.T

    def cocoercive_value(self):
        return _linalg.linear_cocoercive_value(self.M)

    def monotone_value(self):
        return max(_linalg.min_eig(self.M), 0.0)

    def resolvent_matrix(self, alpha=1.0):
        return np.linalg.inv(np.eye(self.dim) + alpha * self.M)


@dataclass(frozen=True, eq=False)
class NormalCone(MonotoneOperator):
    set: ConvexSet

    @property
    def dim(self):
        return self.set.dim

    def _resolvent(self, X, alpha):
        return self.set._project(X)

    @property
    def single_valued(self):
        return self.set.is_whole_space

    def _apply(self, X):
        return np.zeros_like(X)

    def cocoercive_value(self):
        return np.inf if self.set.is_whole_space else 0.0

    @property
    def accuracy(self):
        return self.set.accuracy


@dataclass(frozen=True, eq=False)
class Scaled(MonotoneOperator):
    """``beta * A``."""

    beta: float
    operator: MonotoneOperator

    def __post_init__(self):
        object.__setattr__(self, "beta", _scalar(self.beta, "beta"))

    @property
    def dim(self):
        return self.operator.dim

    def _resolvent(self, X, alpha):
        return self.operator._resolvent(X, alpha * self.beta)

    @property
    def single_valued(self):
        return self.operator.single_valued

    def _apply(self, X):
        return self.beta * self.operator._apply(X)

    def cocoercive_value(self):
        return self.operator.cocoercive_value() / self.beta

    @property
    def accuracy(self):
        return self.operator.accuracy


@dataclass(frozen=True, eq=False)
class Yosida(MonotoneOperator):
    """Yosida regularization ``Y_mu(A) = (Id - J_{mu A}) / mu``."""

    mu: float
    operator: MonotoneOperator

    def __post_init__(self):
        object.__setattr__(self, "mu", _scalar(self.mu, "mu"))

    @property
    def dim(self):
        return self.operator.dim

    def _resolvent(self, X, alpha):
        mu = self.mu
        return (mu / (mu + alpha)) * X + (alpha / (mu + alpha)) * self.operator._resolvent(X, mu + alpha)

    @property
    def single_valued(self):
        return True

    def _apply(self, X):
        return (X - self.operator._resolvent(X, self.mu)) / self.mu

    def cocoercive_value(self):
        return self.operator.cocoercive_value() + self.mu

    @property
    def accuracy(self):
        return self.operator.accuracy
