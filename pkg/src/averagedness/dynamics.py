"""Orbits of averaged operators and their limiting operator.

The limiting operator maps ``x`` to the limit of ``T^n x``. Iteration stops
once ``||T x - x|| <= tol``; the terminal iterate stands in for the limit.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import FixSetMismatch, NonConvergence
from .operators import nonexpansive as N

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1_000_000
FIX_SET_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Orbit:
    points: List[np.ndarray]
    converged: bool
    residual: float
    iterations: int

    @property
    def terminal(self):
        return self.points[-1]

    def to_dict(self):
        return {"points": [[float(t) for t in p] for p in self.points], "converged": self.converged,
                "residual": self.residual, "iterations": self.iterations}


def orbit(T, x0, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER) -> Orbit:
    """Iterate ``x_{n+1} = T x_n`` until ``||T x_n - x_n|| <= tol`` or ``max_iter`` steps.

    Non-convergence is reported through ``converged=False``; it is not raised.

    Examples
    --------
    >>> from averagedness.operators import Projection, Ball
    >>> orb = orbit(Projection(Ball([0.0, 0.0], 1.0)), [2.0, 0.0])
    >>> orb.iterations, orb.terminal.tolist()
    (1, [1.0, 0.0])
    """
    x = N.check_input(T, x0)
    points = [x]
    for it in range(max_iter + 1):
        tx = T(x)
        r = float(np.linalg.norm(tx - x))
        if r <= tol:
            return Orbit(points, True, r, it)
        if it == max_iter:
            return Orbit(points, False, r, it)
        points.append(tx)
        x = tx
    raise AssertionError("unreachable")


def limiting_apply(T, x, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """``T_inf x``; raises :class:`NonConvergence` when ``max_iter`` is hit."""
    orb = orbit(T, x, tol, max_iter)
    if not orb.converged:
        raise NonConvergence(f"orbit did not reach tolerance {tol:g} in {max_iter} steps")
    return orb.terminal


def _points(dim, n, seed):
    rng = np.random.default_rng(seed)
    scales = np.array([0.1, 1.0, 10.0])[np.arange(n) % 3]
    return rng.standard_normal((n, dim)) * scales[:, None]


@dataclass(frozen=True, eq=False)
class LimitPropertiesReport:
    range_residual: float
    idempotence_residual: float
    passed: bool
    points: int
    witness: Optional[np.ndarray] = None

    def to_dict(self):
        return {"range_residual": self.range_residual, "idempotence_residual": self.idempotence_residual,
                "passed": self.passed, "points": self.points,
                "witness": None if self.witness is None else [float(t) for t in self.witness]}


def limiting_properties_check(T, n=100, seed=0, tol=1e-6, iter_tol=DEFAULT_TOL,
                              max_iter=DEFAULT_MAX_ITER, dim=None) -> LimitPropertiesReport:
    """Check that ``T_inf`` maps into ``Fix T`` and is idempotent at ``n`` seeded points."""
    d = T.dim if T.dim is not None else dim
    limit = N.LimitOperator(T, iter_tol, max_iter)
    X = _points(d, n, seed)
    L = limit._apply(X)
    range_res = np.linalg.norm(T._apply(L) - L, axis=1)
    idem_res = np.linalg.norm(limit._apply(L) - L, axis=1)
    worst = np.maximum(range_res, idem_res)
    i = int(np.argmax(worst))
    passed = bool(worst[i] <= tol)
    return LimitPropertiesReport(float(range_res.max()), float(idem_res.max()), passed, n,
                                 None if passed else X[i].copy())


@dataclass(frozen=True, eq=False)
class LimitVerdict:
    verdict: str
    max_gap: float
    points: int
    witness: dict = field(default_factory=dict)
    modulus_estimate: Optional[float] = None

    def to_dict(self):
        return {"verdict": self.verdict, "max_gap": self.max_gap, "points": self.points,
                "witness": dict(self.witness), "modulus_estimate": self.modulus_estimate}


class _Tabulated(N.Operator):
    """``T_inf`` restricted to points where it has already been computed."""

    def __init__(self, X, L, accuracy):
        self._index = {x.tobytes(): i for i, x in enumerate(X)}
        self._L = L
        self._accuracy = accuracy

    @property
    def dim(self):
        return self._L.shape[1]

    @property
    def accuracy(self):
        return self._accuracy

    def _apply(self, Z):
        return self._L[[self._index[z.tobytes()] for z in np.ascontiguousarray(Z)]]


def _corroborate(X, L, accuracy, samples, seed):
    """Sampled lower bound for ``k(T_inf)`` over pairs of already-iterated points."""
    from .estimator.values import estimate_modulus

    rng = np.random.default_rng([seed, 3])
    i = rng.integers(0, X.shape[0], samples)
    j = (i + rng.integers(1, X.shape[0], samples)) % X.shape[0]
    return estimate_modulus(_Tabulated(X, L, accuracy), pairs=(X[i], X[j]), seed=seed).value


def _validate_fix_set(T, fix_set, L, X):
    """Sampled limits lie in ``fix_set`` and projections onto it are fixed by ``T``."""
    scale = 1.0 + np.linalg.norm(L, axis=1)
    outside = fix_set.distance(L) > FIX_SET_TOL * scale
    if np.any(outside):
        i = int(np.flatnonzero(outside)[0])
        raise FixSetMismatch(f"the fixed point {L[i].tolist()} is not in the supplied fix set")
    P = fix_set.project(X)
    moved = np.linalg.norm(T._apply(P) - P, axis=1) > FIX_SET_TOL * (1.0 + np.linalg.norm(P, axis=1))
    if np.any(moved):
        i = int(np.flatnonzero(moved)[0])
        raise FixSetMismatch(f"the point {P[i].tolist()} of the supplied fix set is not fixed")


def classify_limit(T, fix_set, n=100, seed=0, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER,
                   extra_points=None, estimate_samples=1000, iter_tol=None) -> LimitVerdict:
    """Decide whether ``T_inf`` is the projection onto ``Fix T``.

    Parameters
    ----------
    T : Operator
    fix_set : ConvexSet
        Exact description of ``Fix T``; validated against sampled limits.
    extra_points : array_like, optional
        Points tried before the seeded sample (e.g. a known witness).
    estimate_samples : int
        Number of pairs of sampled points used for the corroborating
        modulus estimate of ``T_inf`` (0 disables it).
    iter_tol : float, optional
        Residual tolerance of the orbits; defaults to ``tol / 100`` so that
        slow linear convergence does not masquerade as a gap.

    Returns
    -------
    LimitVerdict
        ``not_projection`` needs a point with ``||T_inf x - P x|| > 10 tol``.
    """
    d = T.dim if T.dim is not None else fix_set.dim
    X = _points(d, n, seed)
    if extra_points is not None:
        X = np.vstack([np.atleast_2d(np.asarray(extra_points, dtype=float)), X])
    limit = N.LimitOperator(T, tol / 100.0 if iter_tol is None else iter_tol, max_iter)
    L = limit._apply(X)
    _validate_fix_set(T, fix_set, L, X)
    if fix_set.is_whole_space:
        return LimitVerdict("projection", 0.0, X.shape[0], {"reason": "Fix T is the whole space"})
    P = fix_set.project(X)
    gaps = np.linalg.norm(L - P, axis=1)
    far = np.flatnonzero(gaps > 10.0 * tol)
    verdict = "not_projection" if far.size else "projection"
    witness = {}
    if far.size:
        i = int(far[0])
        witness = {
            "x": X[i].tolist(), "limit": L[i].tolist(), "projection": P[i].tolist(),
            "distance_to_limit": float(np.linalg.norm(X[i] - L[i])),
            "distance_to_fix_set": float(np.linalg.norm(X[i] - P[i])),
        }
    est = None
    if estimate_samples and X.shape[0] > 1:
        est = _corroborate(X, L, limit.accuracy, estimate_samples, seed)
    return LimitVerdict(verdict, float(gaps.max()), X.shape[0], witness, est)
