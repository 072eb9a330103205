"""Inversion of normally nonexpansive operators and the bi-Lipschitz check."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import MaxIterExceeded, NotNormallyNonexpansive, ValidationError, ViolationFound
from .values import _resolve_dim, _sample, estimate_modulus


@dataclass(frozen=True, eq=False)
class InversionResult:
    x: np.ndarray
    residual: float
    iterations: int
    contraction: float
    certified: bool

    def to_dict(self):
        return {"x": [float(v) for v in self.x], "residual": self.residual,
                "iterations": self.iterations, "contraction": self.contraction,
                "certified": self.certified}


def _modulus_for_inversion(T, k, dim):
    """``(k, certified)``; raises when ``k(T) >= 1/2`` is known."""
    if k is not None:
        k = float(k)
        if k >= 0.5:
            raise NotNormallyNonexpansive(f"supplied modulus {k} is not below 1/2")
        return k, False
    from ..calculus.rules import exact_modulus

    bound = exact_modulus(T)
    if bound.upper < 0.5:
        return bound.upper, True
    if bound.lower >= 0.5:
        raise NotNormallyNonexpansive(f"modulus is at least {bound.lower}")
    est = estimate_modulus(T, n=2000, seed=0, dim=dim)
    if est.value >= 0.5:
        raise NotNormallyNonexpansive(f"sampled modulus lower bound {est.value} is not below 1/2")
    return est.value, False


def invert_by_contraction(T, v, tol=1e-10, max_iter=10_000, k=None) -> InversionResult:
    """Solve ``T x = v`` by the fixed-point iteration ``x <- x - T x + v``.

    The map ``x -> x - T x + v`` is a contraction with constant ``2 k(T)``
    whenever ``k(T) < 1/2``. The iteration starts at ``x = v`` and stops once
    ``||T x - v|| <= tol``.

    Parameters
    ----------
    T : Operator
    v : array_like
    tol : float
    max_iter : int
    k : float, optional
        Known upper bound for ``k(T)``. When omitted, the structural rules
        are tried first and a sampled estimate second.

    Raises
    ------
    NotNormallyNonexpansive
        If ``k(T) >= 1/2`` is known, or the residual grows by a factor 10.
    MaxIterExceeded
        If ``max_iter`` steps do not reach ``tol``.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValidationError("right-hand side must be finite")
    dim = _resolve_dim(T, v.shape[0])
    kk, certified = _modulus_for_inversion(T, k, dim)
    x = v.copy()
    r0 = None
    for it in range(max_iter + 1):
        tx = T(x)
        res = tx - v
        r = float(np.linalg.norm(res))
        if r <= tol:
            return InversionResult(x, r, it, 2.0 * kk, certified)
        if r0 is None:
            r0 = r
        elif r > 10.0 * r0:
            raise NotNormallyNonexpansive("iteration diverges; the operator is not normally nonexpansive")
        x = x - res
    raise MaxIterExceeded(f"no solution to tolerance {tol:g} within {max_iter} iterations")


@dataclass(frozen=True, eq=False)
class BiLipschitzReport:
    lower_factor: float
    min_ratio: float
    max_ratio: float
    witness: Optional[tuple]
    samples: int

    def to_dict(self):
        w = None if self.witness is None else [[float(t) for t in self.witness[0]], [float(t) for t in self.witness[1]]]
        return {"lower_factor": self.lower_factor, "min_ratio": self.min_ratio,
                "max_ratio": self.max_ratio, "witness": w, "samples": self.samples}


def bilipschitz_check(T, k, n=10_000, seed=0, dim=None, slack=1e-10) -> BiLipschitzReport:
    """Check ``(1 - 2k) ||x - y|| <= ||T x - T y|| <= ||x - y||`` on sampled pairs.

    Raises
    ------
    NotNormallyNonexpansive
        If ``k >= 1/2`` (no lower Lipschitz factor follows).
    ViolationFound
        If a pair breaks either inequality; ``k`` is then not an upper bound
        for the modulus of ``T``.
    """
    k = float(k)
    if k >= 0.5:
        raise NotNormallyNonexpansive("the bi-Lipschitz bound needs k < 1/2")
    if k < 0:
        raise ValidationError("k must be nonnegative")
    lower = 2.0 * (0.5 - k)
    d_ = _resolve_dim(T, dim)
    X, Y = _sample(T, n, seed, d_)
    D = np.linalg.norm(X - Y, axis=1)
    E = np.linalg.norm(T._apply(X) - T._apply(Y), axis=1)
    keep = D > 0
    ratio = E[keep] / D[keep]
    Xk, Yk = X[keep], Y[keep]
    low = np.flatnonzero(ratio < lower - slack)
    high = np.flatnonzero(ratio > 1.0 + slack)
    if low.size or high.size:
        i = int(min(low[:1].tolist() + high[:1].tolist()))
        raise ViolationFound(f"pair breaks the bi-Lipschitz bounds (ratio {ratio[i]:.17g})",
                             (Xk[i].copy(), Yk[i].copy()))
    j = int(np.argmin(ratio))
    return BiLipschitzReport(lower, float(ratio[j]), float(ratio.max()), (Xk[j].copy(), Yk[j].copy()),
                             int(keep.sum()))
