"""Sampled one-sided bounds for the modulus and the cocoercive, monotone and Lipschitz values.

Every ratio is evaluated in a rounding-aware way: with ``err`` a bound on
the evaluation error of ``e = Bx - By``, each pair contributes a value that
is on the safe side of the exact ratio. The modulus estimate is therefore
a lower bound of ``k(T)`` up to the declared operator accuracy.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .. import _linalg
from ..errors import AllPairsDegenerate, DegenerateOperator, DimensionMismatch, ValidationError
from ..operators import nonexpansive as N
from ..operators.monotone import MonotoneOperator
from .sampling import chunks, random_pairs, structured_pairs

DELTA = 1e-12
REFINE_SHRINK = 0.7

QUANTITIES = ("modulus", "cocoercive_value", "monotone_value", "lipschitz_value")
DIRECTIONS = {
    "modulus": "lower_bound",
    "lipschitz_value": "lower_bound",
    "cocoercive_value": "upper_bound",
    "monotone_value": "upper_bound",
}


@dataclass(frozen=True, eq=False)
class ValueEstimate:
    quantity: str
    direction: str
    value: float
    witness: Optional[Tuple[np.ndarray, np.ndarray]]
    samples_used: int
    seed: Optional[int]
    skipped: int = 0
    refine_steps: int = 0

    def to_dict(self):
        w = None if self.witness is None else [list(map(float, self.witness[0])), list(map(float, self.witness[1]))]
        return {"quantity": self.quantity, "direction": self.direction, "value": self.value,
                "witness": w, "samples_used": self.samples_used, "seed": self.seed,
                "skipped": self.skipped, "refine_steps": self.refine_steps}


@dataclass(frozen=True, eq=False)
class Complement(N.Operator):
    """``Id - T`` (not nonexpansive in general; used as a ratio operand)."""

    inner: N.Operator

    @property
    def dim(self):
        return self.inner.dim

    def _apply(self, X):
        return X - self.inner._apply(X)

    @property
    def children(self):
        return (self.inner,)

    @property
    def accuracy(self):
        return self.inner.accuracy + _linalg.EPS


class _MonotoneOperand:
    """Adapter evaluating a single-valued monotone operator on batches."""

    def __init__(self, A):
        if not A.single_valued:
            raise ValidationError(f"{type(A).__name__} is not single-valued")
        self.A = A
        self.dim = A.dim
        self.accuracy = A.accuracy

    def _apply(self, X):
        return self.A._apply(X)


def _operand(obj):
    return _MonotoneOperand(obj) if isinstance(obj, MonotoneOperator) else obj


def _operand_scale(op):
    form = op.affine_form() if isinstance(op, N.Operator) else None
    if isinstance(op, _MonotoneOperand) and hasattr(op.A, "M"):
        return max(1.0, float(np.abs(op.A.M).sum(axis=1).max()))
    if form is not None:
        return max(1.0, float(np.abs(form[0]).sum(axis=1).max()))
    return 1.0


def _resolve_dim(op, dim, pairs=None):
    if dim is None and pairs is not None:
        dim = np.shape(pairs[0])[-1]
    d = op.dim if op.dim is not None else dim
    if d is None:
        raise DimensionMismatch("dimension required for a dimension-free operator")
    if op.dim is not None and dim is not None and op.dim != dim:
        raise DimensionMismatch(f"operator acts on R^{op.dim}, requested {dim}")
    return int(d)


# Per-pair ratio kernels. Each returns (values, valid) for a chunk; invalid
# pairs are degenerate and skipped.


def _stats(op, X, Y, complement):
    TX, TY = op._apply(X), op._apply(Y)
    D = X - Y
    E = (X - TX) - (Y - TY) if complement else TX - TY
    nx, ny = np.linalg.norm(X, axis=1), np.linalg.norm(Y, axis=1)
    err = (op.accuracy * _operand_scale(op) + 4 * _linalg.EPS) * (2.0 + nx + ny)
    if complement:
        err = err + 2 * _linalg.EPS * (nx + ny)
    return D, E, err


def _modulus_kernel(op, X, Y):
    D, E, err = _stats(op, X, Y, True)
    nd, ne = np.linalg.norm(D, axis=1), np.linalg.norm(E, axis=1)
    ip = np.einsum("ij,ij->i", D, E)
    live = ne > 2.0 * err
    negative = live & (ip + nd * err <= 0.0)
    regular = live & ~negative & (ip > DELTA * ne * nd)
    q = np.full(X.shape[0], -np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        q_reg = (ne - err) ** 2 / (2.0 * (ip + nd * err))
    q[regular] = np.minimum(q_reg[regular], 1.0)
    q[negative] = 1.0
    return q, regular | negative


def _cocoercive_kernel(op, X, Y, complement=False):
    D, E, err = _stats(op, X, Y, complement)
    nd, ne = np.linalg.norm(D, axis=1), np.linalg.norm(E, axis=1)
    ip = np.einsum("ij,ij->i", D, E)
    live = ne > 2.0 * err
    negative = live & (ip + nd * err <= 0.0)
    regular = live & ~negative & (ip > DELTA * ne * nd)
    r = np.full(X.shape[0], np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        r_reg = 2.0 * (ip + nd * err) / (2.0 * (ne - err) ** 2)
    # Id - T is 1/2-cocoercive for nonexpansive T; keeps 1/(2r) equal to the modulus ratio
    r[regular] = np.maximum(r_reg[regular], 0.5) if complement else r_reg[regular]
    r[negative] = 0.5 if complement else 0.0
    return r, regular | negative


def _monotone_kernel(op, X, Y):
    D, E, err = _stats(op, X, Y, False)
    nd = np.linalg.norm(D, axis=1)
    ip = np.einsum("ij,ij->i", D, E)
    valid = nd > DELTA * (1.0 + np.linalg.norm(X, axis=1) + np.linalg.norm(Y, axis=1))
    r = np.full(X.shape[0], np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        r[valid] = (ip[valid] + nd[valid] * err[valid]) / nd[valid] ** 2
    return r, valid


def _lipschitz_kernel(op, X, Y):
    D, E, err = _stats(op, X, Y, False)
    nd, ne = np.linalg.norm(D, axis=1), np.linalg.norm(E, axis=1)
    valid = nd > DELTA * (1.0 + np.linalg.norm(X, axis=1) + np.linalg.norm(Y, axis=1))
    r = np.full(X.shape[0], -np.inf)
    r[valid] = np.maximum(ne[valid] - err[valid], 0.0) / nd[valid]
    return r, valid


def _evaluate(kernel, X, Y, workers=1):
    """Evaluate ``kernel`` on fixed-size chunks; results do not depend on ``workers``."""
    spans = chunks(X.shape[0])

    def run(span):
        a, b = span
        return kernel(X[a:b], Y[a:b])

    if workers and workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, spans))
    else:
        parts = [run(s) for s in spans]
    vals = np.concatenate([p[0] for p in parts])
    valid = np.concatenate([p[1] for p in parts])
    return vals, valid


def _sample(op, n, seed, dim, structured=True):
    X, Y = random_pairs(dim, n, seed)
    if structured and isinstance(op, N.Operator):
        extra = structured_pairs(op, seed)
        if extra is not None and extra[0].shape[1] == dim:
            X, Y = np.vstack([extra[0], X]), np.vstack([extra[1], Y])
    return X, Y


def _strip_shifts(T):
    """Drop shifts at either end of a composition; the modulus is unchanged."""
    while isinstance(T, N.Compose):
        ops = list(T.operators)
        while len(ops) > 1 and isinstance(ops[0], N.Shift):
            ops.pop(0)
        while len(ops) > 1 and isinstance(ops[-1], N.Shift):
            ops.pop()
        if len(ops) == 1:
            T = ops[0]
        else:
            return N.Compose(tuple(ops)) if len(ops) != len(T.operators) else T
    return T


def _refine(kernel, x, y, best, steps, maximize=True):
    """Coordinate-wise pattern search around the witness ``(x, y)``."""
    z = np.concatenate([x, y])
    n = x.shape[0]
    step = 0.1 * max(np.linalg.norm(x - y), 1e-3)
    sign = 1.0 if maximize else -1.0
    for _ in range(steps):
        cand = np.repeat(z[None, :], 2 * z.size, axis=0)
        idx = np.arange(z.size)
        cand[2 * idx, idx] += step
        cand[2 * idx + 1, idx] -= step
        vals, valid = kernel(cand[:, :n], cand[:, n:])
        vals = np.where(valid, vals, -np.inf if maximize else np.inf)
        j = int(np.argmax(sign * vals))
        if sign * vals[j] > sign * best:
            best, z = float(vals[j]), cand[j]
        else:
            step *= REFINE_SHRINK
    return best, z[:n].copy(), z[n:].copy()


def _reduce(vals, valid, maximize):
    if not np.any(valid):
        return None
    masked = np.where(valid, vals, -np.inf if maximize else np.inf)
    i = int(np.argmax(masked) if maximize else np.argmin(masked))
    return i


def estimate_modulus(T, n=10_000, seed=0, refine_steps=0, dim=None, pairs=None,
                     workers=1, strict=False) -> ValueEstimate:
    """Sampled lower bound for the modulus of averagedness of ``T``.

    With ``B = Id - T`` each pair contributes
    ``||Bx - By||^2 / (2 <x - y, Bx - By>)``, and 1 when the denominator
    is certifiably nonpositive while ``Bx != By``.

    Parameters
    ----------
    T : Operator
    n : int
        Number of random pairs (structure-aware pairs are added on top).
    seed : int
    refine_steps : int
        Pattern-search steps around the best pair.
    dim : int, optional
        Required only for dimension-free operators such as ``Identity()``.
    pairs : tuple of arrays, optional
        Explicit ``(X, Y)`` sample; replaces the seeded sample.
    workers : int
        Threads used for chunked evaluation; does not affect the result.
    strict : bool
        Raise :class:`DegenerateOperator` instead of returning 0 when every
        pair has ``Bx = By``.
    """
    if n < 1 and pairs is None:
        raise ValidationError("need at least one sample")
    op = _strip_shifts(T)
    d = _resolve_dim(op, dim if dim is not None else T.dim, pairs)
    X, Y = (np.asarray(pairs[0], float), np.asarray(pairs[1], float)) if pairs is not None else _sample(op, n, seed, d)

    def kernel(a, b):
        return _modulus_kernel(op, a, b)

    vals, valid = _evaluate(kernel, X, Y, workers)
    i = _reduce(vals, valid, True)
    if i is None:
        if strict:
            raise DegenerateOperator("Id - T is constant on every sampled pair")
        return ValueEstimate("modulus", "lower_bound", 0.0, None, X.shape[0], seed, X.shape[0])
    best, x, y = float(vals[i]), X[i].copy(), Y[i].copy()
    if refine_steps and best < 1.0:
        best, x, y = _refine(kernel, x, y, best, refine_steps)
    return ValueEstimate("modulus", "lower_bound", best, (x, y), X.shape[0], seed,
                         int(np.sum(~valid)), refine_steps)


def estimate_value(kind, operand, n=10_000, seed=0, dim=None, pairs=None, workers=1,
                   complement=False) -> ValueEstimate:
    """Sampled bound for a cocoercive, monotone or Lipschitz value.

    ``operand`` is a nonexpansive :class:`Operator`, a single-valued
    :class:`MonotoneOperator`, or any object with ``dim``, ``accuracy`` and a
    batched ``_apply``. With ``complement=True`` the operand is ``Id - T``.
    """
    if kind not in DIRECTIONS or kind == "modulus":
        raise ValidationError(f"unknown value kind {kind!r}")
    op = _operand(operand)
    if complement:
        if kind != "cocoercive_value":
            op = Complement(op)
            complement = False
    d = _resolve_dim(op, dim, pairs)
    if pairs is not None:
        X, Y = np.asarray(pairs[0], float), np.asarray(pairs[1], float)
    else:
        X, Y = _sample(op if isinstance(op, N.Operator) else None, n, seed, d)

    if kind == "cocoercive_value":
        def kernel(a, b):
            return _cocoercive_kernel(op, a, b, complement)
    elif kind == "monotone_value":
        def kernel(a, b):
            return _monotone_kernel(op, a, b)
    else:
        def kernel(a, b):
            return _lipschitz_kernel(op, a, b)

    maximize = DIRECTIONS[kind] == "lower_bound"
    vals, valid = _evaluate(kernel, X, Y, workers)
    i = _reduce(vals, valid, maximize)
    if i is None:
        raise AllPairsDegenerate(f"no sampled pair gives a usable {kind} ratio")
    return ValueEstimate(kind, DIRECTIONS[kind], float(vals[i]), (X[i].copy(), Y[i].copy()),
                         X.shape[0], seed, int(np.sum(~valid)))


def modulus_ratio(T, x, y):
    """The certified modulus ratio of a single pair (``nan`` if degenerate)."""
    op = _strip_shifts(T)
    q, valid = _modulus_kernel(op, np.atleast_2d(np.asarray(x, float)), np.atleast_2d(np.asarray(y, float)))
    return float(q[0]) if valid[0] else float("nan")


@dataclass(frozen=True, eq=False)
class Violation:
    x: np.ndarray
    y: np.ndarray
    excess: float
    index: int


def falsify_averaged(T, k_claimed, n=10_000, seed=0, dim=None, pairs=None, workers=1):
    """First sampled pair violating the ``k``-averagedness inequality, or None.

    The inequality is
    ``||Tx-Ty||^2 <= <d, Tx-Ty> + (1-2k)(<d, Tx-Ty> - ||d||^2)`` with
    ``d = x - y``; a pair counts only if it fails by more than
    ``1e-10 * max(1, ||d||^2)`` plus the propagated evaluation error of ``T``.
    """
    k = float(k_claimed)
    if not 0.0 <= k <= 1.0:
        raise ValidationError("claimed modulus must lie in [0, 1]")
    d_ = _resolve_dim(T, dim, pairs)
    if pairs is not None:
        X, Y = np.asarray(pairs[0], float), np.asarray(pairs[1], float)
    else:
        X, Y = _sample(T, n, seed, d_)

    def kernel(a, b):
        D, Delta, err = _stats(T, a, b, False)
        ip = np.einsum("ij,ij->i", D, Delta)
        nd2 = np.einsum("ij,ij->i", D, D)
        lhs = np.einsum("ij,ij->i", Delta, Delta)
        rhs = ip + (1.0 - 2.0 * k) * (ip - nd2)
        excess = lhs - rhs
        # evaluation error in Tx - Ty moves both sides by at most this much
        noise = err * (2.0 * np.sqrt(lhs) + 2.0 * np.sqrt(nd2) + err)
        return excess, excess > 1e-10 * np.maximum(1.0, nd2) + noise

    excess, bad = _evaluate(kernel, X, Y, workers)
    hits = np.flatnonzero(bad)
    if hits.size == 0:
        return None
    i = int(hits[0])
    return Violation(X[i].copy(), Y[i].copy(), float(excess[i]), i)
