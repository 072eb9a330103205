"""Exact modulus algorithms for matrices, scalar piecewise maps and subspace pairs."""
from dataclasses import dataclass, field

import numpy as np

from .. import _linalg
from ..errors import DegeneratePair, DimensionMismatch, NotNonexpansive
from ..operators.nonexpansive import ScalarPiecewise
from ..operators.sets import LinearSubspace

BISECTION_TOL = 1e-12
PSD_FLOOR = -1e-11


def _modulus_form(m):
    """``(A, B)`` with ``G(k) = A + k B`` the quadratic form of the averagedness test."""
    n = m.shape[0]
    s = _linalg.sym(m)
    a = 2.0 * s - m.T @ m - np.eye(n)
    b = 2.0 * (np.eye(n) - s)
    return a, b


def matrix_modulus(m, tol=BISECTION_TOL):
    """Modulus of averagedness of a nonexpansive matrix.

    Smallest ``k`` in [0, 1] such that
    ``2(1-k) sym(M) - M^T M - (1-2k) I`` is positive semidefinite, found by
    bisection. The smallest eigenvalue of this form is nondecreasing in ``k``
    because ``sym(M) <= I`` for a nonexpansive ``M``.

    Parameters
    ----------
    m : array_like, shape (n, n)
    tol : float
        Width of the final bisection bracket.

    Returns
    -------
    float
        Upper end of the final bracket, so the returned ``k`` is feasible.

    Raises
    ------
    NotNonexpansive
        If the spectral norm exceeds ``1 + 1e-9``.
    """
    m = _linalg.as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch("matrix must be square")
    if _linalg.certified_norm(m) > 1 + _linalg.NONEXPANSIVE_SLACK:
        raise NotNonexpansive("matrix is not nonexpansive")
    a, b = _modulus_form(m)
    # relative to the form itself so that near-identity matrices keep full
    # accuracy; the second term is the rounding level of forming a and b
    scale = max(float(np.abs(a).max()), float(np.abs(b).max())) + 16 * _linalg.EPS * max(1.0, float(np.abs(m).max()) ** 2)

    def feasible(k):
        return float(np.linalg.eigvalsh(a + k * b)[0]) >= PSD_FLOOR * scale

    if feasible(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def is_orthogonal(m, tol=1e-12):
    m = np.asarray(m, dtype=float)
    return bool(np.allclose(m.T @ m, np.eye(m.shape[0]), atol=tol, rtol=0))


def scalar_modulus(g: ScalarPiecewise) -> float:
    """``(1 - min slope) / 2`` for a continuous piecewise-affine map on R.

    The limiting subdifferential of such a map is made of piece slopes and
    the intervals between neighbouring slopes, so its infimum is a slope.
    """
    slopes = np.asarray(g.slopes, dtype=float)
    if np.any(np.abs(slopes) > 1.0):
        raise NotNonexpansive("every piece slope must lie in [-1, 1]")
    return (1.0 - float(slopes.min())) / 2.0


def _deflate(basis, w):
    if w.shape[1] == 0:
        return basis
    return _linalg.orthonormal_columns(basis - w @ (w.T @ basis))


def friedrichs_cosine(u: LinearSubspace, v: LinearSubspace, cutoff=1e-10) -> float:
    """Cosine of the Friedrichs angle between two subspaces.

    A basis of the intersection comes from the null space of ``[U, -V]``;
    both bases are deflated against it and the cosine is the largest
    singular value of the remaining cross-Gram matrix (0 when either side
    becomes trivial).
    """
    if u.dim != v.dim:
        raise DimensionMismatch("subspaces live in different dimensions")
    ub, vb = u.basis, v.basis
    if ub.shape[1] == 0 or vb.shape[1] == 0:
        return 0.0
    coeff = _linalg.null_space(np.hstack([ub, -vb]), cutoff)
    w = _linalg.orthonormal_columns(ub @ coeff[: ub.shape[1]], cutoff) if coeff.shape[1] else np.zeros((u.dim, 0))
    ud, vd = _deflate(ub, w), _deflate(vb, w)
    if ud.shape[1] == 0 or vd.shape[1] == 0:
        return 0.0
    s = np.linalg.svd(ud.T @ vd, compute_uv=False)
    return float(np.clip(s[0], 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class SubspacePair:
    """Two linear subspaces of a common space with their Friedrichs cosine."""

    U: LinearSubspace
    V: LinearSubspace
    friedrichs_cosine: float = field(init=False)

    def __post_init__(self):
        if self.U.dim != self.V.dim:
            raise DimensionMismatch("subspaces live in different dimensions")
        object.__setattr__(self, "friedrichs_cosine", friedrichs_cosine(self.U, self.V))


def two_subspace_modulus(pair: SubspacePair) -> float:
    """Modulus of ``P_V P_U``: ``(1 + c_F) / (2 + c_F)``.

    Raises
    ------
    DegeneratePair
        If ``U = V`` (then ``P_V P_U = P_U``).
    """
    if pair.U.same_as(pair.V):
        raise DegeneratePair("U and V coincide; the composition is a single projection")
    c = pair.friedrichs_cosine
    return (1.0 + c) / (2.0 + c)
