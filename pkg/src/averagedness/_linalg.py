"""Small dense linear-algebra helpers shared across modules."""
import numpy as np

EPS = np.finfo(float).eps

# Rejection threshold for nonexpansiveness certificates.
NONEXPANSIVE_SLACK = 1e-9


def as_vector(x, name="x"):
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must have finite entries")
    return v


def as_matrix(m, name="matrix"):
    a = np.asarray(m, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must have finite entries")
    return a


def frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def sym(m):
    return 0.5 * (m + m.T)


def min_eig(m):
    """Smallest eigenvalue of the symmetric part of ``m``."""
    if m.size == 0:
        return np.inf
    return float(np.linalg.eigvalsh(sym(m))[0])


def spectral_norm(m, steps=200, rtol=1e-15):
    """Spectral norm by power iteration on ``m.T @ m``.

    Returns ``(norm, converged)``. The Rayleigh quotient is monitored and the
    iteration stops once its relative change drops below ``rtol``.
    """
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0, True
    gram = m.T @ m
    n = gram.shape[0]
    rng = np.random.default_rng(0)
    v = np.ones(n) / np.sqrt(n) + 1e-3 * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    rq = float(v @ gram @ v)
    for _ in range(steps):
        w = gram @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0, True
        v = w / nw
        rq_new = float(v @ gram @ v)
        if abs(rq_new - rq) <= rtol * max(rq_new, 1.0):
            return float(np.sqrt(max(rq_new, 0.0))), True
        rq = rq_new
    return float(np.sqrt(max(rq, 0.0))), False


def certified_norm(m):
    """Spectral norm, falling back to an SVD when power iteration stalls."""
    norm, converged = spectral_norm(m)
    if not converged:
        norm = float(np.linalg.norm(m, 2))
    return norm


def orthonormal_columns(a, cutoff=1e-10):
    """Orthonormal basis (as columns) for the column space of ``a``."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return np.zeros((a.shape[0], 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    rank = int(np.sum(s > cutoff * max(1.0, s[0])))
    return u[:, :rank]


def null_space(a, cutoff=1e-10):
    a = np.asarray(a, dtype=float)
    if a.shape[0] == 0:
        return np.eye(a.shape[1])
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    rank = int(np.sum(s > cutoff * max(1.0, s[0] if s.size else 0.0)))
    return vt[rank:].T


def linear_cocoercive_value(m, tol=1e-12, psd_floor=-1e-11):
    """Best cocoercivity constant of the linear map ``m``.

    Largest ``c`` with ``sym(m) - c m^T m`` positive semidefinite, found by
    bisection on ``[0, 1/sigma_max]``. Returns ``inf`` for the zero map.
    """
    m = np.asarray(m, dtype=float)
    smax = float(np.linalg.norm(m, 2)) if m.size else 0.0
    if smax == 0.0:
        return np.inf
    s = sym(m)
    mtm = m.T @ m
    scale = max(1.0, float(np.abs(s).max()))

    def feasible(c):
        return min_eig(s - c * mtm) >= psd_floor * scale

    if not feasible(0.0):
        raise ValueError("matrix is not monotone")
    lo, hi = 0.0, 1.0 / smax
    if feasible(hi):
        return hi
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo
