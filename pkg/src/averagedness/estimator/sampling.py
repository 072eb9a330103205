"""Seeded sample pairs for the ratio estimators.

Random pairs have standard normal coordinates scaled by 0.1, 1 and 10 in
turn. Structure-aware pairs are added for operators whose extremal ratio
sits on boundaries, kinks or eigendirections.
"""
import numpy as np

from ..operators import functions as F
from ..operators import monotone as M
from ..operators import nonexpansive as N
from ..operators import sets as S

SCALES = (0.1, 1.0, 10.0)
CHUNK = 2048
_SET_PAIRS = 8


def random_pairs(dim, n, seed):
    """``(X, Y)``, each of shape ``(n, dim)``."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, 2, dim))
    s = np.asarray(SCALES)[np.arange(n) % len(SCALES)]
    g *= s[:, None, None]
    return g[:, 0, :].copy(), g[:, 1, :].copy()


def _set_pairs(C, rng, scale=1.0):
    """Pairs ``(P_C z, z)``, pairs inside ``C`` and boundary/normal pairs for halfspaces."""
    n = C.dim
    out = []
    for s in SCALES:
        z1 = s * rng.standard_normal((_SET_PAIRS, n))
        z2 = s * rng.standard_normal((_SET_PAIRS, n))
        p1, p2 = C._project(z1), C._project(z2)
        out += [(scale * p1, scale * z1), (scale * p1, scale * p2)]
    if isinstance(C, S.Halfspace):
        b = C.boundary_point()
        u = C.normal / np.linalg.norm(C.normal)
        out.append((scale * b[None, :], scale * (b - u)[None, :]))
    if isinstance(C, S.HalfspaceIntersection):
        for h in C.halfspaces:
            out.extend(_set_pairs(h, rng, scale)[-1:])
    return out


def _direction_pairs(m):
    """Eigen- and singular directions of ``m`` paired with the origin."""
    n = m.shape[0]
    dirs = [np.eye(n)]
    w, v = np.linalg.eig(m)
    dirs += [np.real(v), np.imag(v)]
    dirs.append(np.linalg.eigh(0.5 * (m + m.T))[1])
    dirs.append(np.linalg.svd(m)[2].T)
    cols = np.hstack(dirs).T
    nrm = np.linalg.norm(cols, axis=1)
    cols = cols[nrm > 1e-12] / nrm[nrm > 1e-12, None]
    return [(cols, np.zeros_like(cols)), (cols, -cols)]


def _scalar_pairs(g):
    b = np.asarray(g.breakpoints)
    if b.size == 0:
        return [(np.array([[1.0]]), np.array([[0.0]]))]
    xs, ys = [], []
    for bj in b:
        for h in (1e-3, 1e-1, 1.0):
            xs.append(bj - h)
            ys.append(bj + h)
    edges = np.concatenate([[b[0] - 2.0], b, [b[-1] + 2.0]])
    for lo, hi in zip(edges[:-1], edges[1:]):
        width = hi - lo
        xs.append(lo + 0.25 * width)
        ys.append(lo + 0.75 * width)
    return [(np.array(xs)[:, None], np.array(ys)[:, None])]


def _function_pairs(f, rng, t=1.0):
    if isinstance(f, F.Indicator):
        return _set_pairs(f.set, rng)
    if isinstance(f, F.HalfDistanceSquared):
        return _set_pairs(f.set, rng)
    if isinstance(f, F.Support):
        return _set_pairs(f.set, rng, scale=t * f.scale)
    if isinstance(f, F.MoreauEnvelope):
        return _function_pairs(f.inner, rng, f.mu + t * f.scale)
    if isinstance(f, F.ScalarPiecewiseConvex):
        return _scalar_pairs(f.prox_as_piecewise(t))
    if isinstance(f, F.Quadratic):
        return _direction_pairs(np.linalg.inv(np.eye(f.dim) + t * f.Q))
    return []


def _monotone_pairs(A, rng, alpha):
    if isinstance(A, M.Subdifferential):
        return _function_pairs(A.function, rng, alpha)
    if isinstance(A, M.NormalCone):
        return _set_pairs(A.set, rng)
    if isinstance(A, M.Scaled):
        return _monotone_pairs(A.operator, rng, alpha * A.beta)
    if isinstance(A, M.Yosida):
        return _monotone_pairs(A.operator, rng, A.mu + alpha)
    if isinstance(A, M.LinearMonotone):
        return _direction_pairs(A.resolvent_matrix(alpha))
    return []


def structured_pairs(T, seed):
    """Adversarial pairs for ``T`` as ``(X, Y)`` arrays (possibly empty)."""
    rng = np.random.default_rng([int(seed), 1])
    pairs = _collect(T, rng)
    dim = T.dim
    pairs = [(x, y) for x, y in pairs if x.shape[1] == dim] if dim is not None else pairs
    if not pairs:
        return None
    return np.vstack([p[0] for p in pairs]), np.vstack([p[1] for p in pairs])


def _collect(T, rng):
    out = []
    form = T.affine_form()
    if form is not None:
        m, b = form
        out += _direction_pairs(m)
    if isinstance(T, (N.Projection, N.Reflector)):
        out += _set_pairs(T.set, rng)
    elif isinstance(T, N.Prox):
        out += _function_pairs(T.function, rng)
    elif isinstance(T, (N.Resolvent, N.ReflectedResolvent)):
        out += _monotone_pairs(T.operator, rng, T.alpha)
    elif isinstance(T, N.DouglasRachford):
        out += _set_pairs(T.first, rng) + _set_pairs(T.second, rng)
    elif isinstance(T, N.ScalarPiecewise):
        out += _scalar_pairs(T)
    for child in T.children:
        out += _collect(child, rng)
    return out


def chunks(n, size=CHUNK):
    return [(i, min(i + size, n)) for i in range(0, n, size)]
