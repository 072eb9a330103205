"""Named worked instances and a reference catalog with hand-derived moduli."""
from dataclasses import dataclass

import numpy as np

from .operators import functions as F
from .operators import monotone as M
from .operators import nonexpansive as N
from .operators import sets as S


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def line(theta):
    """The line through the origin at angle ``theta`` in R^2."""
    return S.LinearSubspace.span([[np.cos(theta), np.sin(theta)]])


def kinked_scalar_map():
    """Slopes 0, 1, -1/2 with kinks at 0 and 1; fixes [0, 1]."""
    return N.ScalarPiecewise([0.0, 1.0], [0.0, 1.0, -0.5], [0.0, 0.0, 1.5])


def kinked_scalar_limit():
    """Limiting map of :func:`kinked_scalar_map`: flattens to 0 beyond 3."""
    return N.ScalarPiecewise([0.0, 1.0, 3.0], [0.0, 1.0, -0.5, 0.0], [0.0, 0.0, 1.5, 0.0])


def firm_scalar_map():
    """``(Id + P_[0,1]) / 2`` as a piecewise-affine map; fixes [0, 1]."""
    return N.ScalarPiecewise([0.0, 1.0], [0.5, 1.0, 0.5], [0.0, 0.0, 0.5])


def unit_interval():
    return S.Box([0.0], [1.0])


def log_tail_surrogate(radius=1e3, knots_per_decade=40):
    """Piecewise-affine interpolant of the odd map ``x/e`` on ``[-e, e]``, ``ln x`` beyond.

    The logarithmic tails are interpolated on a geometric grid up to
    ``radius`` and continued with the tangent slope ``1/radius``, so the
    smallest slope is exactly ``1/radius``.
    """
    e = np.e
    decades = np.log10(radius / e)
    m = max(2, int(np.ceil(knots_per_decade * decades)) + 1)
    pos = np.geomspace(e, radius, m)
    pos[0], pos[-1] = e, radius
    knots = np.concatenate([-pos[::-1], pos])
    vals = np.where(knots > 0, np.log(np.abs(knots)), -np.log(np.abs(knots)))
    vals[m - 1], vals[m] = -1.0, 1.0
    secants = np.diff(vals) / np.diff(knots)
    slopes = np.concatenate([[1.0 / radius], secants, [1.0 / radius]])
    # piece 0 is left of knots[0]; intercepts follow from the knot values
    intercepts = np.empty_like(slopes)
    intercepts[0] = vals[0] - slopes[0] * knots[0]
    intercepts[1:-1] = vals[:-1] - secants * knots[:-1]
    intercepts[-1] = vals[-1] - slopes[-1] * knots[-1]
    return N.ScalarPiecewise(knots, slopes, intercepts)


def dr_line():
    return S.LinearSubspace.span([[1.0, 1.0]])


def dr_slab(tol=1e-10):
    """``{(x, y) : -y <= x <= 2}`` as an intersection of two halfspaces."""
    return S.HalfspaceIntersection((S.Halfspace([1.0, 1.0], 0.0), S.Halfspace([-1.0, 0.0], -2.0)), tol=tol)


def dr_slab_closed_form(z):
    """Closed-form projection onto :func:`dr_slab` (test oracle)."""
    Z = np.atleast_2d(np.asarray(z, dtype=float))
    x, y = Z[:, 0], Z[:, 1]
    out = Z.copy()
    right = (x >= 2) & (y >= -2)
    corner = y <= np.minimum(x - 4, -2)
    edge = (x - 4 < y) & (y <= -x)
    out[right] = np.column_stack([np.full(right.sum(), 2.0), y[right]])
    out[corner] = [2.0, -2.0]
    h = (x[edge] - y[edge]) / 2
    out[edge] = np.column_stack([h, -h])
    return out[0] if np.ndim(z) == 1 else out


def dr_line_slab():
    """Douglas-Rachford operator of the line R(1, 1) and the slab."""
    return N.DouglasRachford(dr_line(), dr_slab())


def dr_fix_segment(tol=1e-13):
    """``{s (1, 1) : s in [0, 2]}``, the fixed point set of :func:`dr_line_slab`."""
    return S.HalfspaceIntersection((
        S.Halfspace([1.0, -1.0], 0.0), S.Halfspace([-1.0, 1.0], 0.0),
        S.Halfspace([1.0, 0.0], 0.0), S.Halfspace([-1.0, 0.0], -2.0),
    ), tol=tol)


def product_subspaces(theta):
    """Subspaces of R^4 whose Friedrichs angle is ``theta``.

    ``U = R^2 x {0}`` and ``V`` is the graph of ``tan(theta)`` times the
    identity on R^2, so every principal angle equals ``theta``.
    """
    t = np.tan(theta)
    u = S.LinearSubspace.span([[1, 0, 0, 0], [0, 1, 0, 0]])
    v = S.LinearSubspace.span([[1, 0, t, 0], [0, 1, 0, t]])
    return u, v


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    operator: N.Operator
    modulus: float
    family: str


def standard_catalog():
    """Operators with moduli derived by hand, independently of the rule engine."""
    ball = S.Ball(np.zeros(2), 1.0)
    half = S.Halfspace([1.0, 1.0], 0.0)
    box = S.Box([-1.0, -1.0], [1.0, 1.0])
    skew = np.array([[0.0, -1.0], [1.0, 0.0]])
    lam = 0.3
    theta = np.pi / 3
    entries = [
        ("identity", N.Identity(2), 0.0, "affine"),
        ("shift", N.Shift([1.0, -2.0]), 0.0, "affine"),
        ("constant", N.Constant([1.0, 2.0]), 0.5, "affine"),
        ("diag_1_minus_half", N.LinearMatrix(np.diag([1.0, -0.5])), 0.75, "matrix"),
        ("rotation_quarter_pi", N.LinearMatrix(rotation(np.pi / 4)), 1.0, "matrix"),
        ("diag_half_fifth", N.LinearMatrix(np.diag([0.5, 0.2])), 0.4, "matrix"),
        ("affine_diag", N.Affine(np.diag([1.0, -0.5]), [3.0, -1.0]), 0.75, "matrix"),
        ("projection_halfspace", N.Projection(half), 0.5, "set"),
        ("projection_ball", N.Projection(ball), 0.5, "set"),
        ("projection_box", N.Projection(box), 0.5, "set"),
        ("reflector_ball", N.Reflector(ball), 1.0, "set"),
        ("relaxed_reflector", N.Relaxation(lam, N.Reflector(half)), lam, "set"),
        ("prox_huber", N.Prox(F.Huber(1.0, 2.0)), 2.0 / (2.0 * 3.0), "prox"),
        ("prox_half_distance_squared", N.Prox(F.HalfDistanceSquared(ball, 1.0)), 0.25, "prox"),
        ("prox_support_box", N.Prox(F.Support(box, 1.0)), 0.5, "prox"),
        ("prox_support_singleton", N.Prox(F.Support(S.Singleton([1.0, -1.0]), 2.0)), 0.0, "prox"),
        ("prox_quadratic", N.Prox(F.Quadratic(np.diag([3.0, 1.0]))), 3.0 / 8.0, "prox"),
        ("prox_envelope_indicator", N.Prox(F.MoreauEnvelope(F.Indicator(ball), 1.0, 1.0)), 0.25, "prox"),
        ("resolvent_yosida_normal_cone", N.Resolvent(M.Yosida(1.0, M.NormalCone(ball))), 0.25, "resolvent"),
        ("resolvent_skew", N.Resolvent(M.LinearMonotone(skew)), 0.5, "resolvent"),
        ("reflected_resolvent_diag", N.ReflectedResolvent(M.LinearMonotone(np.diag([2.0, 1.0]))), 2.0 / 3.0,
         "resolvent"),
        ("douglas_rachford_lines", N.DouglasRachford(line(0.0), line(np.pi / 5)), 0.5, "subspace"),
        ("two_subspace_lines", N.Compose((N.Projection(line(theta)), N.Projection(line(0.0)))),
         (1 + np.cos(theta)) / (2 + np.cos(theta)), "subspace"),
        ("kinked_scalar", kinked_scalar_map(), 0.75, "scalar"),
        ("kinked_scalar_limit", kinked_scalar_limit(), 0.75, "scalar"),
        ("firm_scalar", firm_scalar_map(), 0.25, "scalar"),
        ("log_tail_surrogate", log_tail_surrogate(), (1 - 1e-3) / 2, "scalar"),
        ("limit_of_averaged_rotation",
         N.LimitOperator(N.Relaxation(0.5, N.LinearMatrix(rotation(np.pi / 2)))), 0.5, "limit"),
    ]
    return [CatalogEntry(*e) for e in entries]
