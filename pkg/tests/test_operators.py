import numpy as np
import pytest
from scipy.optimize import minimize

from averagedness import errors
from averagedness.catalog import dr_line_slab, dr_slab, dr_slab_closed_form
from averagedness.operators import (Affine, Ball, Box, Compose, Constant, ConvexCombination,
                                    DouglasRachford, Halfspace, HalfspaceIntersection,
                                    HalfDistanceSquared, Huber, Identity, Indicator, LimitOperator,
                                    LinearMatrix, LinearMonotone, LinearSubspace, MoreauEnvelope,
                                    NormalCone, Projection, Prox, Quadratic, Reflector, Relaxation,
                                    Resolvent, ScalarPiecewise, ScalarPiecewiseConvex, Shift,
                                    Singleton, Support, Yosida, AffineSubspace, prox_evaluate)

from conftest import spread_points


def test_halfspace_projection_example():
    h = Halfspace([1.0, 1.0], 0.0)
    np.testing.assert_allclose(Projection(h)([-2.0, -4.0]), [1.0, -1.0])
    np.testing.assert_allclose(Projection(h)([3.0, 1.0]), [3.0, 1.0])


def test_douglas_rachford_first_step():
    T = dr_line_slab()
    np.testing.assert_array_equal(T([4.0, 10.0]), [-1.0, 7.0])


def test_dykstra_matches_closed_form_slab(rng):
    C = dr_slab()
    Z = spread_points(rng, 100, 2)
    np.testing.assert_allclose(C.project(Z), dr_slab_closed_form(Z), atol=1e-8)


def test_empty_intersection_rejected():
    with pytest.raises(errors.ValidationError):
        HalfspaceIntersection((Halfspace([1.0], 1.0), Halfspace([-1.0], 0.0)))


SETS = [
    Ball([0.0, 0.0, 0.0], 2.0),
    Box([-1.0, 0.0, -np.inf], [1.0, 2.0, 0.5]),
    Halfspace([1.0, -2.0, 0.5], 1.0),
    LinearSubspace.span([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]]),
    AffineSubspace.span([[1.0, 0.0, 2.0]], [0.0, 1.0, 0.0]),
    Singleton([1.0, 2.0, 3.0]),
    HalfspaceIntersection((Halfspace([1.0, 0.0, 0.0], 0.0), Halfspace([1.0, 1.0, 1.0], -1.0),
                           Halfspace([0.0, -1.0, 0.0], -3.0))),
]


@pytest.mark.parametrize("C", SETS, ids=lambda c: type(c).__name__)
def test_projection_idempotent(C, rng):
    X = spread_points(rng, 1000, 3)
    P = C.project(X)
    assert np.max(np.abs(C.project(P) - P)) < 1e-10 * (1 + np.abs(P).max())


@pytest.mark.parametrize("C", SETS, ids=lambda c: type(c).__name__)
def test_projection_firmly_nonexpansive(C, rng):
    X, Y = spread_points(rng, 1000, 3), spread_points(rng, 1000, 3)
    PX, PY = C.project(X), C.project(Y)
    lhs = np.sum((PX - PY) ** 2, axis=1)
    rhs = np.sum((X - Y) * (PX - PY), axis=1)
    scale = 1 + np.sum((X - Y) ** 2, axis=1)
    assert np.all(lhs <= rhs + 1e-10 * scale)


@pytest.mark.parametrize("C", SETS, ids=lambda c: type(c).__name__)
def test_projection_variational_inequality(C, rng):
    # <x - Px, c - Px> <= 0 for points c of C
    X = spread_points(rng, 200, 3)
    P = C.project(X)
    Cpts = C.project(spread_points(rng, 200, 3))
    ip = np.einsum("ij,kj->ik", X - P, Cpts) - np.sum((X - P) * P, axis=1)[:, None]
    assert ip.max() <= 1e-8 * (1 + np.abs(X).max()) ** 2


def test_set_predicates():
    assert Box([-np.inf], [np.inf]).is_whole_space
    assert Ball([0.0], np.inf).is_whole_space
    assert LinearSubspace.span([[1.0, 0.0], [0.0, 1.0]]).is_whole_space
    assert not Ball([0.0], 1.0).is_whole_space
    assert Singleton([1.0]).is_singleton
    assert Box([1.0, 2.0], [1.0, 2.0]).is_singleton
    assert Ball([0.0, 0.0], 1.0).contains([0.6, 0.8])
    assert not Ball([0.0, 0.0], 1.0).contains([0.6, 0.81])
    assert Ball([0.0, 0.0], 1.0).distance([3.0, 4.0]) == pytest.approx(4.0)


def test_dimension_mismatch():
    with pytest.raises(errors.DimensionMismatch):
        Projection(Ball([0.0, 0.0], 1.0))([1.0, 2.0, 3.0])


def test_matrix_norm_checked():
    with pytest.raises(errors.NotNonexpansive):
        LinearMatrix([[1.1, 0.0], [0.0, 0.0]])
    LinearMatrix([[1.0, 0.0], [0.0, -1.0]])


def _numeric_prox(f, x):
    res = minimize(lambda y: f.value(y) + 0.5 * np.sum((y - x) ** 2), x, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000})
    return res.x


@pytest.mark.parametrize("f", [
    Huber(0.7, 1.5),
    HalfDistanceSquared(Ball([0.0, 0.0], 1.0), 2.0),
    Quadratic([[3.0, 1.0], [1.0, 2.0]]),
    Support(Box([-1.0, -2.0], [1.0, 0.5]), 1.0),
    MoreauEnvelope(Huber(1.0), 0.5, 2.0),
], ids=lambda f: type(f).__name__)
def test_prox_matches_direct_minimization(f, rng):
    for x in spread_points(rng, 6, 2)[:, :] * 1.5:
        np.testing.assert_allclose(f.prox(x), _numeric_prox(f, x), atol=1e-5)


def test_prox_of_indicator_is_projection(rng):
    C = Box([0.0, -1.0], [1.0, 1.0])
    X = spread_points(rng, 50, 2)
    np.testing.assert_allclose(Prox(Indicator(C))(X), C.project(X))


def test_prox_evaluate():
    np.testing.assert_allclose(prox_evaluate(Quadratic([[3.0]]), [4.0]), [1.0])


def test_scalar_piecewise_convex_prox_is_piecewise():
    f = ScalarPiecewiseConvex([0.0, 2.0], [-1.0, 0.5, 3.0], 0.0)
    g = f.prox_as_piecewise(0.5)
    xs = np.linspace(-5, 8, 131)
    np.testing.assert_allclose(g(xs[:, None]).ravel(), f.prox(xs[:, None], 0.5).ravel(), atol=1e-12)
    for x in xs[::13]:
        np.testing.assert_allclose(f.prox([x], 0.5), _numeric_prox(_Scaled(f, 0.5), np.array([x])), atol=1e-5)


class _Scaled:
    def __init__(self, f, t):
        self.f, self.t = f, t

    def value(self, y):
        return self.t * self.f.value(y)


def test_resolvent_inverse_identity(rng):
    # z = J_A x satisfies x - z in alpha A z
    M = np.array([[1.0, -2.0], [2.0, 0.5]])
    A = LinearMonotone(M)
    X = spread_points(rng, 1000, 2)
    for alpha in (0.3, 1.0, 4.0):
        Z = Resolvent(A, alpha)(X)
        assert np.max(np.abs(X - Z - alpha * Z @ M.T)) < 1e-10 * (1 + np.abs(X).max())


def test_normal_cone_resolvent_is_projection(rng):
    C = Ball([1.0, 0.0], 2.0)
    X = spread_points(rng, 100, 2)
    np.testing.assert_allclose(Resolvent(NormalCone(C), 3.0)(X), C.project(X))


def test_yosida_formula(rng):
    A = LinearMonotone(np.diag([2.0, 0.5]))
    mu = 0.7
    X = spread_points(rng, 100, 2)
    expected = X @ np.linalg.inv(np.eye(2) + mu * np.diag([2.0, 0.5])).T
    np.testing.assert_allclose(Yosida(mu, A).apply(X), (X - expected) / mu, atol=1e-12)


def test_normal_cone_is_set_valued():
    with pytest.raises(errors.SetValuedError):
        NormalCone(Ball([0.0], 1.0)).apply([0.0])


def test_combinators(rng):
    X = spread_points(rng, 20, 2)
    A = np.array([[0.5, 0.1], [0.0, -0.3]])
    T1, T2 = LinearMatrix(A), Projection(Ball([0.0, 0.0], 1.0))
    np.testing.assert_allclose(Compose((T1, T2))(X), T2(X) @ A.T)
    np.testing.assert_allclose(Relaxation(0.3, T2)(X), 0.7 * X + 0.3 * T2(X))
    np.testing.assert_allclose(ConvexCombination((0.25, 0.75), (T1, T2))(X), 0.25 * T1(X) + 0.75 * T2(X))
    np.testing.assert_allclose(Affine(A, [1.0, 2.0])(X), X @ A.T + [1.0, 2.0])
    np.testing.assert_allclose(Shift([1.0, -1.0])(X), X + [1.0, -1.0])
    np.testing.assert_allclose(Constant([3.0, 4.0])(X), np.tile([3.0, 4.0], (20, 1)))
    np.testing.assert_allclose(Identity()(X), X)
    np.testing.assert_allclose(Reflector(Ball([0.0, 0.0], 1.0))(X), 2 * T2(X) - X)


def test_convex_combination_weights_validated():
    with pytest.raises(errors.ValidationError):
        ConvexCombination((0.5, 0.6), (Identity(), Identity()))


def test_douglas_rachford_formula(rng):
    A, B = Ball([0.0, 0.0], 1.0), Box([0.5, -1.0], [3.0, 1.0])
    X = spread_points(rng, 50, 2)
    PA = A.project(X)
    expected = X - PA + B.project(2 * PA - X)
    np.testing.assert_allclose(DouglasRachford(A, B)(X), expected)


def test_scalar_piecewise_validation():
    with pytest.raises(errors.NotNonexpansive):
        ScalarPiecewise([0.0], [0.0, 2.0], [0.0, 0.0])
    with pytest.raises(errors.ValidationError):
        ScalarPiecewise([0.0], [0.0, 1.0], [0.0, 1.0])


def test_scalar_piecewise_fixed_points():
    g = ScalarPiecewise([0.0, 1.0], [0.0, 1.0, -0.5], [0.0, 0.0, 1.5])
    fp = g.fixed_points()
    assert len(fp) == 1
    assert fp[0][0] == pytest.approx(0.0) and fp[0][1] == pytest.approx(1.0)


def test_limit_operator_of_firm_map():
    T = Relaxation(0.5, LinearMatrix(np.diag([1.0, -1.0])))
    np.testing.assert_allclose(LimitOperator(T)([3.0, 5.0]), [3.0, 0.0], atol=1e-9)


def test_limit_operator_nonconvergence():
    with pytest.raises(errors.NonConvergence):
        LimitOperator(LinearMatrix([[0.0, -1.0], [1.0, 0.0]]), max_iter=50)([1.0, 0.0])
