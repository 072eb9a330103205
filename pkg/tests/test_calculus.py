import numpy as np
import pytest
from scipy.linalg import subspace_angles

from averagedness import errors
from averagedness.calculus import (ModulusBound, SubspacePair, exact_modulus, friedrichs_cosine,
                                   matrix_modulus, ogura_yamada, prox_modulus, resolvent_modulus,
                                   scalar_modulus, two_subspace_modulus)
from averagedness.catalog import (kinked_scalar_map, line, log_tail_surrogate, product_subspaces,
                                  rotation, standard_catalog)
from averagedness.estimator import estimate_modulus
from averagedness.operators import (Ball, Box, Compose, Constant, ConvexCombination, HalfDistanceSquared,
                                    Halfspace, Huber, Identity, Indicator, LimitOperator, LinearMatrix,
                                    LinearMonotone, LinearSubspace, MoreauEnvelope, NormalCone, Projection,
                                    Prox, Quadratic, Reflector, Relaxation, Resolvent, ScalarPiecewise,
                                    Shift, Singleton, Support, Yosida)

from conftest import brute_modulus


@pytest.mark.parametrize("m", [
    np.diag([1.0, -0.5]),
    np.diag([0.5, 0.2]),
    np.array([[0.3, 0.4], [-0.2, 0.6]]),
    rotation(0.3) * 0.9,
    np.array([[0.0, 0.0], [0.0, 1.0]]),
    np.array([[1.0, 0.0], [0.0, 1.0]]),
], ids=str)
def test_matrix_modulus_against_norm_bisection(m):
    assert matrix_modulus(m) == pytest.approx(brute_modulus(m), abs=1e-9)


def test_matrix_modulus_random_against_norm_bisection(rng):
    for _ in range(20):
        m = rng.standard_normal((3, 3))
        m /= np.linalg.norm(m, 2) * 1.01
        assert matrix_modulus(m) == pytest.approx(brute_modulus(m), abs=1e-8)


def test_orthogonal_matrices_have_modulus_one():
    assert exact_modulus(LinearMatrix(rotation(1.0))).value == 1.0
    assert exact_modulus(LinearMatrix(-np.eye(2))).value == 1.0


def test_friedrichs_cosine_against_principal_angles(rng):
    for _ in range(10):
        u, v = rng.standard_normal((4, 2)), rng.standard_normal((4, 2))
        expected = np.cos(np.min(subspace_angles(u, v)))
        U, V = LinearSubspace.span(u.T), LinearSubspace.span(v.T)
        assert friedrichs_cosine(U, V) == pytest.approx(expected, abs=1e-10)


def test_friedrichs_cosine_skips_intersection():
    U = LinearSubspace.span([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    V = LinearSubspace.span([[1.0, 0.0, 0.0], [0.0, np.cos(0.4), np.sin(0.4)]])
    assert friedrichs_cosine(U, V) == pytest.approx(np.cos(0.4), abs=1e-12)


@pytest.mark.parametrize("theta", [np.pi / 6, np.pi / 4, np.pi / 3, 1.2])
def test_two_subspace_formula_against_matrix(theta):
    u, v = product_subspaces(theta)
    pair = SubspacePair(v, u)
    closed = (1 + np.cos(theta)) / (2 + np.cos(theta))
    assert two_subspace_modulus(pair) == pytest.approx(closed, abs=1e-12)
    m = v.projector_matrix() @ u.projector_matrix()
    assert brute_modulus(m) == pytest.approx(closed, abs=1e-9)


def test_two_subspace_rejects_equal_pair():
    with pytest.raises(errors.DegeneratePair):
        two_subspace_modulus(SubspacePair(line(0.2), line(0.2)))


def test_scalar_modulus_against_secants():
    for g in (kinked_scalar_map(), log_tail_surrogate(radius=50.0, knots_per_decade=5)):
        xs = np.linspace(-80, 80, 4001)
        ys = g(xs[:, None]).ravel()
        secant_min = np.min(np.diff(ys) / np.diff(xs))
        assert scalar_modulus(g) == pytest.approx((1 - secant_min) / 2, abs=1e-9)


@pytest.mark.parametrize("entry", standard_catalog(), ids=lambda e: e.name)
def test_exact_modulus_catalog(entry):
    b = exact_modulus(entry.operator)
    assert b.exact
    assert b.value == pytest.approx(entry.modulus, abs=1e-9)
    assert b.trace


def test_trace_names_two_subspace_rule():
    T = Compose((Projection(line(np.pi / 4)), Projection(line(0.0))))
    b = exact_modulus(T)
    assert b.rules == ["two_subspace_modulus"]
    assert b.value == pytest.approx((1 + np.cos(np.pi / 4)) / (2 + np.cos(np.pi / 4)), abs=1e-12)


def test_two_subspace_trace_in_r4():
    u, v = product_subspaces(np.pi / 6)
    b = exact_modulus(Compose((Projection(v), Projection(u))))
    assert b.rules == ["two_subspace_modulus"]


def test_projection_onto_whole_space_is_identity():
    assert exact_modulus(Projection(Box([-np.inf], [np.inf]))).value == 0.0
    assert exact_modulus(Reflector(Ball([0.0, 0.0], np.inf))).value == 0.0


def test_relaxation_rule():
    T = Relaxation(0.4, LinearMatrix(np.diag([1.0, -0.5])))
    b = exact_modulus(T)
    assert b.exact and b.value == pytest.approx(0.4 * 0.75, abs=1e-9)


def test_shift_invariance_of_rules():
    base = Projection(Ball([0.0, 0.0], 1.0))
    shifted = Compose((Shift([1.0, 2.0]), base, Shift([-3.0, 0.5])))
    assert exact_modulus(shifted).value == exact_modulus(base).value


def test_composition_interval_contains_estimate():
    T = Compose((Projection(Ball([0.0, 0.0], 1.0)), LinearMatrix(np.diag([0.5, 0.2]))))
    b = exact_modulus(T)
    assert not b.exact
    assert b.lower == 0.5
    assert b.upper == pytest.approx(ogura_yamada(0.5, 0.4), abs=1e-9)
    est = estimate_modulus(T, n=5000, seed=1).value
    # the estimate bounds the true modulus from below, the interval from above
    assert est <= b.upper + 1e-9


def test_ogura_yamada_values():
    assert ogura_yamada(0.5, 0.5) == pytest.approx(2 / 3)
    assert ogura_yamada(0.0, 0.3) == pytest.approx(0.3)
    assert ogura_yamada(1.0, 0.3) == 1.0


def test_convex_combination_bound():
    T = ConvexCombination((0.5, 0.5), (Projection(Ball([0.0, 0.0], 1.0)), LinearMatrix(np.diag([1.0, -0.5]))))
    b = exact_modulus(T)
    assert b.upper <= 0.5 * 0.5 + 0.5 * 0.75 + 1e-12


def test_unknown_operator_gives_unit_interval():
    b = exact_modulus(LimitOperator(LinearMatrix(rotation(0.5))))
    assert (b.lower, b.upper) == (0.0, 1.0)


def test_modulus_bound_invariants():
    with pytest.raises(ValueError):
        ModulusBound(0.6, 0.5)
    with pytest.raises(ValueError):
        ModulusBound(0.2, 0.5, exact=True)


GRID = [0.5, 1.0, 2.0]


@pytest.mark.parametrize("alpha", GRID)
@pytest.mark.parametrize("mu", GRID)
def test_symbolic_prox_values(alpha, mu):
    ball = Ball([0.0, 0.0], 1.0)
    assert prox_modulus(Huber(mu, alpha)).value == alpha / (2 * (mu + alpha))
    assert prox_modulus(HalfDistanceSquared(ball, alpha)).value == alpha / (2 * (1 + alpha))
    k = exact_modulus(Resolvent(Yosida(mu, NormalCone(ball)))).value
    assert k == pytest.approx(1 / (2 * (mu + 1)), abs=0)


def test_prox_dichotomy():
    ball = Ball([0.0, 0.0], 1.0)
    smooth = [Quadratic(np.diag([2.0, 1.0])), HalfDistanceSquared(ball, 1.0), Huber(1.0, 1.0),
              MoreauEnvelope(Indicator(ball), 1.0), Support(Singleton([1.0, 0.0]), 1.0)]
    nonsmooth = [Indicator(ball), Support(Box([-1.0, -1.0], [1.0, 1.0]), 1.0), Indicator(Halfspace([1.0, 0.0], 0.0))]
    for f in smooth:
        assert exact_modulus(Prox(f)).value < 0.5
        assert f.lipschitz_smooth
    for f in nonsmooth:
        assert exact_modulus(Prox(f)).value == 0.5
        assert not f.lipschitz_smooth


def test_resolvent_of_linear_via_cocoercive_value():
    M = np.array([[1.0, -1.0], [1.0, 1.0]])
    k = resolvent_modulus(LinearMonotone(M)).value
    assert k == pytest.approx(brute_modulus(np.linalg.inv(np.eye(2) + M)), abs=1e-9)


def test_scalar_map_with_flat_piece():
    T = ScalarPiecewise([0.0], [0.0, 0.5], [0.0, 0.0])
    assert exact_modulus(T).value == 0.5


def test_constant_map():
    assert exact_modulus(Constant([1.0])).value == 0.5
    assert exact_modulus(Identity(3)).value == 0.0
