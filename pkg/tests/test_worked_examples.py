import numpy as np
import pytest

from averagedness import errors
from averagedness.catalog import dr_line_slab, firm_scalar_map
from averagedness.dynamics import classify_limit, limiting_apply, orbit
from averagedness.estimator import (bilipschitz_check, estimate_modulus, estimate_value,
                                    falsify_averaged, invert_by_contraction, modulus_ratio)
from averagedness.estimator.values import Complement
from averagedness.operators import (Ball, HalfDistanceSquared, Halfspace, Identity, LinearMatrix,
                                    LinearMonotone, LinearSubspace, Projection, Prox, Relaxation)


def test_halfspace_adversarial_pair_gives_half():
    h = Halfspace([1.0, 2.0], 1.0)
    x = h.boundary_point()
    y = x - h.normal / np.linalg.norm(h.normal)
    # the certified ratio is shrunk by its rounding allowance
    assert modulus_ratio(Projection(h), x, y) == pytest.approx(0.5, abs=1e-12)
    assert estimate_modulus(Projection(h), n=10).value == pytest.approx(0.5, abs=1e-12)


def test_matrix_estimate_before_and_after_refinement():
    T = LinearMatrix(np.diag([1.0, -0.5]))
    random_only = estimate_modulus(T, pairs=_gaussian_pairs(10_000, 7))
    assert 0.74 <= random_only.value <= 0.75
    refined = estimate_modulus(T, pairs=_gaussian_pairs(10_000, 7), refine_steps=100)
    assert refined.value == pytest.approx(0.75, abs=1e-6)
    assert refined.value <= 0.75 + 1e-12


def _gaussian_pairs(n, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, 2)), rng.standard_normal((n, 2))


def test_cocoercive_value_of_complement_of_projection():
    h = Halfspace([1.0, 0.0], 0.0)
    est = estimate_value("cocoercive_value", Complement(Projection(h)), n=5000)
    assert est.direction == "upper_bound"
    assert 1.0 - 1e-12 <= est.value <= 1.0 + 1e-6


def test_monotone_value_of_skew_is_zero():
    est = estimate_value("monotone_value", LinearMonotone([[0.0, -1.0], [1.0, 0.0]]), n=1000)
    assert abs(est.value) <= 1e-12


def test_lipschitz_value_of_scaled_identity():
    est = estimate_value("lipschitz_value", LinearMatrix(0.3 * np.eye(2)), n=500)
    assert 0.3 - 1e-12 <= est.value <= 0.3


def test_falsifier_examples():
    assert falsify_averaged(LinearMatrix(np.diag([1.0, -0.5])), 0.5, n=1000) is not None
    assert falsify_averaged(Projection(Ball([0.0, 0.0], 1.0)), 0.5, n=1000) is None
    assert falsify_averaged(Identity(2), 0.0, n=1000) is None


def test_inversion_examples():
    half = LinearMatrix(0.5 * np.eye(1))
    res = invert_by_contraction(half, [3.0])
    # the contraction has factor 1/2, so 6 is reached to tolerance, not exactly
    assert res.x[0] == pytest.approx(6.0, abs=1e-9) and res.residual <= 1e-10
    C = Ball([0.0, 0.0], 2.0)
    res = invert_by_contraction(Prox(HalfDistanceSquared(C, 1.0)), [0.5, -1.0])
    np.testing.assert_allclose(res.x, [0.5, -1.0])
    assert res.iterations == 0


def test_bilipschitz_examples():
    rep = bilipschitz_check(LinearMatrix(0.5 * np.eye(2)), 0.25, n=500)
    assert rep.min_ratio == pytest.approx(0.5) and rep.max_ratio == pytest.approx(0.5)
    with pytest.raises(errors.NotNormallyNonexpansive):
        bilipschitz_check(LinearMatrix(np.diag([1.0, -0.5])), 0.75)


def test_limiting_apply_examples():
    np.testing.assert_array_equal(limiting_apply(dr_line_slab(), [4.0, 10.0]), [0.0, 0.0])
    assert limiting_apply(firm_scalar_map(), [5.0])[0] == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_array_equal(limiting_apply(dr_line_slab(), [1.0, 1.0]), [1.0, 1.0])


def test_orbit_of_projection():
    orb = orbit(Projection(Ball([0.0, 0.0], 1.0)), [2.0, 0.0])
    assert orb.iterations == 1
    np.testing.assert_array_equal(orb.terminal, [1.0, 0.0])


def test_linear_averaged_limit_is_projection():
    T = Relaxation(0.5, LinearMatrix(np.diag([1.0, -1.0, 0.2])))
    fix = LinearSubspace.span([[1.0, 0.0, 0.0]])
    assert classify_limit(T, fix).verdict == "projection"
