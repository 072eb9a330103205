import numpy as np
import pytest

from averagedness import errors
from averagedness.catalog import standard_catalog
from averagedness.estimator import (bilipschitz_check, estimate_modulus, estimate_value,
                                    falsify_averaged, invert_by_contraction, modulus_ratio)
from averagedness.estimator.sampling import random_pairs
from averagedness.operators import (Ball, Compose, Constant, Identity, LinearMatrix, LinearMonotone,
                                    Projection, Prox, Quadratic, Reflector, Relaxation, Shift)

CATALOG = standard_catalog()


@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.name)
def test_estimate_never_exceeds_modulus(entry):
    for seed in range(3):
        est = estimate_modulus(entry.operator, n=2000, seed=seed, dim=entry.operator.dim or 2)
        assert est.value <= entry.modulus + 1e-9
        assert est.direction == "lower_bound"


def test_estimate_reaches_matrix_modulus():
    est = estimate_modulus(LinearMatrix(np.diag([1.0, -0.5])), n=10_000, seed=7)
    assert 0.75 - 1e-6 <= est.value <= 0.75 + 1e-9
    x, y = est.witness
    assert modulus_ratio(LinearMatrix(np.diag([1.0, -0.5])), x, y) == pytest.approx(est.value, abs=1e-12)


def test_refinement_does_not_lower_estimate():
    T = Compose((Projection(Ball([0.0, 0.0], 1.0)), LinearMatrix(np.diag([0.5, 0.2]))))
    base = estimate_modulus(T, n=200, seed=3)
    refined = estimate_modulus(T, n=200, seed=3, refine_steps=30)
    assert refined.value >= base.value


@pytest.mark.parametrize("entry", CATALOG[:12], ids=lambda e: e.name)
def test_modulus_and_cocoercive_value_agree(entry):
    # k = 1 / (2 c(Id - T)) pair by pair, so the estimates agree on one sample
    d = entry.operator.dim or 2
    pairs = random_pairs(d, 3000, 4)
    k = estimate_modulus(entry.operator, pairs=pairs).value
    if k == 0.0:
        # Id - T is constant, so no pair carries a cocoercive ratio
        with pytest.raises(errors.AllPairsDegenerate):
            estimate_value("cocoercive_value", entry.operator, pairs=pairs, complement=True)
        return
    c = estimate_value("cocoercive_value", entry.operator, pairs=pairs, complement=True).value
    assert 1.0 / (2.0 * c) == pytest.approx(k, abs=1e-12)


def test_shift_gives_identical_estimates():
    T = Relaxation(0.6, Reflector(Ball([0.0, 0.0], 1.0)))
    a = estimate_modulus(T, n=3000, seed=5)
    b = estimate_modulus(Compose((Shift([3.0, -1.0]), T)), n=3000, seed=5)
    assert a.value == b.value


def test_estimates_independent_of_worker_count():
    T = Projection(Ball([0.0, 0.0, 0.0], 1.0))
    one = estimate_modulus(T, n=9000, seed=2, workers=1)
    four = estimate_modulus(T, n=9000, seed=2, workers=4)
    assert one.value == four.value
    np.testing.assert_array_equal(one.witness[0], four.witness[0])


def test_degenerate_operator():
    assert estimate_modulus(Shift([1.0, 2.0]), n=100).value == 0.0
    with pytest.raises(errors.DegenerateOperator):
        estimate_modulus(Identity(2), n=100, strict=True)


def test_falsifier_quiet_on_firm_members():
    for entry in CATALOG:
        if entry.modulus <= 0.5:
            assert falsify_averaged(entry.operator, 0.5, n=2000, dim=entry.operator.dim or 2) is None


def test_falsifier_fires_below_modulus():
    T = LinearMatrix(np.diag([1.0, -0.5]))
    v = falsify_averaged(T, 0.7, n=2000, seed=0)
    assert v is not None and v.excess > 0
    assert modulus_ratio(T, v.x, v.y) > 0.7


def test_duality_of_monotone_and_cocoercive_values(rng):
    a = np.array([[2.0, 1.0], [-1.0, 3.0]])
    A, Ainv = LinearMonotone(a), LinearMonotone(np.linalg.inv(a))
    assert A.monotone_value() == pytest.approx(Ainv.cocoercive_value(), abs=1e-9)
    X, Y = random_pairs(2, 2000, 6)
    m = estimate_value("monotone_value", A, pairs=(X, Y)).value
    c = estimate_value("cocoercive_value", Ainv, pairs=(X @ a.T, Y @ a.T)).value
    assert m == pytest.approx(c, abs=1e-9)
    assert m >= A.monotone_value() - 1e-9


def test_lipschitz_value_estimate():
    T = LinearMatrix(np.diag([0.5, -0.9]))
    est = estimate_value("lipschitz_value", T, n=3000)
    assert est.value <= 0.9 + 1e-12 and est.value > 0.89


def test_bilipschitz_example():
    T = Prox(Quadratic(np.diag([3.0])))
    rep = bilipschitz_check(T, 3 / 8, n=2000)
    assert rep.lower_factor == pytest.approx(0.25)
    assert rep.min_ratio == pytest.approx(0.25, abs=1e-12)


def test_bilipschitz_errors():
    with pytest.raises(errors.NotNormallyNonexpansive):
        bilipschitz_check(Projection(Ball([0.0], 1.0)), 0.5)
    with pytest.raises(errors.ViolationFound) as info:
        bilipschitz_check(LinearMatrix(np.diag([0.5, 0.2])), 0.1, n=500)
    assert info.value.witness is not None


def test_inversion_of_quadratic_prox():
    T = Prox(Quadratic(np.diag([3.0])))
    res = invert_by_contraction(T, [1.0], k=3 / 8)
    assert res.residual <= 1e-10 and res.iterations <= 120
    assert res.x[0] == pytest.approx(4.0, abs=1e-9)


def test_inversion_uses_rules_when_k_missing():
    T = Prox(Quadratic(np.diag([3.0, 1.0])))
    res = invert_by_contraction(T, [1.0, -2.0])
    assert res.certified
    np.testing.assert_allclose(res.x, [4.0, -4.0], atol=1e-9)


def test_inversion_refuses_firm_projection():
    with pytest.raises(errors.NotNormallyNonexpansive):
        invert_by_contraction(Constant([1.0]), [0.0])
