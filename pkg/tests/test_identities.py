import numpy as np
import pytest

from averagedness import errors
from averagedness.calculus import SUITES, verify_identities
from averagedness.operators import Ball, Box, Huber, Indicator, LinearMonotone, NormalCone, Quadratic

OPERATORS = {
    "diag2": LinearMonotone(np.diag([2.0])),
    "skew": LinearMonotone(np.array([[0.0, -2.0], [2.0, 0.0]])),
    "ball_normal_cone": NormalCone(Ball([0.0, 0.0], 1.0)),
}


@pytest.mark.parametrize("suite", ["yosida_resolvent", "yosida_relaxation", "yosida_identity",
                                   "reflected_resolvent"])
@pytest.mark.parametrize("name", list(OPERATORS))
def test_operator_suites(suite, name):
    alpha = 0.4 if suite == "yosida_relaxation" else 1.5
    rep = verify_identities(suite, operator=OPERATORS[name], mu=0.7, alpha=alpha)
    assert rep.passed, rep.checks
    assert rep.points == 1000


@pytest.mark.parametrize("f", [Quadratic(np.diag([2.0, 0.5])), Huber(0.3, 2.0), Indicator(Box([0.0, 0.0], [1.0, 1.0]))],
                         ids=lambda f: type(f).__name__)
def test_moreau_envelope_suite(f):
    rep = verify_identities("moreau_envelope", function=f, mu=0.5, alpha=2.0)
    assert rep.passed, rep.checks


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_normal_cone_suite(mu):
    rep = verify_identities("normal_cone_yosida", set=Box([-1.0, 0.0], [1.0, 3.0]), mu=mu)
    assert rep.passed
    assert rep.moduli["exact"] == 1 / (2 * (mu + 1))


def test_relaxation_endpoints():
    for alpha in (0.0, 1.0):
        assert verify_identities("yosida_relaxation", alpha=alpha).passed


def test_unknown_suite():
    with pytest.raises(errors.ValidationError):
        verify_identities("nonexistent")
    assert len(SUITES) == 6
