"""Pointwise checks of the resolvent, Yosida and Moreau-envelope identities.

Each suite evaluates one side of an identity through the catalog and checks
it against an independent characterization (the defining inclusion of a
resolvent or a Yosida regularization, a direct linear solve, or a second
rule chain for the modulus).
"""
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from ..operators import functions as F
from ..operators import monotone as M
from ..operators import nonexpansive as N
from ..operators import sets as S
from .matrix import matrix_modulus
from .rules import exact_modulus, prox_modulus

SUITES = ("yosida_resolvent", "yosida_relaxation", "yosida_identity", "moreau_envelope",
          "normal_cone_yosida", "reflected_resolvent")
PASS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class IdentityReport:
    suite: str
    max_residual: float
    passed: bool
    points: int
    checks: dict = field(default_factory=dict)
    moduli: dict = field(default_factory=dict)

    def to_dict(self):
        return {"suite": self.suite, "max_residual": self.max_residual, "passed": self.passed,
                "points": self.points, "checks": dict(self.checks), "moduli": dict(self.moduli)}


def sample_points(dim, n=1000, seed=0):
    rng = np.random.default_rng(seed)
    scales = np.array([0.1, 1.0, 10.0])[np.arange(n) % 3]
    return rng.standard_normal((n, dim)) * scales[:, None]


def _rows(a):
    return float(np.max(np.linalg.norm(a, axis=1))) if a.size else 0.0


def _inclusion_residual(A, P, Y):
    """How far ``Y`` is from ``A(P)`` row-wise, measured through ``J_A``."""
    if A.single_valued:
        return _rows(A._apply(P) - Y)
    return _rows(A._resolvent(P + Y, 1.0) - P)


def _default_operator():
    return M.LinearMonotone(np.diag([2.0]))


def _yosida_resolvent(A, mu, alpha, X):
    Y = M.Yosida(mu, A)
    Z = Y._resolvent(X, alpha)
    checks = {"resolvent_inclusion": _rows(X - Z - alpha * Y._apply(Z))}
    moduli = {"exact": exact_modulus(N.Resolvent(Y, alpha)).upper}
    if isinstance(A, M.LinearMonotone):
        n = A.dim
        ym = (np.eye(n) - A.resolvent_matrix(mu)) / mu
        direct = np.linalg.solve(np.eye(n) + alpha * ym, X.T).T
        checks["direct_solve"] = _rows(Z - direct)
        moduli["matrix"] = matrix_modulus(np.linalg.inv(np.eye(n) + alpha * ym))
        checks["modulus_agreement"] = abs(moduli["exact"] - moduli["matrix"])
    return checks, moduli


def _yosida_relaxation(A, alpha, X):
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError("relaxation suite needs alpha in [0, 1]")
    rhs = N.Relaxation(alpha, N.Resolvent(A, 1.0))
    if alpha == 0.0:
        lhs = N.Identity(A.dim)
    elif alpha == 1.0:
        lhs = N.Resolvent(A, 1.0)
    else:
        lhs = N.Resolvent(M.Yosida(1.0 - alpha, A), alpha)
    Z = lhs._apply(X)
    checks = {"sides_agree": _rows(Z - rhs._apply(X))}
    if 0.0 < alpha < 1.0:
        checks["resolvent_inclusion"] = _rows(X - Z - alpha * M.Yosida(1.0 - alpha, A)._apply(Z))
    k_lhs, k_rhs = exact_modulus(lhs).upper, alpha * exact_modulus(N.Resolvent(A, 1.0)).upper
    checks["modulus_agreement"] = abs(k_lhs - k_rhs)
    return checks, {"lhs": k_lhs, "rhs": k_rhs}


def _yosida_identity(A, mu, X):
    Y = M.Yosida(mu, A)._apply(X)
    checks = {"yosida_inclusion": _inclusion_residual(A, X - mu * Y, Y)}
    return checks, {}


def _moreau_envelope(f, mu, alpha, X):
    env = F.MoreauEnvelope(f, mu, alpha)
    Z = env._prox(X, 1.0)
    grad = (alpha / mu) * (Z - f._prox(Z, mu))
    checks = {"envelope_prox_inclusion": _rows(X - Z - grad)}
    k = exact_modulus(N.Prox(env)).upper
    inner = prox_modulus(f, mu + alpha).upper
    checks["modulus_agreement"] = abs(k - alpha / (mu + alpha) * inner)
    return checks, {"exact": k, "inner": inner}


def _normal_cone_yosida(C, mu, X):
    A = M.NormalCone(C)
    checks, _ = _yosida_resolvent(A, mu, 1.0, X)
    k = exact_modulus(N.Resolvent(M.Yosida(mu, A), 1.0)).upper
    closed = 1.0 / (2.0 * (mu + 1.0))
    checks["modulus_closed_form"] = abs(k - closed)
    return checks, {"exact": k, "closed_form": closed}


def _reflected_resolvent(A, alpha, X, seed):
    from ..estimator.values import estimate_modulus

    J, R = N.Resolvent(A, alpha), N.ReflectedResolvent(A, alpha)
    checks = {"reflection": _rows(R._apply(X) - (2.0 * J._apply(X) - X))}
    kj, kr = exact_modulus(J).upper, exact_modulus(R).upper
    checks["modulus_agreement"] = abs(kr - 2.0 * kj)
    rng = np.random.default_rng([seed, 2])
    pairs = (X, X[rng.permutation(X.shape[0])])
    ej = estimate_modulus(J, pairs=pairs).value
    er = estimate_modulus(R, pairs=pairs).value
    checks["estimate_agreement"] = abs(er - 2.0 * ej)
    return checks, {"resolvent": kj, "reflected": kr, "estimate_resolvent": ej, "estimate_reflected": er}


def verify_identities(suite, operator=None, function=None, set=None, mu=1.0, alpha=1.0,
                      n=1000, seed=0, tol=PASS_TOL) -> IdentityReport:
    """Run one identity suite at ``n`` seeded points.

    Parameters
    ----------
    suite : str
        One of ``SUITES``.
    operator : MonotoneOperator, optional
        Defaults to the linear operator ``diag(2)`` on R.
    function : ConvexFunction, optional
        For the Moreau-envelope suite; defaults to ``0.5 * 2 x^2``.
    set : ConvexSet, optional
        For the normal-cone suite; defaults to the closed unit ball in R^2.
    """
    if suite not in SUITES:
        raise ValidationError(f"unknown identity suite {suite!r}; choose from {', '.join(SUITES)}")
    mu, alpha = float(mu), float(alpha)
    if mu <= 0 or alpha < 0:
        raise ValidationError("need mu > 0 and alpha >= 0")
    A = operator if operator is not None else _default_operator()
    if suite == "moreau_envelope":
        f = function if function is not None else F.Quadratic(np.diag([2.0]))
        X = sample_points(f.dim or 1, n, seed)
        checks, moduli = _moreau_envelope(f, mu, alpha, X)
    elif suite == "normal_cone_yosida":
        C = set if set is not None else S.Ball(np.zeros(2), 1.0)
        X = sample_points(C.dim, n, seed)
        checks, moduli = _normal_cone_yosida(C, mu, X)
    else:
        X = sample_points(A.dim or 1, n, seed)
        if suite == "yosida_resolvent":
            if alpha <= 0:
                raise ValidationError("resolvent suite needs alpha > 0")
            checks, moduli = _yosida_resolvent(A, mu, alpha, X)
        elif suite == "yosida_relaxation":
            checks, moduli = _yosida_relaxation(A, alpha, X)
        elif suite == "yosida_identity":
            checks, moduli = _yosida_identity(A, mu, X)
        else:
            checks, moduli = _reflected_resolvent(A, alpha if alpha > 0 else 1.0, X, seed)
    worst = max(checks.values()) if checks else 0.0
    return IdentityReport(suite, float(worst), bool(worst < tol), int(X.shape[0]), checks, moduli)
