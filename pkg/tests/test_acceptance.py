"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""
import time

import numpy as np
import pytest

from averagedness.calculus import (exact_modulus, matrix_modulus, ogura_yamada, prox_modulus,
                                   scalar_modulus, verify_identities)
from averagedness.catalog import (dr_fix_segment, dr_line_slab, kinked_scalar_limit, kinked_scalar_map,
                                  line, log_tail_surrogate, standard_catalog)
from averagedness.dynamics import classify_limit, orbit
from averagedness.estimator import estimate_modulus, falsify_averaged, invert_by_contraction
from averagedness.operators import (Ball, Box, Compose, HalfDistanceSquared, Huber, Indicator,
                                    LinearMatrix, LinearMonotone, NormalCone, Projection, Prox,
                                    Quadratic, Resolvent, Shift, Singleton, Support, Yosida)

from conftest import ACCEPTANCE_LINES


def record(number, name, ok, elapsed, budget, detail=""):
    ok = bool(ok and elapsed < budget)
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} ({elapsed:.3f}s < {budget}s) {detail}".rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_matrix_modulus():
    t = time.perf_counter()
    k = matrix_modulus(np.diag([1.0, -0.5]))
    elapsed = time.perf_counter() - t
    record(1, "matrix_modulus(diag(1,-1/2)) = 0.75", abs(k - 0.75) <= 1e-9, elapsed, 0.1, f"k={k!r}")


def test_criterion_2_two_lines():
    t = time.perf_counter()
    errs = []
    for theta in (np.pi / 6, np.pi / 4, np.pi / 3):
        m = line(theta).projector_matrix() @ line(0.0).projector_matrix()
        errs.append(abs(matrix_modulus(m) - (1 + np.cos(theta)) / (2 + np.cos(theta))))
    elapsed = time.perf_counter() - t
    record(2, "two lines (1+cos)/(2+cos)", max(errs) <= 1e-8, elapsed, 1.0, f"max_err={max(errs):.2e}")


def test_criterion_3_dr_counterexample():
    t = time.perf_counter()
    T = dr_line_slab()
    orb = orbit(T, [4.0, 10.0])
    v = classify_limit(T, dr_fix_segment(), extra_points=[[4.0, 10.0]])
    elapsed = time.perf_counter() - t
    iterates_ok = np.array_equal(np.array(orb.points[1:5]), [[-1, 7], [-2, 3], [-0.5, 0.5], [0, 0]])
    w = v.witness
    d_fix, d_lim = w["distance_to_fix_set"], w["distance_to_limit"]
    dist_ok = abs(d_fix - 2 * np.sqrt(17)) <= 1e-12 and abs(d_lim - 2 * np.sqrt(29)) <= 1e-12 and d_fix < d_lim
    record(3, "DR orbit, not_projection verdict, 2sqrt17 < 2sqrt29",
           iterates_ok and v.verdict == "not_projection" and dist_ok, elapsed, 0.1,
           f"dist_err={max(abs(d_fix - 2 * np.sqrt(17)), abs(d_lim - 2 * np.sqrt(29))):.1e}")


def test_criterion_4_symbolic_values():
    t = time.perf_counter()
    ball = Ball([0.0, 0.0], 1.0)
    bad = []
    grid = (0.5, 1.0, 2.0)
    for a in grid:
        for mu in grid:
            if prox_modulus(Huber(mu, a)).value != a / (2 * (mu + a)):
                bad.append(("huber", a, mu))
            if exact_modulus(Resolvent(Yosida(mu, NormalCone(ball)))).value != 1 / (2 * (mu + 1)):
                bad.append(("yosida_normal_cone", mu))
        if prox_modulus(HalfDistanceSquared(ball, a)).value != a / (2 * (1 + a)):
            bad.append(("half_distance", a))
        for lam in grid:
            if exact_modulus(Prox(Support(Box([-1.0, -1.0], [1.0, 1.0]), lam))).value != 0.5:
                bad.append(("support", lam))
            if exact_modulus(Prox(Support(Singleton([1.0, 2.0]), lam))).value != 0.0:
                bad.append(("support_singleton", lam))
    if exact_modulus(Projection(ball)).value != 0.5:
        bad.append("projection")
    elapsed = time.perf_counter() - t
    record(4, "exact symbolic moduli on the grid", not bad, elapsed, 1.0, f"mismatches={bad}")


SMOOTH_FAMILIES = ("matrix", "scalar")


def test_criterion_5_estimator_soundness():
    catalog = standard_catalog()
    assert len(catalog) >= 15
    t = time.perf_counter()
    worst_excess, worst_gap = -np.inf, 0.0
    for entry in catalog:
        for seed in range(10):
            est = estimate_modulus(entry.operator, n=10_000, seed=seed, refine_steps=20,
                                   dim=entry.operator.dim or 2).value
            worst_excess = max(worst_excess, est - entry.modulus)
            if entry.family in SMOOTH_FAMILIES:
                worst_gap = max(worst_gap, entry.modulus - est)
    elapsed = time.perf_counter() - t
    record(5, f"estimator sound on {len(catalog)} operators x 10 seeds x 1e4",
           worst_excess <= 1e-9 and worst_gap <= 0.02, elapsed, 30.0,
           f"max_excess={worst_excess:.1e} max_gap={worst_gap:.1e}")


def test_criterion_6_identity_suites():
    t = time.perf_counter()
    ops = [LinearMonotone(np.diag([2.0])), LinearMonotone(np.array([[0.0, -1.0], [1.0, 0.0]])),
           NormalCone(Ball([0.0, 0.0], 1.0))]
    worst = 0.0
    for A in ops:
        for suite in ("yosida_resolvent", "yosida_identity"):
            rep = verify_identities(suite, operator=A, mu=1.0, alpha=1.0, n=1000)
            worst = max(worst, rep.max_residual)
    for f in (Quadratic(np.diag([2.0])), Indicator(Ball([0.0, 0.0], 1.0))):
        worst = max(worst, verify_identities("moreau_envelope", function=f, n=1000).max_residual)
    elapsed = time.perf_counter() - t
    record(6, "resolvent, envelope and Yosida identities at 1000 points", worst < 1e-9, elapsed, 5.0,
           f"max_residual={worst:.1e}")


def test_criterion_7_inversion():
    t = time.perf_counter()
    res = invert_by_contraction(Prox(Quadratic(np.diag([3.0]))), [1.0], tol=1e-10, k=3 / 8)
    elapsed = time.perf_counter() - t
    ok = res.residual <= 1e-10 and res.iterations <= 120 and abs(res.x[0] - 4.0) <= 1e-9
    record(7, "inversion of Prox(3x^2/2) with k=3/8", ok, elapsed, 0.1, f"iterations={res.iterations}")


def test_criterion_8_scalar_moduli():
    t = time.perf_counter()
    kf, kinf = scalar_modulus(kinked_scalar_map()), scalar_modulus(kinked_scalar_limit())
    surrogate = log_tail_surrogate()
    lower = estimate_modulus(surrogate, n=10_000, seed=0).value
    elapsed = time.perf_counter() - t
    ok = kf == 0.75 and kinf == 0.75 and lower >= 0.5 - 1e-3 and lower <= scalar_modulus(surrogate) + 1e-12
    record(8, "scalar moduli f, f_inf = 3/4; log-tail lower bound", ok, elapsed, 0.1, f"phi_lower={lower:.6f}")


def _random_nonexpansive(rng, dim=3):
    m = rng.standard_normal((dim, dim))
    return m / np.linalg.norm(m, 2) * rng.uniform(0.3, 1.0)


def test_criterion_9_property_suites():
    t = time.perf_counter()
    rng = np.random.default_rng(2024)
    failures = []
    for entry in standard_catalog():
        if entry.modulus <= 0.5 and falsify_averaged(entry.operator, 0.5, n=2000,
                                                     dim=entry.operator.dim or 2) is not None:
            failures.append(("falsifier", entry.name))
        shifted = Compose((Shift(np.ones(entry.operator.dim or 2)), entry.operator))
        if entry.operator.dim and exact_modulus(shifted).value != exact_modulus(entry.operator).value:
            failures.append(("shift", entry.name))
    for _ in range(100):
        m1, m2 = _random_nonexpansive(rng), _random_nonexpansive(rng)
        k1, k2 = matrix_modulus(m1), matrix_modulus(m2)
        for lam in np.arange(1, 10) / 10:
            if abs(matrix_modulus((1 - lam) * np.eye(3) + lam * m1) - lam * k1) > 1e-9:
                failures.append(("relaxation", lam))
        if matrix_modulus(m1 @ m2) > ogura_yamada(k1, k2) + 1e-9:
            failures.append("composition")
        lam = rng.uniform()
        if matrix_modulus(lam * m1 + (1 - lam) * m2) > lam * k1 + (1 - lam) * k2 + 1e-9:
            failures.append("convexity")
        s = rng.standard_normal((2, 2))
        a = s @ s.T + 0.1 * np.eye(2) + (s - s.T)
        if abs(LinearMonotone(a).monotone_value() - LinearMonotone(np.linalg.inv(a)).cocoercive_value()) > 1e-9:
            failures.append("duality")
    elapsed = time.perf_counter() - t
    record(9, "property suites", not failures, elapsed, 60.0, f"failures={failures[:5]}")
