import math
import random

import numpy as np
import pytest

from bendkit import (
    DeformationFamily,
    asymptotic_eigenvalue,
    b_invariants,
    bending_residual,
    build_bending,
    coefficient_matrices,
    curvature_margin,
    metric_defect_order,
    monodromy,
    nonresonance,
    periodic_solve,
    polar_hessian,
    spectrum,
)
from bendkit.errors import CurvatureViolation, ResonantExponent, ResonantForcing
from bendkit.floquet import (
    HomogeneousSurface,
    margin_profile,
    polar_hessian_profiles,
    reduced_nonresonance_gap,
)
from bendkit.fourier import PeriodicProfile
from bendkit.surface_core import max_bending_residual
from conftest import hill_matrix_spectrum, quadrature_b_invariants


def random_admissible_profile(rng, scale=0.1):
    while True:
        p = PeriodicProfile(
            cos=[1.0] + [rng.uniform(-scale, scale) for _ in range(3)],
            sin=[rng.uniform(-scale, scale) for _ in range(3)],
        )
        if p.min_value()[0] > 0.2 and curvature_margin(2.5, p) > 0.1:
            return p


# ---------------------------------------------------------------------------
# polar hessian and margin
# ---------------------------------------------------------------------------


def test_hessian_constant(profile_const):
    zss, zst, ztt = polar_hessian(2.0, profile_const, 0.77)
    assert (zss, zst, ztt) == pytest.approx((2.0, 0.0, 2.0), abs=1e-14)


def test_hessian_theta_zero():
    # at theta = 0: z_ss = m(m-1)P(0), z_st = (m-1)P'(0)
    p = PeriodicProfile(cos=[1.0, 0.3, -0.1], sin=[0.2, 0.05])
    m = 2.7
    zss, zst, ztt = polar_hessian(m, p, 0.0)
    assert zss == pytest.approx(m * (m - 1) * p.eval(0.0), rel=1e-12)
    assert zst == pytest.approx((m - 1) * p.derivative().eval(0.0), rel=1e-12)
    assert ztt == pytest.approx(m * p.eval(0.0) + p.derivative(2).eval(0.0), rel=1e-12)


def test_hessian_trace_identity():
    # z_ss + z_tt = m^2 P + P'' for all theta (trig collapse oracle)
    rng = random.Random(2)
    for _ in range(5):
        p = random_admissible_profile(rng)
        m = rng.uniform(2.0, 4.0)
        th = np.linspace(0, 2 * np.pi, 64)
        zss, _, ztt = polar_hessian(m, p, th)
        ref = m * m * p.eval(th) + p.derivative(2).eval(th)
        assert np.max(np.abs(zss + ztt - ref)) < 1e-11


def test_hessian_matches_surface_partials(profile_bend):
    # r^(m-2) * theta-part must equal the exact z-partials of the surface
    m = 2.0
    surf = HomogeneousSurface(m, profile_bend)
    zssp, zstp, zttp = polar_hessian_profiles(m, profile_bend)
    rng = random.Random(4)
    for _ in range(10):
        r = rng.uniform(0.3, 1.0)
        th = rng.uniform(0, 2 * np.pi)
        s, t = r * math.cos(th), r * math.sin(th)
        fac = r ** (m - 2)
        assert surf.partial(2, 0, s, t)[2] == pytest.approx(fac * zssp.eval(th), rel=1e-11)
        assert surf.partial(1, 1, s, t)[2] == pytest.approx(fac * zstp.eval(th), rel=1e-11, abs=1e-12)
        assert surf.partial(0, 2, s, t)[2] == pytest.approx(fac * zttp.eval(th), rel=1e-11)


def test_margin_constant(profile_const):
    assert curvature_margin(2.0, profile_const) == pytest.approx(4.0, abs=1e-12)


def test_margin_grid_oracle():
    # dense-grid oracle for the positivity margin
    for cos, expect_positive in [([1.0, 0.0, 0.3], True), ([1.0, 0.0, 0.9], True),
                                 ([1.0, 0.0, 0.0, 0.5], False)]:
        p = PeriodicProfile(cos=cos)
        th = np.linspace(0, 2 * np.pi, 20001)
        m = 2.0
        pv, p1, p2 = p.eval(th), p.derivative().eval(th), p.derivative(2).eval(th)
        oracle = np.min(m * m * pv * pv + m * pv * p2 - (m - 1) * p1 * p1)
        got = curvature_margin(m, p)
        assert got == pytest.approx(oracle, abs=1e-6)
        assert (got > 0) == expect_positive


def test_margin_even_profile_closed_form():
    # m=2 with P = 1 + a cos(2 theta): margin is exactly 4(1 - a^2)
    for a in (0.3, 0.9):
        p = PeriodicProfile(cos=[1.0, 0.0, a])
        assert curvature_margin(2.0, p) == pytest.approx(4 * (1 - a * a), abs=1e-10)


# ---------------------------------------------------------------------------
# coefficient matrices
# ---------------------------------------------------------------------------


def test_matrices_constant(profile_const):
    cm = coefficient_matrices(2.0, profile_const)
    assert np.allclose(cm.lam(0.4), [[0.0, -1.0], [1.0, 0.0]], atol=1e-14)
    assert np.allclose(cm.ham(1.3), np.eye(2), atol=1e-14)


def test_matrices_trace_free_and_symmetric():
    rng = random.Random(8)
    p = random_admissible_profile(rng)
    cm = coefficient_matrices(3.0, p)
    th = rng.uniform(0, 2 * np.pi) + np.arange(100) * 0.0628
    L = cm.lam(th)
    assert np.max(np.abs(L[..., 0, 0] + L[..., 1, 1])) < 1e-13
    H = cm.ham(th)
    assert np.max(np.abs(H[..., 0, 1] - H[..., 1, 0])) < 1e-13


def test_matrices_r_independence(profile_bend):
    # rebuild Lam from surface z-partials at r = 1 and r = 3: identical
    m = 2.0
    surf = HomogeneousSurface(m, profile_bend, domain=None)
    cm = coefficient_matrices(m, profile_bend)

    def lam_from_surface(r, th):
        s, t = r * math.cos(th), r * math.sin(th)
        zss = surf.partial(2, 0, s, t)[2]
        zst = surf.partial(1, 1, s, t)[2]
        ztt = surf.partial(0, 2, s, t)[2]
        den = (m * m - m) * r ** (m - 2) * profile_bend.eval(th)
        return np.array([[zst, -zss], [ztt, -zst]]) / den

    for th in (0.3, 2.0, 4.4):
        L1 = lam_from_surface(1.0, th)
        L3 = lam_from_surface(3.0, th)
        assert np.max(np.abs(L1 - L3)) < 1e-12
        assert np.max(np.abs(L1 - cm.lam(th))) < 1e-12


# ---------------------------------------------------------------------------
# b invariants
# ---------------------------------------------------------------------------


def test_b_invariants_constant(profile_const):
    binv = b_invariants(2.0, profile_const)
    assert binv.b1 == pytest.approx(2 * math.pi, abs=1e-12)
    assert binv.b2 == pytest.approx(0.0, abs=1e-12)
    assert not binv.singular_flags


def test_b_invariants_quadrature_oracle(profile_bend):
    binv = b_invariants(2.0, profile_bend)
    ob1, ob2 = quadrature_b_invariants(2.0, profile_bend)
    assert binv.b1 == pytest.approx(ob1, abs=1e-8)
    assert binv.b2 == pytest.approx(ob2, abs=1e-8)


def test_b2_cos4_oracle_value():
    # derived by the quadrature oracle (c1 - c2 is even here, so the
    # integral does NOT vanish; the oracle is authoritative)
    p = PeriodicProfile(cos=[1.0, 0.0, 0.0, 0.0, 0.1])
    binv = b_invariants(2.0, p)
    ob1, ob2 = quadrature_b_invariants(2.0, p)
    assert binv.b2 == pytest.approx(ob2, abs=1e-8)
    assert abs(binv.b2) > 0.1  # genuinely nonzero


def test_b2_even_k2_profile_is_zero(profile_even):
    # the m=2, P=1+a*cos(2 theta) family integrates c1-c2 to zero exactly
    binv = b_invariants(2.0, profile_even)
    assert binv.b1 == pytest.approx(2 * math.pi, abs=1e-10)
    assert abs(binv.b2) < 1e-10


def test_b1_positive_random():
    rng = random.Random(10)
    for _ in range(4):
        p = random_admissible_profile(rng)
        assert b_invariants(2.5, p).b1 > 0


def test_epsilon_regularization_limit(profile_bend):
    # proof-device fixture: b1^eps -> b1 as the Hamiltonian is shifted by eps*I
    m = 2.0
    cm = coefficient_matrices(m, profile_bend)
    th = 2 * np.pi * np.arange(4096) / 4096
    H = cm.ham(th)
    target = b_invariants(m, profile_bend).b1
    prev_gap = None
    for eps in (1e-2, 1e-3, 1e-4):
        det = (H[:, 0, 0] + eps) * (H[:, 1, 1] + eps) - H[:, 0, 1] ** 2
        b1_eps = float(np.mean(np.sqrt(det)) * 2 * np.pi)
        gap = abs(b1_eps - target)
        if prev_gap is not None:
            assert gap < prev_gap
        prev_gap = gap
    assert prev_gap < 1e-3


# ---------------------------------------------------------------------------
# monodromy
# ---------------------------------------------------------------------------


def test_monodromy_constant_closed_form(profile_const):
    for lam in (0.37, 1.0, 2.63):
        phi = monodromy(2.0, profile_const, lam)
        a = 2 * math.pi * lam
        expected = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        assert np.max(np.abs(phi - expected)) < 1e-11


def test_monodromy_zero_is_identity(profile_bend):
    assert np.max(np.abs(monodromy(2.0, profile_bend, 0.0) - np.eye(2))) < 1e-13


def test_monodromy_det_one_random():
    rng = random.Random(12)
    for _ in range(3):
        p = random_admissible_profile(rng)
        for _ in range(4):
            lam = rng.uniform(0.1, 6.0)
            phi = monodromy(2.5, p, lam)
            assert abs(np.linalg.det(phi) - 1.0) < 1e-9


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


def test_spectrum_constant(profile_const):
    spec = spectrum(2.0, profile_const, (0.5, 4.5))
    values = [ev.value for ev in spec.eigenvalues]
    assert len(values) == 8
    assert np.max(np.abs(np.array(values) - np.repeat([1, 2, 3, 4], 2))) < 1e-8
    assert all(ev.multiplicity == 2 for ev in spec.eigenvalues)
    assert [ev.j for ev in spec.eigenvalues] == [2, 2, 4, 4, 6, 6, 8, 8]


def test_spectrum_combined_constant(profile_const):
    spec = spectrum(2.0, profile_const, (0.4, 3.1), boundary="combined")
    for ev in spec.eigenvalues:
        assert ev.value == pytest.approx(ev.j / 2, abs=1e-8)
        assert ev.boundary == ("periodic" if ev.j % 2 == 0 else "antiperiodic")


def test_spectrum_hill_matrix_oracle(profile_bend):
    m = 2.0
    spec_p = spectrum(m, profile_bend, (0.05, 5.0), boundary="periodic")
    oracle_p = hill_matrix_spectrum(m, profile_bend, 5.0, antiperiodic=False)
    got = np.array([ev.value for ev in spec_p.eigenvalues])
    assert len(got) == len(oracle_p)
    assert np.max(np.abs(np.sort(got) - oracle_p)) < 1e-6

    spec_a = spectrum(m, profile_bend, (0.05, 5.0), boundary="antiperiodic")
    oracle_a = hill_matrix_spectrum(m, profile_bend, 5.0, antiperiodic=True)
    got_a = np.array([ev.value for ev in spec_a.eigenvalues])
    assert len(got_a) == len(oracle_a)
    assert np.max(np.abs(np.sort(got_a) - oracle_a)) < 1e-6


def test_spectrum_margin_precondition():
    p = PeriodicProfile(cos=[1.0, 0.0, 0.0, 0.5])  # negative margin
    with pytest.raises(CurvatureViolation):
        spectrum(2.0, p, (0.5, 2.0))


def test_asymptotic_eigenvalue_arithmetic():
    assert asymptotic_eigenvalue(5, 2 * math.pi, 0.0) == pytest.approx(2.5)
    assert asymptotic_eigenvalue(1, math.pi, math.pi / 2) == pytest.approx(1.5)
    with pytest.raises(ValueError):
        asymptotic_eigenvalue(1, 0.0, 0.0)


def test_spectrum_asymptotic_approach(profile_bend):
    # |lam_j - asymptote(j)| * j stays bounded (checked further in acceptance)
    spec = spectrum(2.0, profile_bend, (1e-3, asymptotic_eigenvalue(16, *_b12(profile_bend))),
                    boundary="combined")
    per_slot = {}
    for ev in spec.eigenvalues:
        per_slot.setdefault(ev.j, []).append(ev.value)
    scaled = []
    for j, vals in sorted(per_slot.items()):
        if j < 4 or len(vals) != 2:
            continue
        mid = 0.5 * sum(vals)
        scaled.append(j * abs(mid - asymptotic_eigenvalue(j, spec.b1, spec.b2)))
    assert scaled and max(scaled) < 10 * max(np.median(scaled), 1e-6)


def _b12(profile):
    binv = b_invariants(2.0, profile)
    return binv.b1, binv.b2


# ---------------------------------------------------------------------------
# nonresonance
# ---------------------------------------------------------------------------


def test_nonresonance_fail_constant():
    rep = nonresonance(2 * math.pi, 0.0, 2.0, 2)
    assert not rep.passes
    assert rep.margin == pytest.approx(0.0, abs=1e-12)
    assert "b1-b2" in rep.worst


def test_nonresonance_pass_example():
    rep = nonresonance(1.0, 0.3, 2.0, 2)
    assert rep.passes
    checks = dict(rep.checks)
    assert checks["b1-b2"] == pytest.approx(0.7)
    assert checks["(2m-1)b1-b2 (m=2.0)"] == pytest.approx(abs(2.7 - math.pi))


def test_nonresonance_lattice_order3():
    rep = nonresonance(1.0, 0.3, 2.0, 3, window=6)
    assert rep.order == 3
    assert rep.margin >= 0


def test_nonresonance_integer_m_reduction():
    # for m in N the order-l condition reduces to (b2 N + b1 Z) avoiding pi Z
    rng = random.Random(21)
    for _ in range(10):
        b1 = rng.uniform(0.5, 4.0)
        b2 = rng.uniform(-1.0, 1.0)
        m = rng.choice([2, 3, 4])
        w = 5
        full = nonresonance(b1, b2, m, 3, window=w).margin
        # the reduced form needs the z-window inflated by m*w to cover z1 - m*n2
        reduced = reduced_nonresonance_gap(b1, b2, window=w * (m + 1))
        assert reduced <= full + 1e-12


# ---------------------------------------------------------------------------
# forced periodic solves
# ---------------------------------------------------------------------------


def test_periodic_solve_fixture(profile_const):
    V = (PeriodicProfile.constant(1.0), PeriodicProfile.constant(0.0))
    sol = periodic_solve(2.0, profile_const, 0.5, V)
    assert np.allclose(sol.x0, [0.0, 2.0], atol=1e-10)
    th = np.linspace(0, 2 * np.pi, 13)
    assert np.max(np.abs(sol.x1.eval(th) - 0.0)) < 1e-10
    assert np.max(np.abs(sol.x2.eval(th) - 2.0)) < 1e-10
    assert sol.periodicity_gap < 1e-8
    assert sol.residual < 1e-7


def test_periodic_solve_zero_forcing(profile_bend):
    V = (PeriodicProfile.constant(0.0), PeriodicProfile.constant(0.0))
    sol = periodic_solve(2.0, profile_bend, 0.37, V)
    th = np.linspace(0, 2 * np.pi, 13)
    assert np.max(np.abs(sol.x1.eval(th))) < 1e-12
    assert np.max(np.abs(sol.x2.eval(th))) < 1e-12


def test_periodic_solve_resonant(profile_const):
    V = (PeriodicProfile.constant(1.0), PeriodicProfile.constant(0.0))
    with pytest.raises(ResonantForcing):
        periodic_solve(2.0, profile_const, 1.0, V)


def test_periodic_solve_residual_random(profile_bend):
    rng = random.Random(14)
    for _ in range(3):
        V = (PeriodicProfile(cos=[rng.uniform(-1, 1), rng.uniform(-1, 1)]),
             PeriodicProfile(sin=[rng.uniform(-1, 1)]))
        mu = rng.uniform(0.3, 0.45)
        sol = periodic_solve(2.0, profile_bend, mu, V)
        assert sol.periodicity_gap < 1e-8
        assert sol.residual < 1e-7


# ---------------------------------------------------------------------------
# bending assembly
# ---------------------------------------------------------------------------


def test_build_order_one_constant(profile_const):
    build = build_bending(2.0, profile_const, l=1, k=1)
    surf = HomogeneousSurface(2.0, profile_const)
    fam = DeformationFamily(surf, build.fields)
    grid = surf.domain.interior_grid(15)
    assert max_bending_residual(fam, grid)[0] < 1e-7
    U = build.fields[0]
    exps = {name: [g for g, _ in comp] for name, comp in zip("uvw", U.terms)}
    assert exps["u"] == [pytest.approx(build.lam)]
    assert exps["v"] == [pytest.approx(build.lam)]
    assert exps["w"] == [pytest.approx(build.lam - 1.0)]  # lam + 1 - m with m = 2


def test_build_order_two(profile_bend):
    build = build_bending(2.0, profile_bend, l=2, k=1)
    surf = HomogeneousSurface(2.0, profile_bend)
    fam = DeformationFamily(surf, build.fields)
    grid = surf.domain.interior_grid(20)
    res = max_bending_residual(fam, grid)
    assert res[0] < 1e-7 and res[1] < 1e-6
    rep = metric_defect_order(fam, grid[::17], np.logspace(-1, -3, 7))
    assert rep.slope == pytest.approx(3.0, abs=0.1)
    # the second-order radial exponents are 2*lam-1 and 2*lam-2m+1 (+ w shifts)
    u2 = sorted(g for g, _ in build.fields[1].terms[0])
    assert u2 == pytest.approx([2 * build.lam - 3, 2 * build.lam - 1])


def test_build_resonant_constant(profile_const):
    with pytest.raises(ResonantExponent):
        build_bending(2.0, profile_const, l=2)


def test_build_margin_violation():
    p = PeriodicProfile(cos=[1.0, 0.0, 0.0, 0.5])
    with pytest.raises(CurvatureViolation):
        build_bending(2.0, p, l=1)
