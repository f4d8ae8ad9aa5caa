import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from bendkit import (
    DeformationFamily,
    GraphSurface,
    NumericalSurface,
    bending_residual,
    fundamental_data,
    is_trivial,
    metric_defect_order,
    rhs_terms,
    trivial_field,
)
from bendkit.errors import (
    DegenerateParametrization,
    DegenerateSampleSet,
    MissingLowerOrderFields,
)
from bendkit.fields import PolynomialField, ZeroField
from bendkit.polynomial import Poly2
from conftest import exact_defect_slope


# ---------------------------------------------------------------------------
# fundamental forms
# ---------------------------------------------------------------------------


def test_forms_bowl_origin(bowl):
    fd = fundamental_data(bowl, (0.0, 0.0))
    assert fd.e == pytest.approx(2.0, abs=1e-14)
    assert fd.f == pytest.approx(0.0, abs=1e-14)
    assert fd.g == pytest.approx(2.0, abs=1e-14)
    assert fd.K == pytest.approx(4.0, abs=1e-13)


def test_forms_plane(plane):
    fd = fundamental_data(plane, (0.37, -0.2))
    assert fd.e == fd.f == fd.g == 0.0
    assert fd.K == 0.0


def test_forms_bowl_off_origin(bowl):
    # symbolic oracle: K = (z_ss z_tt - z_st^2) / (1 + z_s^2 + z_t^2)^2 at (1, 0)
    fd = fundamental_data(bowl, (1.0, 0.0))
    assert fd.K == pytest.approx(4.0 / 25.0, rel=1e-13)


def test_forms_invariants(bowl):
    rng = random.Random(7)
    for _ in range(25):
        s, t = rng.uniform(-1, 1), rng.uniform(-1, 1)
        fd = fundamental_data(bowl, (s, t))
        # EG - F^2 = areaElem^2 (Lagrange identity)
        assert fd.E * fd.G - fd.F**2 == pytest.approx(fd.area_elem**2, rel=1e-12)
        assert math.hypot(*fd.N[:2]) ** 2 + fd.N[2] ** 2 == pytest.approx(1.0, rel=1e-14)
        # K * areaElem^2 = eg - f^2, relative 1e-12
        assert fd.K * fd.area_elem**2 == pytest.approx(fd.e * fd.g - fd.f**2, rel=1e-12)


def test_degenerate_parametrization():
    # R = (s, s, 0): R_s x R_t = 0 via a collapsed numerical surface
    surf = NumericalSurface(lambda s, t: (s, s, 0.0))
    with pytest.raises(DegenerateParametrization):
        fundamental_data(surf, (0.1, 0.1))


# ---------------------------------------------------------------------------
# source terms
# ---------------------------------------------------------------------------


def test_rhs_first_order_zero():
    assert rhs_terms([], 1, (0.2, 0.3)) == (0, 0, 0)


def test_rhs_second_order_example():
    # U1 = (s, 0, 0): F2 = -(u_s)^2 = -1, G2 = -2 u_s u_t = 0, H2 = 0
    U1 = PolynomialField(Poly2({(1, 0): 1}), Poly2(), Poly2())
    F2, G2, H2 = rhs_terms([U1], 2, (F(1, 3), F(2, 7)))
    assert (F2, G2, H2) == (-1, 0, 0)


def test_rhs_empty_sums():
    z = ZeroField()
    assert rhs_terms([z, z], 3, (0.1, 0.2)) == (0, 0, 0)


def test_rhs_missing_fields():
    with pytest.raises(MissingLowerOrderFields):
        rhs_terms([ZeroField()], 3, (0.0, 0.0))


def test_rhs_swap_symmetry():
    # each sum is invariant under i <-> j-i: evaluate both orderings explicitly
    rng = random.Random(3)

    def rand_field():
        coeffs = {(rng.randint(0, 2), rng.randint(0, 2)): F(rng.randint(-4, 4), rng.randint(1, 3))
                  for _ in range(4)}
        return PolynomialField(Poly2(coeffs), Poly2(coeffs), Poly2(coeffs))

    fields = [rand_field() for _ in range(3)]
    pt = (F(1, 5), F(-2, 9))
    j = 4
    direct = rhs_terms(fields, j, pt)
    reversed_ = rhs_terms(fields[::-1][:3], j, pt)  # same multiset of pairs
    # the reversed list pairs U^i with U^(j-i) in the opposite order
    assert direct == reversed_


# ---------------------------------------------------------------------------
# bending residuals
# ---------------------------------------------------------------------------


def test_residual_trivial_fields(bowl):
    rng = random.Random(11)
    for _ in range(6):
        A = [rng.uniform(-1, 1) for _ in range(3)]
        B = [rng.uniform(-1, 1) for _ in range(3)]
        fam = DeformationFamily(bowl, [trivial_field(A, B, bowl)])
        for _ in range(8):
            p = (rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9))
            r = bending_residual(fam, 1, p)
            assert max(abs(float(c)) for c in r) < 1e-9


def test_residual_nonbending_plane(plane):
    U1 = PolynomialField(Poly2({(1, 0): 1}), Poly2(), Poly2())
    fam = DeformationFamily(plane, [U1])
    r1, r2, r3 = bending_residual(fam, 1, (0.5, 0.5))
    assert r1 == 1  # x_s u_s = 1
    assert r2 == 0 and r3 == 0


def test_residual_cubic_exact(bowl, cubic_field):
    fam = DeformationFamily(bowl, [cubic_field])
    for p in [(F(2, 7), F(-3, 5)), (F(1, 2), F(1, 3)), (F(-4, 9), F(0))]:
        assert bending_residual(fam, 1, p) == (0, 0, 0)


def test_residual_order_bounds(bowl, cubic_field):
    fam = DeformationFamily(bowl, [cubic_field])
    with pytest.raises(ValueError):
        bending_residual(fam, 2, (0.0, 0.0))


# ---------------------------------------------------------------------------
# metric defect slopes
# ---------------------------------------------------------------------------

GRID = [(0.1 * i, 0.09 * j) for i in range(-3, 4) for j in range(-3, 4)]
EPS = [1e-1, 1e-2, 1e-3, 1e-4]


def test_defect_order_one(bowl, cubic_field):
    fam = DeformationFamily(bowl, [cubic_field])
    assert exact_defect_slope(bowl, fam.fields, (F(1, 3), F(1, 7))) == 2
    rep = metric_defect_order(fam, GRID, EPS)
    assert rep.slope == pytest.approx(2.0, abs=0.02)


def test_defect_zero_u1_exact_u2(bowl, cubic_field):
    # U1 = 0 and U2 an exact first-order field: dR.dU2 = 0 kills eps^2 and
    # dU1.dU2 = 0 kills eps^3, so the exact expansion starts at eps^4.
    # (An eps^4 defect needs a higher sweep to stay above the float floor.)
    fam = DeformationFamily(bowl, [ZeroField(), cubic_field])
    oracle = exact_defect_slope(bowl, fam.fields, (F(1, 3), F(1, 7)))
    assert oracle == 4
    rep = metric_defect_order(fam, GRID, list(np.logspace(-0.5, -2.5, 5)))
    assert rep.slope == pytest.approx(float(oracle), abs=0.05)


def test_defect_nonbending(plane):
    U1 = PolynomialField(Poly2({(1, 0): 1}), Poly2(), Poly2())
    fam = DeformationFamily(plane, [U1])
    assert exact_defect_slope(plane, fam.fields, (F(1, 3), F(1, 7))) == 1
    rep = metric_defect_order(fam, GRID, EPS)
    assert rep.slope == pytest.approx(1.0, abs=0.02)


def test_defect_order_two_plane_family(plane):
    # lift + compensator: an exact order-2 family; slope >= 3 - 0.1
    U1 = PolynomialField(Poly2(), Poly2(), Poly2({(1, 0): 1}))
    U2 = PolynomialField(Poly2({(1, 0): -1}), Poly2(), Poly2())
    fam = DeformationFamily(plane, [U1, U2])
    for p in [(F(1, 3), F(2, 5)), (F(-1, 2), F(1, 9))]:
        assert bending_residual(fam, 1, p) == (0, 0, 0)
        assert bending_residual(fam, 2, p) == (0, 0, 0)
    rep = metric_defect_order(fam, GRID, EPS)
    assert rep.slope >= 3 - 0.1
    assert rep.slope == pytest.approx(float(exact_defect_slope(plane, fam.fields,
                                                               (F(1, 3), F(2, 5)))), abs=0.05)


def test_defect_below_noise(plane):
    fam = DeformationFamily(plane, [ZeroField()])
    rep = metric_defect_order(fam, GRID, EPS)
    assert rep.below_noise_floor
    assert math.isnan(rep.slope)


def test_defect_input_validation(bowl, cubic_field):
    fam = DeformationFamily(bowl, [cubic_field])
    with pytest.raises(ValueError):
        metric_defect_order(fam, GRID, [1e-1, 1e-2, 1e-3])  # too few
    with pytest.raises(ValueError):
        metric_defect_order(fam, GRID, [1e-1, 9e-2, 8e-2, 7e-2])  # < 2 decades
    with pytest.raises(ValueError):
        metric_defect_order(fam, [], EPS)


def test_defect_fro_norm(bowl, cubic_field):
    fam = DeformationFamily(bowl, [cubic_field])
    rep = metric_defect_order(fam, GRID, EPS, norm="fro")
    assert rep.slope == pytest.approx(2.0, abs=0.02)


# ---------------------------------------------------------------------------
# finite-difference fallback accuracy
# ---------------------------------------------------------------------------


def test_fd_partials_richardson(bowl):
    # central differences on a polynomial graph: O(h^2) Richardson check
    def fn(s, t):
        return (s, t, s**2 + t**2 + 0.25 * s**3)

    exact = GraphSurface(Poly2({(2, 0): 1, (0, 2): 1, (3, 0): F(1, 4)}))
    errs = []
    for h in (1e-2, 5e-3, 2.5e-3):
        fd = NumericalSurface(fn, h=h)
        e = 0.0
        for ds, dt in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]:
            a = np.array(fd.partial(ds, dt, 0.3, 0.2), dtype=float)
            b = np.array(exact.partial(ds, dt, F(3, 10), F(1, 5)), dtype=float)
            e = max(e, np.max(np.abs(a - b)))
        errs.append(e)
    # halving h divides the error by ~4
    assert errs[1] < errs[0] / 3.0
    assert errs[2] < errs[1] / 3.0


# ---------------------------------------------------------------------------
# triviality
# ---------------------------------------------------------------------------


def test_trivial_field_zero(bowl):
    tf = trivial_field((0, 0, 0), (0, 0, 0), bowl)
    assert tf.partial(0, 0, 0.3, 0.4) == (0, 0, 0)


def test_trivial_field_translation(bowl):
    tf = trivial_field((0, 0, 0), (0, 0, 1), bowl)
    fam = DeformationFamily(bowl, [tf])
    assert max(abs(float(c)) for c in bending_residual(fam, 1, (0.2, -0.6))) == 0


def test_trivial_field_rotation(bowl):
    # A = e_z on z = s^2 + t^2: A x R = (-t, s, 0)
    tf = trivial_field((0, 0, 1), (0, 0, 0), bowl)
    u, v, w = tf.partial(0, 0, 0.4, -0.3)
    assert (float(u), float(v), float(w)) == pytest.approx((0.3, 0.4, 0.0), abs=1e-15)
    fam = DeformationFamily(bowl, [tf])
    assert max(abs(float(c)) for c in bending_residual(fam, 1, (0.5, 0.2))) < 1e-14


def test_is_trivial_recovers(bowl):
    A = (0.3, -0.2, 0.9)
    B = (-0.1, 0.4, 0.05)
    fit = is_trivial(trivial_field(A, B, bowl), bowl, tol=1e-8)
    assert fit.trivial
    assert np.allclose(fit.A, A, atol=1e-10)
    assert np.allclose(fit.B, B, atol=1e-10)


def test_is_trivial_rejects_cubic(bowl, cubic_field):
    fit = is_trivial(cubic_field, bowl, tol=1e-6)
    assert not fit.trivial
    assert fit.residual > 1e-3


def test_is_trivial_zero_field(bowl):
    fit = is_trivial(ZeroField(), bowl, tol=1e-10)
    assert fit.trivial
    assert np.allclose(fit.A, 0, atol=1e-12)
    assert np.allclose(fit.B, 0, atol=1e-12)


def test_is_trivial_degenerate_samples(plane):
    tf = trivial_field((0, 0, 1), (0, 0, 0), plane)
    samples = [(x, 0.0) for x in np.linspace(-1, 1, 8)]  # collinear positions
    with pytest.raises(DegenerateSampleSet):
        is_trivial(tf, plane, tol=1e-8, samples=samples)
