"""Shared fixtures and independent oracles for the test suite."""

from fractions import Fraction as F

import numpy as np
import pytest
import scipy.linalg

from bendkit import floquet as fl
from bendkit.fields import PolynomialField
from bendkit.fourier import PeriodicProfile
from bendkit.polynomial import Poly2
from bendkit.surfaces import GraphSurface, paraboloid


@pytest.fixture(scope="session")
def bowl():
    """Graph of s^2 + t^2 (positive curvature everywhere)."""
    return paraboloid()


@pytest.fixture(scope="session")
def plane():
    return GraphSurface(Poly2())


@pytest.fixture(scope="session")
def cubic_field():
    """Exact first-order bending (-2s^3/3, 2t^3/3, (s^2-t^2)/2) of the bowl."""
    return PolynomialField(
        Poly2({(3, 0): F(-2, 3)}),
        Poly2({(0, 3): F(2, 3)}),
        Poly2({(2, 0): F(1, 2), (0, 2): F(-1, 2)}),
    )


@pytest.fixture(scope="session")
def profile_const():
    return PeriodicProfile(cos=[1.0])


@pytest.fixture(scope="session")
def profile_even():
    """1 + 0.2 cos(2 theta): margin 4(1-0.04), b1 = 2 pi exactly."""
    return PeriodicProfile(cos=[1.0, 0.0, 0.2])


@pytest.fixture(scope="session")
def profile_bend():
    """1 + 0.15 cos(3 theta): positive margin and order-2 nonresonant."""
    return PeriodicProfile(cos=[1.0, 0.0, 0.0, 0.15])


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def hill_matrix_spectrum(m, profile, lam_max, antiperiodic=False, n_modes=48):
    """Fourier-space oracle for the eigenvalues of X' = lam Lam(theta) X.

    Expanding X = sum X_k e^(i k theta) turns the problem into the
    generalized eigenproblem  i k X_k = lam sum_j Lamhat_(k-j) X_j, solved
    densely.  Antiperiodic solutions shift k to half-integers.  Entirely
    independent of the monodromy-scan implementation.
    """
    cm = fl.coefficient_matrices(m, profile)
    n = 512
    theta = 2 * np.pi * np.arange(n) / n
    L = cm.lam(theta)  # (n, 2, 2)
    Lhat = np.fft.fft(L, axis=0) / n  # coefficient of e^(i k theta), k in FFT order

    ks = np.arange(-n_modes, n_modes + 1) + (0.5 if antiperiodic else 0.0)
    dim = 2 * len(ks)
    A = np.zeros((dim, dim), dtype=complex)
    B = np.zeros((dim, dim), dtype=complex)
    for a, ka in enumerate(ks):
        A[2 * a : 2 * a + 2, 2 * a : 2 * a + 2] = 1j * ka * np.eye(2)
        for b, kb in enumerate(ks):
            d = int(round(ka - kb))
            B[2 * a : 2 * a + 2, 2 * b : 2 * b + 2] = Lhat[d % n]
    vals = scipy.linalg.eig(A, B, right=False)
    vals = vals[np.isfinite(vals)]
    real = vals[np.abs(vals.imag) < 1e-7 * np.maximum(1.0, np.abs(vals.real))].real
    real = np.sort(real[(real > 1e-6) & (real < lam_max)])
    return real


def quadrature_b_invariants(m, profile):
    """b1/b2 by scipy adaptive quadrature on the raw pointwise formulas."""
    from scipy.integrate import quad

    P, P1, P2 = profile, profile.derivative(), profile.derivative(2)

    def zparts(th):
        c, s = np.cos(th), np.sin(th)
        p, p1, p2 = P.eval(th), P1.eval(th), P2.eval(th)
        zss = (m - 1) * m * c * c * p - 2 * (m - 1) * s * c * p1 + m * s * s * p + p2 * s * s
        zst = (m - 2) * m * s * c * p + (m - 1) * np.cos(2 * th) * p1 - p2 * s * c
        ztt = (m - 1) * m * s * s * p + 2 * (m - 1) * s * c * p1 + m * c * c * p + p2 * c * c
        return zss, zst, ztt, p

    def bfun(th):
        zss, zst, ztt, p = zparts(th)
        return np.sqrt(zss * ztt - zst**2) / ((m * m - m) * p)

    def cdiff(th):
        h = 1e-6
        zss, zst, ztt, _ = zparts(th)
        dztt = (zparts(th + h)[2] - zparts(th - h)[2]) / (2 * h)
        dzss = (zparts(th + h)[0] - zparts(th - h)[0]) / (2 * h)
        return zst / np.sqrt(zss * ztt - zst**2) * (dztt / ztt - dzss / zss)

    b1 = quad(bfun, 0, 2 * np.pi, limit=200)[0]
    b2 = -quad(cdiff, 0, 2 * np.pi, limit=200)[0] / 4
    return b1, b2


def exact_defect_slope(surface, fields, point):
    """Leading epsilon-power of the metric defect at one rational point.

    Expands the three metric entries of R + 2 sum eps^j U^j as exact
    polynomials in eps (fields and surface polynomial, point rational) and
    returns the lowest nonzero epsilon-degree across entries.
    """
    from bendkit.polynomial import Poly1

    s, t = point
    Rs = surface.partial(1, 0, s, t)
    Rt = surface.partial(0, 1, s, t)

    def as_poly_vec(base, derivs):
        # entries are Poly1 in eps
        vec = []
        for comp in range(3):
            coeffs = {0: base[comp]}
            for j, d in enumerate(derivs, start=1):
                coeffs[j] = 2 * d[comp]
            vec.append(Poly1(coeffs))
        return vec

    ds = as_poly_vec(Rs, [U.partial(1, 0, s, t) for U in fields])
    dt = as_poly_vec(Rt, [U.partial(0, 1, s, t) for U in fields])

    def dot(a, b):
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]

    lows = []
    for entry_eps, entry_0 in (
        (dot(ds, ds), None),
        (dot(ds, dt), None),
        (dot(dt, dt), None),
    ):
        defect = entry_eps - Poly1({0: entry_eps.coeffs.get(0, 0)})
        low = defect.lowest_degree()
        if low is not None:
            lows.append(low)
    return min(lows) if lows else None
