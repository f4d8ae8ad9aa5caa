"""Bendings of graphs of homogeneous functions z = r^m P(theta).

Everything in this module reduces to 2*pi-periodic linear systems in theta:
the homogeneous system X' = lambda * Lam(theta) * X whose spectrum supplies
the first-order field, and forced copies of it (one per radial exponent)
that supply the higher-order fields.  Radial exponents are never enumerated
by hand: fields carry (exponent, profile) term lists and the quadratic
source terms combine them mechanically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.integrate import quad, solve_ivp

from .errors import (
    CurvatureViolation,
    IntegratorFailure,
    NonIntegrableCoefficient,
    RangeTooCoarse,
    ResonantExponent,
    ResonantForcing,
    SmoothnessUnreachable,
)
from .fields import VectorField3
from .fourier import COS1, SIN1, PeriodicProfile, pointwise
from .surfaces import Annulus, ParametricSurface

TWO_PI = 2 * math.pi

# ---------------------------------------------------------------------------
# polar term calculus: finite sums  sum_i r^gamma_i * a_i(theta)
# ---------------------------------------------------------------------------


def _merge_terms(terms, tol: float = 1e-9):
    """Group terms with equal radial exponent and drop negligible profiles."""
    groups: dict = {}
    for gamma, prof in terms:
        key = round(float(gamma) / tol) * tol
        if key in groups:
            g0, p0 = groups[key]
            groups[key] = (g0, p0 + prof)
        else:
            groups[key] = (float(gamma), prof)
    out = []
    for gamma, prof in groups.values():
        prof = prof.truncate()
        mag = max(np.max(np.abs(prof.a)), np.max(np.abs(prof.b)))
        if mag > 1e-250:
            out.append((gamma, prof))
    return sorted(out, key=lambda gp: gp[0])


def polar_diff_s(terms):
    """d/ds of sum r^g a(theta):  r^(g-1) * (g cos(th) a - sin(th) a')."""
    return _merge_terms(
        (g - 1, g * (COS1 * a) - SIN1 * a.derivative()) for g, a in terms
    )


def polar_diff_t(terms):
    """d/dt of sum r^g a(theta):  r^(g-1) * (g sin(th) a + cos(th) a')."""
    return _merge_terms(
        (g - 1, g * (SIN1 * a) + COS1 * a.derivative()) for g, a in terms
    )


def polar_eval(terms, s, t):
    r = np.hypot(s, t)
    th = np.arctan2(t, s)
    acc = 0.0
    for g, a in terms:
        acc = acc + np.power(r, g) * a.eval(th)
    return acc


def polar_mul(terms1, terms2):
    return _merge_terms(
        (g1 + g2, a1 * a2) for g1, a1 in terms1 for g2, a2 in terms2
    )


def polar_add(terms1, terms2):
    return _merge_terms(list(terms1) + list(terms2))


def polar_scale(c, terms):
    return [(g, c * a) for g, a in terms]


class HomogeneousSurface(ParametricSurface):
    """Graph of z = r^m P(theta) on an annulus, m >= 2, P > 0.

    z-partials up to order 3 are exact: each differentiation acts on the
    (exponent, profile) representation, so homogeneity is preserved by
    construction.
    """

    exact_partials = True

    def __init__(self, m: float, profile: PeriodicProfile, domain: Annulus | None = None):
        if m < 2:
            raise ValueError("homogeneity order m must be >= 2")
        pmin, arg = profile.min_value()
        if pmin <= 0:
            raise ValueError(f"profile must be positive; min {pmin} at theta={arg}")
        self.m = float(m)
        self.profile = profile
        self.domain = domain if domain is not None else Annulus(0.2, 1.0)
        self._zp = {(0, 0): [(self.m, profile)]}

    def z_terms(self, i: int, j: int):
        key = (i, j)
        if key not in self._zp:
            if i > 0:
                self._zp[key] = polar_diff_s(self.z_terms(i - 1, j))
            else:
                self._zp[key] = polar_diff_t(self.z_terms(i, j - 1))
        return self._zp[key]

    def partial(self, ds: int, dt: int, s, t):
        zv = polar_eval(self.z_terms(ds, dt), s, t)
        zero = 0.0 * zv
        if (ds, dt) == (0, 0):
            return (s + zero, t + zero, zv)
        if (ds, dt) == (1, 0):
            return (1.0 + zero, zero, zv)
        if (ds, dt) == (0, 1):
            return (zero, 1.0 + zero, zv)
        return (zero, zero, zv)


class PolarField(VectorField3):
    """Vector field whose components are finite sums r^gamma a(theta)."""

    def __init__(self, u_terms, v_terms, w_terms):
        self.terms = (list(u_terms), list(v_terms), list(w_terms))
        self._cache = {(0, 0): self.terms}

    def _terms(self, ds, dt):
        key = (ds, dt)
        if key not in self._cache:
            if ds > 0:
                prev = self._terms(ds - 1, dt)
                cur = tuple(polar_diff_s(c) for c in prev)
            else:
                prev = self._terms(ds, dt - 1)
                cur = tuple(polar_diff_t(c) for c in prev)
            self._cache[key] = cur
        return self._cache[key]

    def partial(self, ds, dt, s, t):
        return tuple(polar_eval(c, s, t) for c in self._terms(ds, dt))

    def exponents(self):
        return sorted({g for comp in self.terms for g, _ in comp})

    def scaled(self, c: float) -> "PolarField":
        return PolarField(*[polar_scale(c, comp) for comp in self.terms])


# ---------------------------------------------------------------------------
# coefficient matrices of the periodic systems
# ---------------------------------------------------------------------------


def polar_hessian_profiles(m: float, profile: PeriodicProfile):
    """The theta-parts of (z_ss, z_st, z_tt) for z = r^m P (coefficients of r^(m-2))."""
    P = profile
    P1 = profile.derivative()
    P2 = profile.derivative(2)
    cos_sq = COS1 * COS1
    sin_sq = SIN1 * SIN1
    sincos = SIN1 * COS1
    cos_2t = PeriodicProfile(cos=[0.0, 0.0, 1.0])
    zss = (m - 1) * m * (P * cos_sq) - 2 * (m - 1) * (P1 * sincos) + m * (P * sin_sq) + P2 * sin_sq
    zst = (m - 2) * m * (P * sincos) + (m - 1) * (P1 * cos_2t) - P2 * sincos
    ztt = (m - 1) * m * (P * sin_sq) + 2 * (m - 1) * (P1 * sincos) + m * (P * cos_sq) + P2 * cos_sq
    return zss.truncate(), zst.truncate(), ztt.truncate()


def polar_hessian(m: float, profile: PeriodicProfile, theta):
    """(z_ss, z_st, z_tt) theta-functions evaluated at ``theta``."""
    zss, zst, ztt = polar_hessian_profiles(m, profile)
    return zss.eval(theta), zst.eval(theta), ztt.eval(theta)


def margin_profile(m: float, profile: PeriodicProfile) -> PeriodicProfile:
    """m^2 P^2 + m P P'' - (m-1) P'^2, the positivity certificate integrand."""
    P = profile
    P1 = profile.derivative()
    P2 = profile.derivative(2)
    return (m * m * (P * P) + m * (P * P2) - (m - 1) * (P1 * P1)).truncate()


def curvature_margin(m: float, profile: PeriodicProfile) -> float:
    """min over theta of m^2 P^2 + m P P'' - (m-1) P'^2 (grid + refinement)."""
    return margin_profile(m, profile).min_value()[0]


def margin_violations(m: float, profile: PeriodicProfile, n: int = 2048):
    """theta locations where the positivity margin is <= 0."""
    q = margin_profile(m, profile)
    th = 2 * np.pi * np.arange(n) / n
    v = q.samples(n)
    return [float(x) for x in th[v <= 0]]


@dataclass
class CoefficientMatrices:
    """Lam(theta) of X' = lambda Lam X and its Hamiltonian form H = J Lam."""

    m: float
    profile: PeriodicProfile
    zss: PeriodicProfile
    zst: PeriodicProfile
    ztt: PeriodicProfile

    def _den(self, theta):
        return (self.m * self.m - self.m) * self.profile.eval(theta)

    def lam(self, theta):
        """Lam(theta); trace-free by construction.  Shape (..., 2, 2)."""
        d = self._den(theta)
        a = self.zst.eval(theta) / d
        b = -self.zss.eval(theta) / d
        c = self.ztt.eval(theta) / d
        out = np.empty(np.shape(a) + (2, 2))
        out[..., 0, 0] = a
        out[..., 0, 1] = b
        out[..., 1, 0] = c
        out[..., 1, 1] = -a
        return out

    def ham(self, theta):
        """H = J Lam, symmetric and positive definite under the margin condition."""
        d = self._den(theta)
        h11 = self.ztt.eval(theta) / d
        h12 = -self.zst.eval(theta) / d
        h22 = self.zss.eval(theta) / d
        out = np.empty(np.shape(h11) + (2, 2))
        out[..., 0, 0] = h11
        out[..., 0, 1] = h12
        out[..., 1, 0] = h12
        out[..., 1, 1] = h22
        return out


def coefficient_matrices(m: float, profile: PeriodicProfile) -> CoefficientMatrices:
    pmin, arg = profile.min_value()
    if pmin <= 0:
        raise ValueError(f"profile must be positive; min {pmin} at theta={arg}")
    zss, zst, ztt = polar_hessian_profiles(m, profile)
    return CoefficientMatrices(m=float(m), profile=profile, zss=zss, zst=zst, ztt=ztt)


# ---------------------------------------------------------------------------
# b1 / b2 invariants
# ---------------------------------------------------------------------------


@dataclass
class BInvariants:
    b1: float
    b2: float
    singular_flags: list
    error_bound: float


def b_invariants(m: float, profile: PeriodicProfile, n: int = 8192) -> BInvariants:
    """b1 = integral of sqrt(det H); b2 = -(1/4) integral of (c1 - c2).

    c_i couple z_st with the logarithmic theta-derivatives of z_tt and z_ss.
    Sub-intervals where z_ss or z_tt pass through zero are flagged, excised,
    and the excised integrals are extrapolated by shrinking the window; the
    procedure raises NonIntegrableCoefficient when that refinement diverges.
    """
    cm = coefficient_matrices(m, profile)
    zss, zst, ztt = cm.zss, cm.zst, cm.ztt
    disc = (zss * ztt - zst * zst).truncate()  # equals (m-1) * margin

    th = 2 * np.pi * np.arange(n) / n
    vss = zss.samples(n)
    vtt = ztt.samples(n)
    vdisc = disc.samples(n)
    den = (m * m - m) * profile.samples(n)

    def b_vals(x):
        return np.sqrt(np.maximum(disc.eval(x), 0.0)) / ((m * m - m) * profile.eval(x))

    def c_diff_vals(x):
        d = disc.eval(x)
        return (zst.eval(x) / np.sqrt(d)) * (
            ztt.derivative().eval(x) / ztt.eval(x) - zss.derivative().eval(x) / zss.eval(x)
        )

    scale = max(np.max(np.abs(vss)), np.max(np.abs(vtt)))
    bad = (np.abs(vss) < 1e-9 * scale) | (np.abs(vtt) < 1e-9 * scale) | (vdisc <= 0)
    if not np.any(bad):
        # smooth periodic integrands: uniform trapezoid is spectrally accurate
        b1 = float(np.mean(np.sqrt(vdisc) / den) * TWO_PI)
        c1c2 = (zst.samples(n) / np.sqrt(vdisc)) * (
            ztt.derivative().samples(n) / vtt - zss.derivative().samples(n) / vss
        )
        b2 = float(-np.mean(c1c2) / 4 * TWO_PI)
        return BInvariants(b1=b1, b2=b2, singular_flags=[], error_bound=0.0)

    # flagged path: excise windows around the zeros and extrapolate
    centers = th[bad]
    windows = _cluster_windows(centers, 2 * np.pi / n)
    b1 = _excised_integral(b_vals, windows, depth=40)
    b2_val, err = _excised_integral_extrap(c_diff_vals, windows, depth=40)
    return BInvariants(b1=b1, b2=-b2_val / 4, singular_flags=windows, error_bound=err / 4)


def _cluster_windows(centers, h):
    windows = []
    for c in np.sort(centers):
        if windows and c - windows[-1][1] < 4 * h:
            windows[-1] = (windows[-1][0], c + 2 * h)
        else:
            windows.append((c - 2 * h, c + 2 * h))
    return [(float(a), float(b)) for a, b in windows]


def _complement_segments(windows):
    segs = []
    pos = 0.0
    for a, b in sorted(windows):
        if a > pos:
            segs.append((pos, a))
        pos = max(pos, b)
    if pos < TWO_PI:
        segs.append((pos, TWO_PI))
    return segs


def _excised_integral(fn, windows, depth):
    total = 0.0
    for a, b in _complement_segments(windows):
        val, _ = quad(fn, a, b, limit=depth * 5)
        total += val
    return total


def _excised_integral_extrap(fn, windows, depth):
    prev = None
    history = []
    growth = 0
    for k in range(depth):
        shrink = 2.0**-k
        wins = [((a + b) / 2 - (b - a) / 2 * shrink, (a + b) / 2 + (b - a) / 2 * shrink)
                for a, b in windows]
        total = 0.0
        for a, b in _complement_segments(wins):
            val, _ = quad(fn, a, b, limit=200)
            total += val
        if prev is not None:
            delta = abs(total - prev)
            history.append(delta)
            if len(history) >= 3 and history[-1] > history[-2] > history[-3] and history[-1] > 1e-6:
                raise NonIntegrableCoefficient(
                    f"excised integral diverges near windows {windows}"
                )
            if delta < 1e-10 * max(1.0, abs(total)):
                return total, delta
        prev = total
    return prev, history[-1] if history else float("inf")


# ---------------------------------------------------------------------------
# monodromy and the spectrum of X' = lambda Lam(theta) X
# ---------------------------------------------------------------------------


def _flow_batch(cm: CoefficientMatrices, lams, *, sensitivity=False, rtol=1e-12, atol=1e-14,
                t_eval=None):
    """Fundamental matrices Phi_lam(2*pi) for a batch of lambda values.

    With sensitivity=True also returns dPhi/dlambda, integrated alongside.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    k = len(lams)
    blocks = 2 if sensitivity else 1
    y0 = np.zeros((blocks, k, 2, 2))
    y0[0] = np.eye(2)

    def rhs(theta, y):
        Y = y.reshape(blocks, k, 2, 2)
        L = cm.lam(theta)  # (2, 2)
        out = np.empty_like(Y)
        lphi = np.einsum("ab,kbc->kac", L, Y[0])
        out[0] = lams[:, None, None] * lphi
        if sensitivity:
            out[1] = lphi + lams[:, None, None] * np.einsum("ab,kbc->kac", L, Y[1])
        return out.ravel()

    sol = solve_ivp(rhs, (0.0, TWO_PI), y0.ravel(), method="DOP853", rtol=rtol, atol=atol,
                    t_eval=t_eval, dense_output=False)
    if not sol.success:
        raise IntegratorFailure(sol.message)
    if t_eval is not None:
        ys = sol.y.T.reshape(len(sol.t), blocks, k, 2, 2)
        return ys
    Y = sol.y[:, -1].reshape(blocks, k, 2, 2)
    return (Y[0], Y[1]) if sensitivity else Y[0]


def monodromy(m: float, profile: PeriodicProfile, lam: float, rtol: float = 1e-12) -> np.ndarray:
    """Phi_lambda(2*pi), the fundamental solution over one period from identity."""
    cm = coefficient_matrices(m, profile)
    phi = _flow_batch(cm, [lam], rtol=rtol)[0]
    det = float(np.linalg.det(phi))
    if abs(det - 1.0) > 1e-6:
        raise IntegratorFailure(f"det Phi = {det}, integration inaccurate")
    return phi


@dataclass(frozen=True)
class Eigenvalue:
    value: float
    j: int                  # slot index in the combined sequence, counted from 0+
    tag: str                # "-" or "+" within the slot
    boundary: str           # "periodic" (trace=+2) or "antiperiodic" (trace=-2)
    multiplicity: int       # 2 when the slot is a double root, else 1
    jordan: bool = False    # double trace-root without Phi = +/-I


@dataclass
class SpectralData:
    b1: float
    b2: float
    eigenvalues: list
    singular_flags: list = dc_field(default_factory=list)
    has_zero_eigenvalue: bool = True


DOUBLE_ROOT_TOL = 1e-7
MATRIX_ID_TOL = 1e-6


def _refine_extrema(cm, brackets):
    """Solve trace'(lam) = 0 inside each bracket by safeguarded Newton."""
    if not brackets:
        return []
    lam = np.array([(a + b) / 2 for a, b in brackets])
    lo = np.array([a for a, _ in brackets])
    hi = np.array([b for _, b in brackets])
    h = 1e-7
    for _ in range(8):
        tr_p = np.einsum("kaa->k", _flow_batch(cm, lam + h, sensitivity=True)[1])
        tr_m = np.einsum("kaa->k", _flow_batch(cm, lam - h, sensitivity=True)[1])
        phi, dphi = _flow_batch(cm, lam, sensitivity=True)
        g = np.einsum("kaa->k", dphi)
        gpp = (tr_p - tr_m) / (2 * h)
        step = np.where(np.abs(gpp) > 1e-30, -g / np.where(gpp == 0, 1, gpp), 0.0)
        lam = np.clip(lam + step, lo, hi)
        if np.max(np.abs(step)) < 1e-13:
            break
    phi, dphi = _flow_batch(cm, lam, sensitivity=True)
    return [(float(l), phi[i]) for i, l in enumerate(lam)]


def _refine_roots(cm, brackets, tau):
    """Solve trace(lam) = tau inside sign-change brackets by damped Newton."""
    if not brackets:
        return []
    lam = np.array([(a + b) / 2 for a, b in brackets])
    lo = np.array([min(a, b) for a, b in brackets])
    hi = np.array([max(a, b) for a, b in brackets])
    for _ in range(14):
        phi, dphi = _flow_batch(cm, lam, sensitivity=True)
        f = np.einsum("kaa->k", phi) - tau
        fp = np.einsum("kaa->k", dphi)
        step = -f / np.where(np.abs(fp) < 1e-30, 1e-30, fp)
        lam = np.clip(lam + step, lo, hi)
        if np.max(np.abs(step)) < 1e-14 * np.maximum(1.0, np.max(np.abs(lam))):
            break
    return [float(l) for l in lam]


def _scan_boundary(cm, grid, tr, dtr, tau):
    """Roots of trace = tau on the grid: simple crossings plus tangencies."""
    f = tr - tau
    roots = []
    # tangency candidates: extrema of the right orientation
    ext_brackets = []
    for i in range(len(grid) - 1):
        if dtr[i] == 0.0 and dtr[i + 1] == 0.0:
            continue
        if dtr[i] > 0 >= dtr[i + 1] and tau > 0:
            ext_brackets.append((grid[i], grid[i + 1]))
        elif dtr[i] < 0 <= dtr[i + 1] and tau < 0:
            ext_brackets.append((grid[i], grid[i + 1]))
    extrema = _refine_extrema(cm, ext_brackets)

    # refined node sequence: grid nodes + extremum nodes.  Extremum values
    # within the double-root tolerance are clamped to the closed-gap side so
    # integration noise cannot spawn spurious crossing brackets (Newton on a
    # tangency converges only linearly and would return a bad root).
    nodes = [(float(g), float(fv)) for g, fv in zip(grid, f)]
    ext_info = {}
    for lam_e, phi_e in extrema:
        fe = float(np.trace(phi_e) - tau)
        clamped = fe
        if abs(fe) <= DOUBLE_ROOT_TOL:
            clamped = -1e-300 if tau > 0 else 1e-300
        nodes.append((lam_e, clamped))
        ext_info[lam_e] = (fe, phi_e)
    nodes.sort()

    simple_brackets = []
    for (x0, f0), (x1, f1) in zip(nodes[:-1], nodes[1:]):
        if f0 == 0.0:
            continue
        if f0 * f1 < 0:
            simple_brackets.append((x0, x1))
    simple = _refine_roots(cm, simple_brackets, tau)
    for r in simple:
        roots.append((r, 1, False))

    for lam_e, (fe, phi_e) in ext_info.items():
        if any(abs(r - lam_e) < 5e-4 for r, _, _ in roots):
            continue  # open gap already resolved by the flanking crossings
        if abs(fe) <= DOUBLE_ROOT_TOL:
            target = np.eye(2) if tau > 0 else -np.eye(2)
            jordan = bool(np.max(np.abs(phi_e - target)) >= MATRIX_ID_TOL)
            roots.append((lam_e, 2, jordan))
    return roots


def spectrum(
    m: float,
    profile: PeriodicProfile,
    lam_range,
    boundary: str = "periodic",
    grid_step: float | None = None,
    rtol: float = 1e-12,
) -> SpectralData:
    """Locate eigenvalues of X' = lambda Lam(theta) X over ``lam_range``.

    lambda is an eigenvalue of the periodic (antiperiodic) problem exactly
    when trace Phi_lambda(2*pi) = +2 (-2).  The scan always starts near 0 so
    that the slot index j counts the combined sequence
    lam_1^- <= lam_1^+ < lam_2^- <= ... ; ``boundary`` filters the output
    ("periodic", "antiperiodic", or "combined").
    """
    if boundary not in ("periodic", "antiperiodic", "combined"):
        raise ValueError("boundary must be periodic | antiperiodic | combined")
    lo_req, hi_req = float(lam_range[0]), float(lam_range[1])
    margin = curvature_margin(m, profile)
    if margin <= 0:
        raise CurvatureViolation(margin, margin_violations(m, profile))
    cm = coefficient_matrices(m, profile)
    binv = b_invariants(m, profile)
    b1 = binv.b1

    slot_width = math.pi / b1
    hi_scan = hi_req + 2.2 * slot_width
    step = grid_step if grid_step is not None else min(b1 / (8 * math.pi), math.pi / (8 * b1))
    n_pts = max(int(math.ceil((hi_scan - 1e-3) / step)) + 1, 8)
    grid = np.linspace(1e-3, hi_scan, n_pts)

    phi, dphi = _flow_batch(cm, grid, sensitivity=True, rtol=rtol)
    tr = np.einsum("kaa->k", phi)
    dtr = np.einsum("kaa->k", dphi)

    dets = np.linalg.det(phi)
    if np.max(np.abs(dets - 1.0)) > 1e-6:
        raise IntegratorFailure("det Phi drifted from 1 during the scan")

    found = []
    for tau, bname in ((2.0, "periodic"), (-2.0, "antiperiodic")):
        for lam, mult, jordan in _scan_boundary(cm, grid, tr, dtr, tau):
            found.append((lam, bname, mult, jordan))
    found.sort(key=lambda rec: rec[0])

    expanded = []
    for lam, bname, mult, jordan in found:
        for _ in range(mult):
            expanded.append((lam, bname, mult, jordan))

    eigenvalues = []
    for slot in range(len(expanded) // 2):
        lo_e = expanded[2 * slot]
        hi_e = expanded[2 * slot + 1]
        if lo_e[1] != hi_e[1]:
            raise RangeTooCoarse(
                f"slot {slot + 1} mixes boundaries ({lo_e[0]}, {hi_e[0]}); decrease grid_step"
            )
        for rec, tag in ((lo_e, "-"), (hi_e, "+")):
            eigenvalues.append(
                Eigenvalue(value=rec[0], j=slot + 1, tag=tag, boundary=rec[1],
                           multiplicity=rec[2], jordan=rec[3])
            )

    keep = [
        ev
        for ev in eigenvalues
        if lo_req - 1e-12 <= ev.value <= hi_req + 1e-12
        and (boundary == "combined" or ev.boundary == boundary)
    ]
    return SpectralData(b1=binv.b1, b2=binv.b2, eigenvalues=keep,
                        singular_flags=binv.singular_flags)


def asymptotic_eigenvalue(j: int, b1: float, b2: float) -> float:
    """Leading asymptotic law j*pi/b1 + b2/b1 for the combined slot index j."""
    if b1 <= 0:
        raise ValueError("b1 must be positive")
    return j * math.pi / b1 + b2 / b1


# ---------------------------------------------------------------------------
# non-resonance lattice checks
# ---------------------------------------------------------------------------


def _dist_to_pi_lattice(x: float) -> float:
    return abs(x - math.pi * round(x / math.pi))


@dataclass
class NonresonanceReport:
    passes: bool
    margin: float
    order: int
    checks: list          # (description, achieved distance)
    worst: str


def nonresonance(b1: float, b2: float, m: float, l: int, window: int = 10,
                 tol: float = 1e-6) -> NonresonanceReport:
    """Lattice-avoidance certificate for the order-l construction.

    Order 2 checks dist(b1 - b2, pi*Z) and dist((2m-1)b1 - b2, pi*Z); higher
    orders enumerate n1*b2 + z1*b1 vs m*n2*b1 + pi*Z with |integers| <=
    window (N = {1, 2, ...}).
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    checks = []
    if l <= 2:
        checks.append(("b1-b2", _dist_to_pi_lattice(b1 - b2)))
        checks.append((f"(2m-1)b1-b2 (m={m})", _dist_to_pi_lattice((2 * m - 1) * b1 - b2)))
    else:
        for n1 in range(1, window + 1):
            for z1 in range(-window, window + 1):
                for n2 in range(1, window + 1):
                    val = n1 * b2 + z1 * b1 - m * n2 * b1
                    checks.append((f"{n1}*b2+{z1}*b1-{m}*{n2}*b1", _dist_to_pi_lattice(val)))
    worst = min(checks, key=lambda c: c[1])
    return NonresonanceReport(
        passes=worst[1] > tol,
        margin=worst[1],
        order=l,
        checks=checks if l <= 2 else [worst],
        worst=worst[0],
    )


def reduced_nonresonance_gap(b1: float, b2: float, window: int = 10) -> float:
    """min dist(n1*b2 + z1*b1, pi*Z) — the integer-m reduction of the lattice check."""
    best = math.inf
    for n1 in range(1, window + 1):
        for z1 in range(-window, window + 1):
            best = min(best, _dist_to_pi_lattice(n1 * b2 + z1 * b1))
    return best


# ---------------------------------------------------------------------------
# forced periodic solves
# ---------------------------------------------------------------------------


@dataclass
class PeriodicSolution:
    x1: PeriodicProfile
    x2: PeriodicProfile
    x0: np.ndarray
    periodicity_gap: float
    residual: float


RESONANCE_COND_TOL = 1e-9


def periodic_solve(m: float, profile: PeriodicProfile, mu: float, V,
                   n_samples: int = 2048, rtol: float = 1e-12) -> PeriodicSolution:
    """Unique 2*pi-periodic solution of X' = mu Lam(theta) X + V(theta).

    X(0) = (I - Phi(2pi))^-1 Phi(2pi) Int_0^2pi Phi(s)^-1 V(s) ds, then X is
    propagated.  Raises ResonantForcing when I - Phi(2pi) is numerically
    singular, i.e. mu hit the periodic spectrum.
    """
    cm = coefficient_matrices(m, profile)
    v1, v2 = V

    def vfun(theta):
        return np.array([v1.eval(theta), v2.eval(theta)])

    mu = float(mu)

    def rhs(theta, y):
        phi = y[:4].reshape(2, 2)
        L = cm.lam(theta)
        dphi = mu * (L @ phi)
        det = phi[0, 0] * phi[1, 1] - phi[0, 1] * phi[1, 0]
        inv = np.array([[phi[1, 1], -phi[0, 1]], [-phi[1, 0], phi[0, 0]]]) / det
        dq = inv @ vfun(theta)
        return np.concatenate([dphi.ravel(), dq])

    thetas = np.linspace(0.0, TWO_PI, n_samples + 1)
    y0 = np.concatenate([np.eye(2).ravel(), np.zeros(2)])
    sol = solve_ivp(rhs, (0.0, TWO_PI), y0, method="DOP853", rtol=rtol, atol=1e-14,
                    t_eval=thetas)
    if not sol.success:
        raise IntegratorFailure(sol.message)
    phis = sol.y[:4].T.reshape(-1, 2, 2)
    qs = sol.y[4:].T

    phi_end = phis[-1]
    A = np.eye(2) - phi_end
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] < RESONANCE_COND_TOL * max(1.0, float(np.max(np.abs(phi_end)))):
        raise ResonantForcing(mu)
    x0 = np.linalg.solve(A, phi_end @ qs[-1])

    xs = np.einsum("kab,kb->ka", phis, x0[None, :] + qs)
    gap = float(np.max(np.abs(xs[-1] - xs[0])))
    scale = max(float(np.max(np.abs(xs))), 1e-300)
    x1 = PeriodicProfile.from_samples(xs[:-1, 0]).truncate(1e-13, ref=scale)
    x2 = PeriodicProfile.from_samples(xs[:-1, 1]).truncate(1e-13, ref=scale)

    # pointwise ODE residual on a check grid, via exact profile derivatives
    chk = np.linspace(0.0, TWO_PI, 97)
    L = cm.lam(chk)
    X = np.stack([x1.eval(chk), x2.eval(chk)], axis=-1)
    dX = np.stack([x1.derivative().eval(chk), x2.derivative().eval(chk)], axis=-1)
    Vv = np.stack([v1.eval(chk), v2.eval(chk)], axis=-1)
    res = dX - mu * np.einsum("kab,kb->ka", L, X) - Vv
    return PeriodicSolution(x1=x1, x2=x2, x0=x0, periodicity_gap=gap,
                            residual=float(np.max(np.abs(res))))


# ---------------------------------------------------------------------------
# bending assembly
# ---------------------------------------------------------------------------


@dataclass
class BendingBuild:
    fields: list            # PolarField, orders 1..l
    lam: float
    slot: int
    spectral: SpectralData
    nonres: NonresonanceReport | None
    min_exponent: float


def _eigenfunction_profiles(cm, lam, n_samples=2048, rtol=1e-12):
    """Periodic eigenfunction X(theta) of X' = lam Lam X as two profiles."""
    thetas = np.linspace(0.0, TWO_PI, n_samples + 1)
    ys = _flow_batch(cm, [lam], rtol=rtol, t_eval=thetas)
    phis = ys[:, 0, 0]  # (len, 2, 2)
    U, S, Vt = np.linalg.svd(phis[-1] - np.eye(2))
    x0 = Vt[-1]
    if abs(x0[0]) >= abs(x0[1]):
        x0 = x0 * np.sign(x0[0])
    else:
        x0 = x0 * np.sign(x0[1])
    xs = phis @ x0
    scale = max(float(np.max(np.abs(xs))), 1e-300)
    wrap = float(np.max(np.abs(xs[-1] - xs[0])))
    if wrap > 1e-7 * scale:
        raise IntegratorFailure(
            f"eigenfunction at lam={lam} fails to close up (gap {wrap:.2e}); "
            "the eigenvalue is not accurate enough"
        )
    x1 = PeriodicProfile.from_samples(xs[:-1, 0]).truncate(1e-13, ref=scale)
    x2 = PeriodicProfile.from_samples(xs[:-1, 1]).truncate(1e-13, ref=scale)
    return x1, x2, float(S[-1])


def _phi_exponent_profile(profile, m, gamma, x):
    """r-frame profile of rho^gamma * x(theta):  P(theta)^(gamma/m) * x(theta)."""
    deg = max(profile.degree, x.degree, 1)
    return pointwise(lambda th: np.power(profile.eval(th), gamma / m) * x.eval(th),
                     n=max(16 * deg + 64, 256))


def _forcing_profiles(cm, gamma, fgh):
    """V(theta) = P^(-(gamma+1)/m) * T(theta) * (F, G, H) for one radial exponent."""
    m = cm.m
    P = cm.profile
    zss, zst, ztt = cm.zss, cm.zst, cm.ztt
    fF, fG, fH = fgh
    deg = max(P.degree, zss.degree, fF.degree, fG.degree, fH.degree, 1)

    def vrow(th, row):
        c = np.cos(th)
        s = np.sin(th)
        if row == 0:
            combo = ((-2 * zst.eval(th) * c - ztt.eval(th) * s) * fF.eval(th)
                     + zss.eval(th) * c * fG.eval(th)
                     + zss.eval(th) * s * fH.eval(th))
        else:
            combo = (-ztt.eval(th) * c * fF.eval(th)
                     - ztt.eval(th) * s * fG.eval(th)
                     + (zss.eval(th) * c + 2 * zst.eval(th) * s) * fH.eval(th))
        den = (m * m - m) * P.eval(th)
        return combo / den * np.power(P.eval(th), -(gamma + 1) / m)

    n = max(16 * deg + 64, 256)
    return (pointwise(lambda th: vrow(th, 0), n=n), pointwise(lambda th: vrow(th, 1), n=n))


def _polar_rhs_terms(fields, j):
    """(F^j, G^j, H^j) as polar term lists from fields U^1..U^(j-1)."""
    F: list = []
    G: list = []
    H: list = []
    for i in range(1, j):
        Ui = fields[i - 1]
        Uk = fields[j - i - 1]
        for comp in range(3):
            dsi = Ui._terms(1, 0)[comp]
            dti = Ui._terms(0, 1)[comp]
            dsk = Uk._terms(1, 0)[comp]
            dtk = Uk._terms(0, 1)[comp]
            F = polar_add(F, polar_scale(-1.0, polar_mul(dsk, dsi)))
            H = polar_add(H, polar_scale(-1.0, polar_mul(dtk, dti)))
            G = polar_add(G, polar_scale(-1.0, polar_add(polar_mul(dsi, dtk),
                                                         polar_mul(dti, dsk))))
    return F, G, H


def _assemble_field(cm, phi_terms, psi_terms, F_terms, H_terms):
    """w = (phi_s + psi_t - F - H) / (z_ss + z_tt); u = phi - z_s w; v = psi - z_t w."""
    m = cm.m
    P = cm.profile
    trace_prof = (cm.zss + cm.ztt).truncate()  # theta-part of z_ss + z_tt
    numer = polar_add(polar_add(polar_diff_s(phi_terms), polar_diff_t(psi_terms)),
                      polar_scale(-1.0, polar_add(F_terms, H_terms)))
    w_terms = []
    for g, a in numer:
        q = pointwise(lambda th, a=a: a.eval(th) / trace_prof.eval(th),
                      n=max(16 * (a.degree + trace_prof.degree + 2), 256))
        w_terms.append((g - (m - 2), q))
    w_terms = _merge_terms(w_terms)

    zs = [(m - 1, (m * (COS1 * P) - SIN1 * P.derivative()).truncate())]
    zt = [(m - 1, (m * (SIN1 * P) + COS1 * P.derivative()).truncate())]
    u_terms = polar_add(phi_terms, polar_scale(-1.0, polar_mul(zs, w_terms)))
    v_terms = polar_add(psi_terms, polar_scale(-1.0, polar_mul(zt, w_terms)))
    return PolarField(u_terms, v_terms, w_terms)


def build_bending(
    m: float,
    profile: PeriodicProfile,
    p: int | None = None,
    l: int = 1,
    k: int = 1,
    max_slot: int = 40,
    nonres_window: int = 10,
    nonres_tol: float = 1e-6,
    normalize: bool = True,
) -> BendingBuild:
    """Construct bending fields U^1..U^l for the graph of z = r^m P(theta).

    Order 1 takes the periodic eigenfunction at an eigenvalue lam_p and sets
    (phi, psi) = rho^lam_p X(theta) with rho = r P^(1/m).  Each higher order
    collects the radial exponents of its quadratic sources, solves one
    forced periodic system per exponent, and reassembles (u, v, w).

    ``p`` pins the combined slot index of the eigenvalue (it must be a
    periodic slot); with p=None the smallest admissible slot is searched.
    ``k`` requires every radial exponent to be >= k (C^k at the origin).
    """
    if l < 1:
        raise ValueError("target order l must be >= 1")
    margin = curvature_margin(m, profile)
    if margin <= 0:
        raise CurvatureViolation(margin, margin_violations(m, profile))

    cm = coefficient_matrices(m, profile)
    binv = b_invariants(m, profile)
    nonres = None
    if l >= 2:
        nonres = nonresonance(binv.b1, binv.b2, m, l, window=nonres_window, tol=nonres_tol)
        if not nonres.passes:
            raise ResonantExponent(
                None, f"lattice collision {nonres.worst} (margin {nonres.margin:.3e})"
            )

    horizon = max(8, (p + 2) if p is not None else 8)
    tried: set = set()
    last_error = None
    while True:
        hi = asymptotic_eigenvalue(horizon, binv.b1, binv.b2) + math.pi / binv.b1
        spec = spectrum(m, profile, (1e-3, hi), boundary="periodic")

        slots: dict = {}
        for ev in spec.eigenvalues:
            slots.setdefault(ev.j, {})[ev.tag] = ev
        candidates = []
        for j in sorted(slots):
            for tag in ("-", "+"):
                if tag in slots[j]:
                    ev = slots[j][tag]
                    if not candidates or abs(candidates[-1][1] - ev.value) > 1e-10:
                        candidates.append(((j, tag), ev.value))
        if p is not None:
            candidates = [c for c in candidates if c[0][0] == p]
            if not candidates:
                raise ValueError(f"slot {p} holds no periodic eigenvalue in the searched range")

        for (slot, tag), lam_p in candidates:
            if (slot, tag) in tried:
                continue
            tried.add((slot, tag))
            # order-1 smoothness precheck: the w-exponent lam_p + 1 - m is minimal
            if lam_p + 1 - m < k - 1e-12 or l * lam_p - (2 * l - 1) * m + 2 < k - 1e-12:
                continue
            try:
                fields = _try_build(cm, lam_p, l)
            except ResonantForcing as exc:
                last_error = ResonantExponent(exc.mu, f"slot {slot}{tag}, lam_p={lam_p}")
                if p is not None:
                    raise last_error from exc
                continue
            min_exp = min(g for U in fields for comp in U.terms for g, _ in comp)
            if min_exp < k - 1e-12:
                last_error = SmoothnessUnreachable(
                    f"slot {slot}{tag}: min exponent {min_exp} < k={k}"
                )
                if p is not None:
                    raise last_error
                continue
            if normalize:
                peak = max(
                    max(np.max(np.abs(a.a)), np.max(np.abs(a.b)))
                    for comp in fields[0].terms if comp for _, a in comp
                )
                fields = [U.scaled(peak ** -(j + 1)) for j, U in enumerate(fields)]
            return BendingBuild(fields=fields, lam=lam_p, slot=slot, spectral=spec,
                                nonres=nonres, min_exponent=min_exp)

        if horizon >= max_slot or p is not None:
            break
        horizon = min(2 * horizon, max_slot)

    if last_error is not None:
        raise last_error
    raise SmoothnessUnreachable(
        f"no periodic eigenvalue below slot {max_slot} satisfies the exponent bound k={k}"
    )


def _try_build(cm, lam_p, l):
    m = cm.m
    x1, x2, _ = _eigenfunction_profiles(cm, lam_p)
    phi_terms = [(lam_p, _phi_exponent_profile(cm.profile, m, lam_p, x1))]
    psi_terms = [(lam_p, _phi_exponent_profile(cm.profile, m, lam_p, x2))]
    fields = [_assemble_field(cm, phi_terms, psi_terms, [], [])]

    for j in range(2, l + 1):
        F, G, H = _polar_rhs_terms(fields, j)
        exps = sorted({g for terms in (F, G, H) for g, _ in terms})
        phi_terms = []
        psi_terms = []
        zero = PeriodicProfile.constant(0.0)
        fmap = {round(g, 9): a for g, a in F}
        gmap = {round(g, 9): a for g, a in G}
        hmap = {round(g, 9): a for g, a in H}
        for g in exps:
            key = round(g, 9)
            V = _forcing_profiles(cm, g, (fmap.get(key, zero), gmap.get(key, zero),
                                          hmap.get(key, zero)))
            sol = periodic_solve(m, cm.profile, g + 1, V)
            phi_terms.append((g + 1, _phi_exponent_profile(cm.profile, m, g + 1, sol.x1)))
            psi_terms.append((g + 1, _phi_exponent_profile(cm.profile, m, g + 1, sol.x2)))
        fields.append(_assemble_field(cm, _merge_terms(phi_terms), _merge_terms(psi_terms),
                                      F, H))
    return fields
