"""Complex asymptotic-direction field and the reduction residual certificate.

Where K > 0 the complex field L = g d/ds + lambda d/dt (lambda the root of
lambda^2 + 2 f lambda + e g = 0 with positive imaginary part) reduces the
three bending equations to one first-order complex equation

    C L h = A h - B conj(h) + C (g^2 F + g lam G + lam^2 H),   h = LR . U.

Evaluating the left-minus-right of that identity gives an independent
pointwise certificate for candidate bending fields; no complex equation is
ever solved here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import FlatPointDegeneracy, NegativeCurvature, SingularConversion
from .fields import VectorField3
from .surface_core import fundamental_data, rhs_terms
from .surfaces import ParametricSurface
from .vec3 import add3, cross3, dot3, scale3


@dataclass(frozen=True)
class AsymptoticData:
    """Coefficients (g, lambda) of L = g d/ds + lambda d/dt."""

    g: float
    lam: complex
    e: float
    f: float

    def quadratic_residual(self) -> complex:
        """lambda^2 + 2 f lambda + e g, zero by construction."""
        return self.lam * self.lam + 2 * self.f * self.lam + self.e * self.g


def asymptotic_data(surface: ParametricSurface, point, tol: float = 1e-10) -> AsymptoticData:
    """The field coefficients at ``point``; requires eg - f^2 >= -tol (scaled)."""
    fd = fundamental_data(surface, point)
    disc = fd.e * fd.g - fd.f * fd.f
    scale = max(1.0, fd.e * fd.e + fd.f * fd.f + fd.g * fd.g)
    if disc < -tol * scale:
        raise NegativeCurvature(f"eg - f^2 = {disc} < 0 at {point}")
    lam = complex(-fd.f, math.sqrt(max(disc, 0.0)))
    return AsymptoticData(g=fd.g, lam=lam, e=fd.e, f=fd.f)


# ---------------------------------------------------------------------------
# derivatives of the second fundamental form
# ---------------------------------------------------------------------------


def _second_form_derivatives(surface, s, t):
    """(e, f, g) and their first partials from R-partials of order <= 3."""
    Rs = _fv(surface.partial(1, 0, s, t))
    Rt = _fv(surface.partial(0, 1, s, t))
    Rss = _fv(surface.partial(2, 0, s, t))
    Rst = _fv(surface.partial(1, 1, s, t))
    Rtt = _fv(surface.partial(0, 2, s, t))
    Rsss = _fv(surface.partial(3, 0, s, t))
    Rsst = _fv(surface.partial(2, 1, s, t))
    Rstt = _fv(surface.partial(1, 2, s, t))
    Rttt = _fv(surface.partial(0, 3, s, t))

    n = cross3(Rs, Rt)
    alpha = math.sqrt(dot3(n, n))
    N = scale3(1.0 / alpha, n)
    n_s = add3(cross3(Rss, Rt), cross3(Rs, Rst))
    n_t = add3(cross3(Rst, Rt), cross3(Rs, Rtt))
    a_s = dot3(N, n_s)
    a_t = dot3(N, n_t)
    N_s = scale3(1.0 / alpha, add3(n_s, scale3(-a_s, N)))
    N_t = scale3(1.0 / alpha, add3(n_t, scale3(-a_t, N)))

    e = dot3(Rss, N)
    f = dot3(Rst, N)
    g = dot3(Rtt, N)
    de = (dot3(Rsss, N) + dot3(Rss, N_s), dot3(Rsst, N) + dot3(Rss, N_t))
    df = (dot3(Rsst, N) + dot3(Rst, N_s), dot3(Rstt, N) + dot3(Rst, N_t))
    dg = (dot3(Rstt, N) + dot3(Rtt, N_s), dot3(Rttt, N) + dot3(Rtt, N_t))
    return e, f, g, de, df, dg


def _fv(v):
    return (float(v[0]), float(v[1]), float(v[2]))


def _lam_and_derivs(surface, point, fd_step: float | None = None):
    """(g, lam) plus (g_s, g_t, lam_s, lam_t) at ``point``.

    Uses exact third-order partials when the surface provides them; falls
    back to central differences of the asymptotic data (step 1e-4 * domain
    scale) for opaque surfaces.
    """
    s, t = float(point[0]), float(point[1])
    if getattr(surface, "exact_partials", False):
        e, f, g, de, df, dg = _second_form_derivatives(surface, s, t)
        disc = e * g - f * f
        scale = max(1.0, e * e + f * f + g * g)
        if disc < -1e-10 * scale:
            raise NegativeCurvature(f"eg - f^2 = {disc} < 0 at {point}")
        if disc <= 1e-14 * scale:
            raise FlatPointDegeneracy(f"eg - f^2 = {disc} at {point}")
        root = math.sqrt(disc)
        lam = complex(-f, root)
        ddisc = (de[0] * g + e * dg[0] - 2 * f * df[0],
                 de[1] * g + e * dg[1] - 2 * f * df[1])
        lam_s = complex(-df[0], ddisc[0] / (2 * root))
        lam_t = complex(-df[1], ddisc[1] / (2 * root))
        return g, lam, dg[0], dg[1], lam_s, lam_t

    h = fd_step if fd_step is not None else 1e-4 * surface.domain.scale()
    c0 = asymptotic_data(surface, (s, t))
    cp = asymptotic_data(surface, (s + h, t))
    cm_ = asymptotic_data(surface, (s - h, t))
    dp = asymptotic_data(surface, (s, t + h))
    dm = asymptotic_data(surface, (s, t - h))
    return (
        c0.g,
        c0.lam,
        (cp.g - cm_.g) / (2 * h),
        (dp.g - dm.g) / (2 * h),
        (cp.lam - cm_.lam) / (2 * h),
        (dp.lam - dm.lam) / (2 * h),
    )


# ---------------------------------------------------------------------------
# reduction coefficients and residual
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VekuaCoefficients:
    A: complex
    B: complex
    C: complex
    M: complex

    def closed_form_gap(self, g: float, e: float, f: float, area: float) -> float:
        """Relative gap between C and -4 g^2 (eg - f^2) ||R_s x R_t||^2."""
        ref = -4.0 * g * g * (e * g - f * f) * area * area
        return abs(self.C - ref) / max(abs(ref), 1e-300)


def _field_vectors(surface, point):
    s, t = float(point[0]), float(point[1])
    g, lam, g_s, g_t, lam_s, lam_t = _lam_and_derivs(surface, point)
    Rs = _fv(surface.partial(1, 0, s, t))
    Rt = _fv(surface.partial(0, 1, s, t))
    Rss = _fv(surface.partial(2, 0, s, t))
    Rst = _fv(surface.partial(1, 1, s, t))
    Rtt = _fv(surface.partial(0, 2, s, t))

    LR = add3(scale3(g, Rs), scale3(lam, Rt))
    LbarR = add3(scale3(g, Rs), scale3(lam.conjugate(), Rt))
    Lg = g * g_s + lam * g_t
    Llam = g * lam_s + lam * lam_t
    L2R = add3(
        add3(scale3(Lg, Rs), scale3(Llam, Rt)),
        add3(scale3(g * g, Rss), add3(scale3(2 * g * lam, Rst), scale3(lam * lam, Rtt))),
    )
    return g, lam, g_s, g_t, lam_s, lam_t, Rs, Rt, Rss, Rst, Rtt, LR, LbarR, L2R


FLAT_POINT_REL = 1e-12


def vekua_coefficients(surface: ParametricSurface, fields, j: int, point) -> VekuaCoefficients:
    """A, B, C from the cross products of LR, L^2R, conj(L)R, plus the source M.

    The dot products are complex-bilinear, so C agrees with the closed form
    -4 g^2 (eg - f^2) ||R_s x R_t||^2.  Raises FlatPointDegeneracy when |C|
    is below the flat-point threshold.
    """
    (g, lam, *_rest, LR, LbarR, L2R) = _field_vectors(surface, point)
    w = cross3(LR, LbarR)
    A = dot3(w, cross3(L2R, LbarR))
    B = dot3(w, cross3(L2R, LR))
    C = dot3(w, w)
    fd = fundamental_data(surface, point)
    if abs(C) < FLAT_POINT_REL * fd.area_elem**4:
        raise FlatPointDegeneracy(f"|C| = {abs(C)} at {point}")
    F, G, H = rhs_terms(fields, j, point)
    M = g * g * complex(F) + g * lam * complex(G) + lam * lam * complex(H)
    return VekuaCoefficients(A=A, B=B, C=C, M=M)


def vekua_residual(surface: ParametricSurface, fields, j: int, point) -> complex:
    """C L(h) - A h + B conj(h) - C M for h = LR . U^j; ~0 for exact bendings."""
    if len(fields) < j:
        raise ValueError(f"need fields up to order {j}")
    (g, lam, g_s, g_t, lam_s, lam_t,
     Rs, Rt, Rss, Rst, Rtt, LR, LbarR, L2R) = _field_vectors(surface, point)

    s, t = float(point[0]), float(point[1])
    U = tuple(complex(c) for c in fields[j - 1].partial(0, 0, s, t))
    Us = tuple(complex(c) for c in fields[j - 1].partial(1, 0, s, t))
    Ut = tuple(complex(c) for c in fields[j - 1].partial(0, 1, s, t))

    LR_s = add3(add3(scale3(g_s, Rs), scale3(g, Rss)),
                add3(scale3(lam_s, Rt), scale3(lam, Rst)))
    LR_t = add3(add3(scale3(g_t, Rs), scale3(g, Rst)),
                add3(scale3(lam_t, Rt), scale3(lam, Rtt)))

    h = dot3(LR, U)
    h_s = dot3(LR_s, U) + dot3(LR, Us)
    h_t = dot3(LR_t, U) + dot3(LR, Ut)
    Lh = g * h_s + lam * h_t

    w = cross3(LR, LbarR)
    A = dot3(w, cross3(L2R, LbarR))
    B = dot3(w, cross3(L2R, LR))
    C = dot3(w, w)
    fd = fundamental_data(surface, point)
    if abs(C) < FLAT_POINT_REL * fd.area_elem**4:
        raise FlatPointDegeneracy(f"|C| = {abs(C)} at {point}")

    F, G, H = rhs_terms(fields, j, point)
    M = g * g * complex(F) + g * lam * complex(G) + lam * lam * complex(H)
    return C * Lh - A * h + B * h.conjugate() - C * M


def phi_psi_h_convert(g: float, lam: complex, h: complex | None = None,
                      phi_psi=None):
    """Convert between h and (phi, psi) for the pointwise algebra h = g*phi + lam*psi.

    The inverse uses (lam - conj(lam)) g phi = lam conj(h) - conj(lam) h and
    (lam - conj(lam)) psi = h - conj(h); it needs Im(lam) != 0 and g != 0.
    """
    if (h is None) == (phi_psi is None):
        raise ValueError("provide exactly one of h or phi_psi")
    if phi_psi is not None:
        phi, psi = phi_psi
        return g * phi + lam * psi
    denom = lam - lam.conjugate()
    if abs(denom) < 1e-15 * max(1.0, abs(lam)) or abs(g) < 1e-300:
        raise SingularConversion(f"lam={lam}, g={g}")
    phi = (lam * h.conjugate() - lam.conjugate() * h) / (denom * g)
    psi = (h - h.conjugate()) / denom
    return phi, psi


def cross_product_oracle(surface: ParametricSurface, point):
    """Expansion identities for (L^2R x LR), (L^2R x LbarR), (LR x LbarR).

    Returns pairs (direct, expanded) for the three products, where the
    expanded forms are written over the R-partial cross products with
    coefficients in g, lam, Lg, Llam.  Used as a consistency oracle.
    """
    (g, lam, g_s, g_t, lam_s, lam_t,
     Rs, Rt, Rss, Rst, Rtt, LR, LbarR, L2R) = _field_vectors(surface, point)
    Lg = g * g_s + lam * g_t
    Llam = g * lam_s + lam * lam_t
    lb = lam.conjugate()

    base = cross3(Rs, Rt)
    terms_ll = add3(
        add3(scale3(lam * Lg - g * Llam, base), scale3(g**3, cross3(Rss, Rs))),
        add3(
            add3(scale3(lam**3, cross3(Rtt, Rt)),
                 scale3(g * g * lam, add3(cross3(Rss, Rt), scale3(2, cross3(Rst, Rs))))),
            scale3(g * lam * lam, add3(scale3(2, cross3(Rst, Rt)), cross3(Rtt, Rs))),
        ),
    )
    terms_lb = add3(
        add3(scale3(lb * Lg - g * Llam, base), scale3(g**3, cross3(Rss, Rs))),
        add3(
            add3(scale3(lam * abs(lam) ** 2, cross3(Rtt, Rt)),
                 add3(scale3(g * g * lb, cross3(Rss, Rt)),
                      scale3(2 * g * g * lam, cross3(Rst, Rs)))),
            add3(scale3(2 * g * abs(lam) ** 2, cross3(Rst, Rt)),
                 scale3(g * lam * lam, cross3(Rtt, Rs))),
        ),
    )
    terms_bar = scale3(-g * (lam - lb), base)
    return (
        (cross3(L2R, LR), terms_ll),
        (cross3(L2R, LbarR), terms_lb),
        (cross3(LR, LbarR), terms_bar),
    )
