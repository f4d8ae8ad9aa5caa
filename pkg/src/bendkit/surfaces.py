"""Parametric surfaces in R^3 with mixed partial derivatives up to order 3.

Two derivative backends are provided: exact symbolic partials for graphs of
rational polynomials (the default for every surface the pipelines build),
and a central finite-difference fallback for opaque evaluators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polynomial import Poly2

MAX_PARTIAL_ORDER = 3


@dataclass(frozen=True)
class Rectangle:
    """Parameter rectangle s in [s0, s1], t in [t0, t1]."""

    s0: float
    s1: float
    t0: float
    t1: float

    def contains(self, s, t, strict: bool = False) -> bool:
        if strict:
            return self.s0 < s < self.s1 and self.t0 < t < self.t1
        return self.s0 <= s <= self.s1 and self.t0 <= t <= self.t1

    def scale(self) -> float:
        return max(self.s1 - self.s0, self.t1 - self.t0)

    def interior_grid(self, n: int):
        """n x n points strictly inside the rectangle, as an (n*n, 2) array."""
        ss = np.linspace(self.s0, self.s1, n + 2)[1:-1]
        tt = np.linspace(self.t0, self.t1, n + 2)[1:-1]
        S, T = np.meshgrid(ss, tt)
        return np.column_stack([S.ravel(), T.ravel()])


@dataclass(frozen=True)
class Annulus:
    """Annulus r0 <= r <= r1 around the origin of the (s, t) plane."""

    r0: float
    r1: float

    def contains(self, s, t, strict: bool = False) -> bool:
        r = float(np.hypot(s, t))
        if strict:
            return self.r0 < r < self.r1
        return self.r0 <= r <= self.r1

    def scale(self) -> float:
        return self.r1

    def interior_grid(self, n: int):
        """n x n polar product grid strictly inside the annulus."""
        rr = np.linspace(self.r0, self.r1, n + 2)[1:-1]
        th = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        R, TH = np.meshgrid(rr, th)
        return np.column_stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel()])


class ParametricSurface:
    """Position vector R(s, t) with mixed partials of order <= 3.

    Subclasses implement ``partial(ds, dt, s, t)`` returning a 3-tuple of
    components.  Components may be exact (Fraction) when the surface is
    polynomial and the arguments are rational.  ``exact_partials`` tells
    consumers whether third-order partials are trustworthy to roundoff.
    """

    domain = Rectangle(-1.0, 1.0, -1.0, 1.0)
    exact_partials = False

    def partial(self, ds: int, dt: int, s, t):
        raise NotImplementedError

    def position(self, s, t):
        return self.partial(0, 0, s, t)


class GraphSurface(ParametricSurface):
    """Graph R(s, t) = (s, t, z(s, t)) of an exact polynomial z."""

    exact_partials = True

    def __init__(self, z: Poly2, domain=None):
        self.z = z
        if domain is not None:
            self.domain = domain
        self._zp = {}

    def z_partial(self, i: int, j: int):
        key = (i, j)
        if key not in self._zp:
            self._zp[key] = self.z.diff(i, j)
        return self._zp[key]

    def partial(self, ds: int, dt: int, s, t):
        if ds + dt > MAX_PARTIAL_ORDER:
            raise ValueError(f"partials available up to order {MAX_PARTIAL_ORDER}")
        zv = self.z_partial(ds, dt).eval(s, t)
        zero = 0 * zv
        if (ds, dt) == (0, 0):
            return (s + zero, t + zero, zv)
        if (ds, dt) == (1, 0):
            return (1 + zero, zero, zv)
        if (ds, dt) == (0, 1):
            return (zero, 1 + zero, zv)
        return (zero, zero, zv)


def smn_surface(m: int, n: int, eps: int, domain=None) -> GraphSurface:
    """Graph of s^(m+2) + eps*t^(n+2)."""
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    z = Poly2({(m + 2, 0): 1, (0, n + 2): eps})
    return GraphSurface(z, domain=domain)


def paraboloid(domain=None) -> GraphSurface:
    """Graph of s^2 + t^2 (standard positive-curvature fixture)."""
    return GraphSurface(Poly2({(2, 0): 1, (0, 2): 1}), domain=domain)


class NumericalSurface(ParametricSurface):
    """Opaque evaluator (s, t) -> R^3 with central finite-difference partials.

    Step defaults to 1e-4 times the domain scale; derivatives of order p use
    p nested central differences, so accuracy degrades with order.  Prefer
    GraphSurface whenever z is polynomial.
    """

    def __init__(self, fn, domain=None, h: float | None = None):
        self.fn = fn
        if domain is not None:
            self.domain = domain
        self.h = h if h is not None else 1e-4 * self.domain.scale()

    def partial(self, ds: int, dt: int, s, t):
        if ds + dt > MAX_PARTIAL_ORDER:
            raise ValueError(f"partials available up to order {MAX_PARTIAL_ORDER}")
        return self._central(ds, dt, float(s), float(t))

    def _central(self, ds, dt, s, t):
        h = self.h
        if ds > 0:
            p = self._central(ds - 1, dt, s + h, t)
            m = self._central(ds - 1, dt, s - h, t)
            return tuple((pi - mi) / (2 * h) for pi, mi in zip(p, m))
        if dt > 0:
            p = self._central(ds, dt - 1, s, t + h)
            m = self._central(ds, dt - 1, s, t - h)
            return tuple((pi - mi) / (2 * h) for pi, mi in zip(p, m))
        return tuple(float(c) for c in self.fn(s, t))
