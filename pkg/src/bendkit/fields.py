"""Vector fields U(s, t) in R^3 and deformation families built from them."""

from __future__ import annotations

from dataclasses import dataclass, field

from .polynomial import Poly2
from .surfaces import ParametricSurface
from .vec3 import cross3


class VectorField3:
    """Field (s, t) -> R^3 with first-order partials (second where available)."""

    def partial(self, ds: int, dt: int, s, t):
        raise NotImplementedError

    def eval(self, s, t):
        return self.partial(0, 0, s, t)


class PolynomialField(VectorField3):
    """Components are exact rational polynomials in (s, t)."""

    def __init__(self, u: Poly2, v: Poly2, w: Poly2):
        self.u, self.v, self.w = u, v, w
        self._cache = {}

    def partial(self, ds, dt, s, t):
        key = (ds, dt)
        if key not in self._cache:
            self._cache[key] = tuple(c.diff(ds, dt) for c in (self.u, self.v, self.w))
        pu, pv, pw = self._cache[key]
        return (pu.eval(s, t), pv.eval(s, t), pw.eval(s, t))


class ZeroField(VectorField3):
    def partial(self, ds, dt, s, t):
        return (0, 0, 0)


class TrivialField(VectorField3):
    """Rigid-motion field A x R(s, t) + B with analytically propagated partials."""

    def __init__(self, A, B, surface: ParametricSurface):
        self.A = tuple(A)
        self.B = tuple(B)
        self.surface = surface

    def partial(self, ds, dt, s, t):
        R = self.surface.partial(ds, dt, s, t)
        out = cross3(self.A, R)
        if ds == dt == 0:
            out = (out[0] + self.B[0], out[1] + self.B[1], out[2] + self.B[2])
        return out


class CallableField(VectorField3):
    """Opaque evaluator with central finite-difference partials."""

    def __init__(self, fn, h: float = 1e-5):
        self.fn = fn
        self.h = h

    def partial(self, ds, dt, s, t):
        h = self.h
        if ds > 0:
            p = self.partial(ds - 1, dt, s + h, t)
            m = self.partial(ds - 1, dt, s - h, t)
            return tuple((pi - mi) / (2 * h) for pi, mi in zip(p, m))
        if dt > 0:
            p = self.partial(ds, dt - 1, s, t + h)
            m = self.partial(ds, dt - 1, s, t - h)
            return tuple((pi - mi) / (2 * h) for pi, mi in zip(p, m))
        return tuple(self.fn(s, t))


@dataclass
class DeformationFamily:
    """A surface together with ordered bending fields U^1 ... U^m.

    The deformation is R + 2*eps*U^1 + ... + 2*eps^m*U^m; ``order`` must
    equal the number of fields.
    """

    surface: ParametricSurface
    fields: list = field(default_factory=list)
    order: int = 0

    def __post_init__(self):
        if self.order == 0:
            self.order = len(self.fields)
        if len(self.fields) != self.order:
            raise ValueError(f"family of order {self.order} needs exactly {self.order} fields")
