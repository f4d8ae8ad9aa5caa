"""Exact bivariate polynomials over the rationals.

Coefficients are `fractions.Fraction`; evaluation stays exact when the
arguments are ints/Fractions and degrades gracefully to float/ndarray
arithmetic otherwise.  This is the workhorse behind polynomial graph
surfaces, polynomial bending fields, and the exact metric-defect oracle
used by the tests.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, Rational):
        return Fraction(c)
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficient {c!r} is not exactly representable; use int/Fraction/str")


def _is_exact(v) -> bool:
    return isinstance(v, (int, Rational)) and not isinstance(v, bool)


class Poly2:
    """Polynomial in (s, t) with exact rational coefficients.

    Stored sparsely as {(i, j): Fraction}; zero coefficients are never kept.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        if coeffs:
            for (i, j), c in coeffs.items():
                c = _as_fraction(c)
                if c != 0:
                    self.coeffs[(int(i), int(j))] = c

    @classmethod
    def zero(cls) -> "Poly2":
        return cls()

    @classmethod
    def constant(cls, c) -> "Poly2":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> "Poly2":
        return cls({(i, j): c})

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Poly2):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        if not isinstance(other, Poly2):
            other = Poly2.constant(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            v = out.get(k, Fraction(0)) + c
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        p = Poly2.__new__(Poly2)
        p.coeffs = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = Poly2.__new__(Poly2)
        p.coeffs = {k: -c for k, c in self.coeffs.items()}
        return p

    def __sub__(self, other):
        if not isinstance(other, Poly2):
            other = Poly2.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly2.constant(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Poly2):
            c = _as_fraction(other)
            if c == 0:
                return Poly2.zero()
            p = Poly2.__new__(Poly2)
            p.coeffs = {k: v * c for k, v in self.coeffs.items()}
            return p
        out: dict = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                k = (i1 + i2, j1 + j2)
                v = out.get(k, Fraction(0)) + c1 * c2
                if v == 0:
                    out.pop(k, None)
                else:
                    out[k] = v
        p = Poly2.__new__(Poly2)
        p.coeffs = out
        return p

    __rmul__ = __mul__

    def diff(self, ds: int = 0, dt: int = 0) -> "Poly2":
        p = self
        for _ in range(ds):
            p = p._diff_once(0)
        for _ in range(dt):
            p = p._diff_once(1)
        return p

    def _diff_once(self, axis: int) -> "Poly2":
        out = {}
        for (i, j), c in self.coeffs.items():
            if axis == 0 and i > 0:
                out[(i - 1, j)] = c * i
            elif axis == 1 and j > 0:
                out[(i, j - 1)] = c * j
        p = Poly2.__new__(Poly2)
        p.coeffs = out
        return p

    def eval(self, s, t):
        """Exact when s, t are ints/Fractions; float/ndarray otherwise."""
        if _is_exact(s) and _is_exact(t):
            acc = Fraction(0)
            for (i, j), c in self.coeffs.items():
                acc += c * Fraction(s) ** i * Fraction(t) ** j
            return acc
        if not self.coeffs:
            return 0.0 * (np.asarray(s, dtype=float) * 0.0 + np.asarray(t, dtype=float) * 0.0)
        acc = None
        for (i, j), c in self.coeffs.items():
            term = float(c) * np.power(s, i) * np.power(t, j)
            acc = term if acc is None else acc + term
        return acc

    def degree(self) -> int:
        return max((i + j for (i, j) in self.coeffs), default=-1)

    def __repr__(self):
        if not self.coeffs:
            return "Poly2(0)"
        parts = [f"{c}*s^{i}*t^{j}" for (i, j), c in sorted(self.coeffs.items())]
        return "Poly2(" + " + ".join(parts) + ")"


class Poly1:
    """Univariate exact polynomial, used for epsilon-expansions in oracles."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        # coeffs: list or dict exponent -> coefficient
        self.coeffs: dict = {}
        if isinstance(coeffs, (list, tuple)):
            coeffs = dict(enumerate(coeffs))
        if coeffs:
            for k, c in coeffs.items():
                c = _as_fraction(c)
                if c != 0:
                    self.coeffs[int(k)] = c

    def __add__(self, other):
        if not isinstance(other, Poly1):
            other = Poly1({0: other})
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            v = out.get(k, Fraction(0)) + c
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        p = Poly1.__new__(Poly1)
        p.coeffs = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = Poly1.__new__(Poly1)
        p.coeffs = {k: -c for k, c in self.coeffs.items()}
        return p

    def __sub__(self, other):
        if not isinstance(other, Poly1):
            other = Poly1({0: other})
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly1):
            c = _as_fraction(other)
            p = Poly1.__new__(Poly1)
            p.coeffs = {} if c == 0 else {k: v * c for k, v in self.coeffs.items()}
            return p
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = k1 + k2
                v = out.get(k, Fraction(0)) + c1 * c2
                if v == 0:
                    out.pop(k, None)
                else:
                    out[k] = v
        p = Poly1.__new__(Poly1)
        p.coeffs = out
        return p

    __rmul__ = __mul__

    def lowest_degree(self):
        return min(self.coeffs, default=None)

    def __repr__(self):
        return f"Poly1({dict(sorted(self.coeffs.items()))})"
