"""Finite Fourier series on the circle (2*pi periodic, real valued).

Profiles are stored as cosine/sine coefficient arrays, so periodicity and
differentiation are exact.  Products are carried out by FFT on a grid large
enough that the linear convolution is alias-free (exact to roundoff);
quotients, powers, and other smooth pointwise functions are projected back
onto the basis by FFT sampling, with spectral accuracy for smooth results.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

PROJECT_TOL = 1e-13
MAX_PROJECT_N = 1 << 16


class PeriodicProfile:
    """Real trigonometric polynomial a0 + sum_k (a_k cos k*theta + b_k sin k*theta)."""

    __slots__ = ("a", "b")

    def __init__(self, cos=(0.0,), sin=()):
        a = np.atleast_1d(np.asarray(cos, dtype=float))
        b = np.atleast_1d(np.asarray(sin, dtype=float)) if len(sin) else np.zeros(0)
        k = max(len(a), len(b) + 1)
        self.a = np.zeros(k)
        self.b = np.zeros(k)
        self.a[: len(a)] = a
        self.b[1 : len(b) + 1] = b  # sin coefficients start at k = 1

    # -- constructors -------------------------------------------------

    @classmethod
    def _from_ab(cls, a, b):
        p = cls.__new__(cls)
        p.a = np.asarray(a, dtype=float)
        p.b = np.asarray(b, dtype=float)
        return p

    @classmethod
    def constant(cls, c: float) -> "PeriodicProfile":
        return cls._from_ab(np.array([float(c)]), np.zeros(1))

    @classmethod
    def from_samples(cls, values) -> "PeriodicProfile":
        """Project uniform samples v_j = f(2*pi*j/n) onto the Fourier basis."""
        v = np.asarray(values, dtype=float)
        n = len(v)
        spec = np.fft.rfft(v) / n
        kmax = (n - 1) // 2
        a = np.zeros(kmax + 1)
        b = np.zeros(kmax + 1)
        a[0] = spec[0].real
        a[1:] = 2 * spec[1 : kmax + 1].real
        b[1:] = -2 * spec[1 : kmax + 1].imag
        return cls._from_ab(a, b).truncate()

    @classmethod
    def from_callable(cls, fn, n: int = 256, tol: float = PROJECT_TOL) -> "PeriodicProfile":
        """Sample-and-project, doubling the grid until the tail is below tol."""
        while True:
            theta = 2 * np.pi * np.arange(n) / n
            p = cls.from_samples(fn(theta))
            if 4 * (p.degree + 1) <= n or n >= MAX_PROJECT_N:
                return p
            n *= 2

    # -- basic queries ------------------------------------------------

    @property
    def degree(self) -> int:
        nz = np.nonzero((np.abs(self.a) > 0) | (np.abs(self.b) > 0))[0]
        return int(nz[-1]) if len(nz) else 0

    def truncate(self, tol: float = PROJECT_TOL, ref: float | None = None) -> "PeriodicProfile":
        """Drop trailing coefficients below tol relative to ``ref`` (default: own max)."""
        mag = ref if ref is not None else max(np.max(np.abs(self.a)), np.max(np.abs(self.b)))
        mag = max(mag, 1e-300)
        keep = np.nonzero((np.abs(self.a) > tol * mag) | (np.abs(self.b) > tol * mag))[0]
        if len(keep) == 0:
            return PeriodicProfile._from_ab(np.zeros(1), np.zeros(1))
        k = int(keep[-1])
        a = self.a[: k + 1].copy()
        b = self.b[: k + 1].copy()
        small = (np.abs(a) <= tol * mag) & (np.abs(b) <= tol * mag)
        a[small] = 0.0
        b[small] = 0.0
        return PeriodicProfile._from_ab(a, b)

    def eval(self, theta):
        th = np.asarray(theta, dtype=float)
        k = np.arange(1, len(self.a))
        if th.ndim == 0:
            ang = k * float(th)
            out = self.a[0] + np.dot(self.a[1:], np.cos(ang)) + np.dot(self.b[1:], np.sin(ang))
            return float(out)
        ang = np.multiply.outer(k, th)
        return self.a[0] + np.tensordot(self.a[1:], np.cos(ang), axes=1) + np.tensordot(
            self.b[1:], np.sin(ang), axes=1
        )

    __call__ = eval

    def samples(self, n: int):
        """Values on the uniform grid theta_j = 2*pi*j/n via inverse FFT."""
        if n < 2 * len(self.a):
            return self.eval(2 * np.pi * np.arange(n) / n)
        spec = np.zeros(n // 2 + 1, dtype=complex)
        spec[0] = self.a[0]
        k = len(self.a)
        spec[1:k] = (self.a[1:] - 1j * self.b[1:]) / 2
        return np.fft.irfft(spec * n, n)

    # -- calculus and algebra -----------------------------------------

    def derivative(self, order: int = 1) -> "PeriodicProfile":
        a, b = self.a, self.b
        for _ in range(order):
            k = np.arange(len(a))
            a, b = k * b, -k * a
        return PeriodicProfile._from_ab(a, b)

    def _binary(self, other, op):
        if not isinstance(other, PeriodicProfile):
            other = PeriodicProfile.constant(other)
        k = max(len(self.a), len(other.a))
        a1 = np.zeros(k)
        b1 = np.zeros(k)
        a2 = np.zeros(k)
        b2 = np.zeros(k)
        a1[: len(self.a)] = self.a
        b1[: len(self.b)] = self.b
        a2[: len(other.a)] = other.a
        b2[: len(other.b)] = other.b
        return PeriodicProfile._from_ab(op(a1, a2), op(b1, b2))

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return PeriodicProfile._from_ab(-self.a, -self.b)

    def __mul__(self, other):
        if not isinstance(other, PeriodicProfile):
            c = float(other)
            return PeriodicProfile._from_ab(self.a * c, self.b * c)
        deg = self.degree + other.degree
        n = 1
        while n < 2 * deg + 4:
            n *= 2
        v = self.samples(n) * other.samples(n)
        return PeriodicProfile.from_samples(v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, PeriodicProfile):
            return self * (1.0 / float(other))
        return pointwise(lambda th: self.eval(th) / other.eval(th),
                         n=max(4 * (self.degree + other.degree + 2), 256))

    def power(self, exponent: float) -> "PeriodicProfile":
        """self**exponent by projection; requires self > 0 on the circle."""
        return pointwise(lambda th: np.power(self.eval(th), exponent),
                         n=max(8 * (self.degree + 2), 256))

    # -- extrema ------------------------------------------------------

    def min_value(self, n: int = 2048, refine: bool = True):
        """Global minimum over the circle (grid scan plus local refinement)."""
        n = max(n, 16 * (self.degree + 1))
        th = 2 * np.pi * np.arange(n) / n
        v = self.samples(n)
        i = int(np.argmin(v))
        best = float(v[i])
        arg = float(th[i])
        if refine:
            lo = th[(i - 1) % n] if i > 0 else th[0] - 2 * np.pi / n
            hi = lo + 4 * np.pi / n
            res = minimize_scalar(lambda x: self.eval(x), bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun < best:
                best = float(res.fun)
                arg = float(res.x)
        return best, arg

    # -- serialization ------------------------------------------------

    def to_lists(self, tol: float = 0.0):
        p = self.truncate(tol) if tol else self
        cos = list(map(float, p.a))
        sin = list(map(float, p.b[1:]))
        return cos, sin

    def __repr__(self):
        return f"PeriodicProfile(degree={self.degree})"


def pointwise(fn, n: int = 256) -> PeriodicProfile:
    """Project theta -> fn(theta) (vectorized over theta) onto the basis."""
    return PeriodicProfile.from_callable(fn, n=n)


COS1 = PeriodicProfile(cos=[0.0, 1.0])
SIN1 = PeriodicProfile(cos=[0.0], sin=[1.0])
