"""Exact power-series solutions of x^m w_yy + eps y^n w_xx = 0.

All arithmetic is over Fraction: the PDE residual of a constructed solution
is an exact zero, not a small float.  Every series carries the truncation
through which its coefficients are complete, and consumers must stay inside
that box.

The solution family is generated by four univariate germs h1..h4: the y^0
and y^1 slices are h1(x^(m+2)) + x h2(x^(m+2)) and h3(x^(m+2)) + x h4(x^(m+2)),
and each further y-layer is produced by the operator D = z^-m d^2/dz^2 and
division by the integer ladders A^n_p / B^n_p.  The graph of
s^(m+2) + eps t^(n+2) leads to the same equation with coefficient ratio
(n+2)(n+1) / ((m+2)(m+1)), which is rational, so the bending recovery is
exact as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CompatibilityFailure, NotDivisible, NotInSolutionForm
from .fields import PolynomialField
from .polynomial import Poly2

INF = math.inf


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"{c!r} is not an exact rational")


# ---------------------------------------------------------------------------
# univariate series
# ---------------------------------------------------------------------------


class Series1:
    """Truncated power series in one variable, exact rational coefficients.

    ``trunc`` is the largest exponent whose coefficient is complete; inf for
    exact polynomials.  Arithmetic tracks the tightest trustworthy
    truncation of the result.
    """

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs=None, trunc=INF):
        self.trunc = trunc
        self.coeffs: dict = {}
        if coeffs:
            for k, c in coeffs.items():
                c = _frac(c)
                k = int(k)
                if c != 0 and k <= trunc:
                    self.coeffs[k] = c

    @classmethod
    def zero(cls, trunc=INF):
        return cls({}, trunc)

    @classmethod
    def monomial(cls, k: int, c=1, trunc=INF):
        return cls({k: c}, trunc)

    def valuation(self):
        return min(self.coeffs, default=None)

    def degree(self):
        return max(self.coeffs, default=-1)

    def __eq__(self, other):
        if not isinstance(other, Series1):
            return NotImplemented
        return self.coeffs == other.coeffs and self.trunc == other.trunc

    def __add__(self, other):
        trunc = min(self.trunc, other.trunc)
        out = {k: c for k, c in self.coeffs.items() if k <= trunc}
        for k, c in other.coeffs.items():
            if k > trunc:
                continue
            v = out.get(k, Fraction(0)) + c
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        return Series1(out, trunc)

    def __neg__(self):
        return Series1({k: -c for k, c in self.coeffs.items()}, self.trunc)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Series1":
        c = _frac(c)
        if c == 0:
            return Series1.zero(self.trunc)
        return Series1({k: v * c for k, v in self.coeffs.items()}, self.trunc)

    def __mul__(self, other):
        if not isinstance(other, Series1):
            return self.scale(other)
        va = self.valuation()
        vb = other.valuation()
        trunc = min(
            self.trunc + (vb if vb is not None else 0),
            other.trunc + (va if va is not None else 0),
        )
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = k1 + k2
                if k > trunc:
                    continue
                v = out.get(k, Fraction(0)) + c1 * c2
                if v == 0:
                    out.pop(k, None)
                else:
                    out[k] = v
        return Series1(out, trunc)

    def second_derivative(self) -> "Series1":
        out = {k - 2: c * k * (k - 1) for k, c in self.coeffs.items() if k >= 2}
        return Series1(out, self.trunc - 2 if self.trunc is not INF else INF)

    def compose_power(self, k: int) -> "Series1":
        """h(t) -> h(x^k).  Trusted through (trunc+1)*k - 1."""
        trunc = INF if self.trunc is INF else (self.trunc + 1) * k - 1
        return Series1({e * k: c for e, c in self.coeffs.items()}, trunc)

    def shift(self, d: int) -> "Series1":
        """Multiply by x^d (d may not drive exponents negative)."""
        trunc = INF if self.trunc is INF else self.trunc + d
        return Series1({e + d: c for e, c in self.coeffs.items()}, trunc)

    def eval_float(self, x: float) -> float:
        return float(sum(float(c) * x**k for k, c in self.coeffs.items()))

    def to_json(self) -> dict:
        out = {"coeffs": {str(k): str(c) for k, c in sorted(self.coeffs.items())}}
        if self.trunc is not INF:
            out["trunc"] = int(self.trunc)
        return out

    @classmethod
    def from_json(cls, obj) -> "Series1":
        return cls({int(k): Fraction(v) for k, v in obj.get("coeffs", {}).items()},
                   obj.get("trunc", INF))

    def __repr__(self):
        return f"Series1({dict(sorted(self.coeffs.items()))}, trunc={self.trunc})"


# ---------------------------------------------------------------------------
# bivariate series with a trust box
# ---------------------------------------------------------------------------


class BivariateSeries:
    """Series in (x, y); coefficient (i, j) is complete iff i <= nx, j <= ny."""

    __slots__ = ("coeffs", "nx", "ny")

    def __init__(self, coeffs=None, nx=INF, ny=INF):
        self.nx = nx
        self.ny = ny
        self.coeffs: dict = {}
        if coeffs:
            for (i, j), c in coeffs.items():
                c = _frac(c)
                if c != 0 and i <= nx and j <= ny:
                    self.coeffs[(int(i), int(j))] = c

    def __eq__(self, other):
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return self.coeffs == other.coeffs and (self.nx, self.ny) == (other.nx, other.ny)

    def row(self, j: int) -> Series1:
        return Series1({i: c for (i, jj), c in self.coeffs.items() if jj == j}, self.nx)

    def set_row(self, j: int, series: Series1):
        self.nx = min(self.nx, series.trunc)
        for i, c in series.coeffs.items():
            self.coeffs[(i, j)] = c

    def rows(self):
        return sorted({j for (_, j) in self.coeffs})

    def __add__(self, other):
        nx = min(self.nx, other.nx)
        ny = min(self.ny, other.ny)
        out = {k: c for k, c in self.coeffs.items() if k[0] <= nx and k[1] <= ny}
        for k, c in other.coeffs.items():
            if k[0] > nx or k[1] > ny:
                continue
            v = out.get(k, Fraction(0)) + c
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        b = BivariateSeries.__new__(BivariateSeries)
        b.coeffs, b.nx, b.ny = out, nx, ny
        return b

    def scale(self, c) -> "BivariateSeries":
        c = _frac(c)
        b = BivariateSeries.__new__(BivariateSeries)
        b.coeffs = {} if c == 0 else {k: v * c for k, v in self.coeffs.items()}
        b.nx, b.ny = self.nx, self.ny
        return b

    def diff_x(self) -> "BivariateSeries":
        out = {(i - 1, j): c * i for (i, j), c in self.coeffs.items() if i >= 1}
        b = BivariateSeries.__new__(BivariateSeries)
        b.coeffs = out
        b.nx = self.nx - 1 if self.nx is not INF else INF
        b.ny = self.ny
        return b

    def diff_y(self) -> "BivariateSeries":
        out = {(i, j - 1): c * j for (i, j), c in self.coeffs.items() if j >= 1}
        b = BivariateSeries.__new__(BivariateSeries)
        b.coeffs = out
        b.nx = self.nx
        b.ny = self.ny - 1 if self.ny is not INF else INF
        return b

    def shift(self, dx: int, dy: int) -> "BivariateSeries":
        out = {(i + dx, j + dy): c for (i, j), c in self.coeffs.items()}
        b = BivariateSeries.__new__(BivariateSeries)
        b.coeffs = out
        b.nx = self.nx + dx if self.nx is not INF else INF
        b.ny = self.ny + dy if self.ny is not INF else INF
        return b

    def is_zero(self) -> bool:
        """Zero on the trust box (coefficients outside the box are ignored)."""
        return all(
            c == 0 for (i, j), c in self.coeffs.items() if i <= self.nx and j <= self.ny
        )

    def max_abs_entry(self):
        vals = [(abs(c), (i, j)) for (i, j), c in self.coeffs.items()
                if i <= self.nx and j <= self.ny and c != 0]
        return max(vals, default=(Fraction(0), None))

    def eval_float(self, x: float, y: float) -> float:
        return float(sum(float(c) * x**i * y**j for (i, j), c in self.coeffs.items()))

    def to_poly2(self) -> Poly2:
        return Poly2(dict(self.coeffs))

    def to_json(self) -> dict:
        out = {"coeffs": {f"{i},{j}": str(c) for (i, j), c in sorted(self.coeffs.items())}}
        if self.nx is not INF:
            out["nx"] = int(self.nx)
        if self.ny is not INF:
            out["ny"] = int(self.ny)
        return out

    @classmethod
    def from_json(cls, obj) -> "BivariateSeries":
        coeffs = {}
        for key, v in obj.get("coeffs", {}).items():
            i, j = key.split(",")
            coeffs[(int(i), int(j))] = Fraction(v)
        return cls(coeffs, obj.get("nx", INF), obj.get("ny", INF))

    def __repr__(self):
        return f"BivariateSeries({len(self.coeffs)} coeffs, box=({self.nx},{self.ny}))"


# ---------------------------------------------------------------------------
# the integer coefficient ladders and the operator D
# ---------------------------------------------------------------------------


def coeff(kind: str, n: int, beta: int) -> int:
    """A^n_beta = prod [k(n+2)-1][k(n+2)] or B^n_beta = prod [k(n+2)][k(n+2)+1]."""
    if beta < 0 or n < 0:
        raise ValueError("indices must be nonnegative")
    acc = 1
    for k in range(1, beta + 1):
        base = k * (n + 2)
        if kind == "A":
            acc *= (base - 1) * base
        elif kind == "B":
            acc *= base * (base + 1)
        else:
            raise ValueError("kind must be 'A' or 'B'")
    return acc


def D_op(f: Series1, m: int) -> Series1:
    """D f = f'' / z^m; defined only when f'' is divisible by z^m."""
    fpp = f.second_derivative()
    for e in fpp.coeffs:
        if e < m:
            raise NotDivisible(e, f"coefficient of z^{e} in f'' is nonzero but m={m}")
    trunc = fpp.trunc - m if fpp.trunc is not INF else INF
    return Series1({e - m: c for e, c in fpp.coeffs.items()}, trunc)


# ---------------------------------------------------------------------------
# generators, construction, and the independent recursion
# ---------------------------------------------------------------------------


@dataclass
class GeneratorQuad:
    h1: Series1
    h2: Series1
    h3: Series1
    h4: Series1

    def as_tuple(self):
        return (self.h1, self.h2, self.h3, self.h4)

    @classmethod
    def zeros(cls):
        return cls(Series1.zero(), Series1.zero(), Series1.zero(), Series1.zero())

    def to_json(self):
        return {name: getattr(self, name).to_json() for name in ("h1", "h2", "h3", "h4")}

    @classmethod
    def from_json(cls, obj):
        return cls(*(Series1.from_json(obj.get(n, {})) for n in ("h1", "h2", "h3", "h4")))


def _alpha_slices(m: int, quad: GeneratorQuad):
    """alpha0 = h1(x^(m+2)) + x h2(x^(m+2)); alpha1 likewise from h3, h4."""
    k = m + 2
    a0 = quad.h1.compose_power(k) + quad.h2.compose_power(k).shift(1)
    a1 = quad.h3.compose_power(k) + quad.h4.compose_power(k).shift(1)
    return a0, a1


def build_w(m: int, n: int, eps: int, quad: GeneratorQuad, Ny: int,
            ratio: Fraction = Fraction(1)) -> BivariateSeries:
    """Solution with y-layers (-eps*ratio)^p D^p(alpha_i) / (A^n_p or B^n_p).

    ``ratio`` rescales the recursion constant for the weighted equation
    c1 x^m w_yy + c2 y^n w_xx = 0 with ratio = c2/(c1*eps); the pure
    equation uses ratio 1.
    """
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    if Ny < 0:
        raise ValueError("Ny must be nonnegative")
    a0, a1 = _alpha_slices(m, quad)
    factor = -Fraction(eps) * _frac(ratio)
    w = BivariateSeries({}, nx=INF, ny=Ny)

    for start, base, kind in ((0, a0, "A"), (1, a1, "B")):
        p = 0
        cur = base
        while start + p * (n + 2) <= Ny:
            denom = coeff(kind, n, p)
            row = cur.scale(factor**p / denom)
            if row.trunc is not INF and row.trunc < 0:
                raise ValueError(
                    f"generator truncation exhausted after {p} applications of D"
                )
            w.set_row(start + p * (n + 2), row)
            p += 1
            if start + p * (n + 2) > Ny:
                break
            cur = D_op(cur, m)  # never raises for admissible slices
            if not cur.coeffs and cur.trunc is INF:
                break
    return w


def alpha_recursion(m: int, n: int, eps: int, alpha0: Series1, alpha1: Series1,
                    K: int, ratio: Fraction = Fraction(1)) -> list:
    """Layers alpha_0..alpha_K by the direct recursion; independent of build_w.

    alpha_k = 0 for k = 2..n+1 and
    alpha_k = (-eps*ratio) / (k (k-1)) * D alpha_(k-(n+2)) for k >= n+2.
    Raises NotDivisible when alpha0/alpha1 violate the admissibility pattern.
    """
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    factor = -Fraction(eps) * _frac(ratio)
    layers = [alpha0, alpha1]
    for k in range(2, K + 1):
        if k < n + 2:
            layers.append(Series1.zero())
            continue
        prev = layers[k - (n + 2)]
        try:
            nxt = D_op(prev, m).scale(factor / (k * (k - 1)))
        except NotDivisible as exc:
            raise NotDivisible(
                exc.exponent, f"layer {k}: D not applicable to layer {k - (n + 2)}"
            ) from exc
        layers.append(nxt)
    return layers[: K + 1]


def assemble_layers(layers, Ny=None) -> BivariateSeries:
    """Stack univariate layers alpha_j into sum_j alpha_j(x) y^j."""
    ny = Ny if Ny is not None else len(layers) - 1
    w = BivariateSeries({}, nx=INF, ny=ny)
    for j, layer in enumerate(layers):
        if j > ny:
            break
        w.set_row(j, layer)
    return w


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------


def weighted_pde_residual(w: BivariateSeries, m: int, n: int, c1, c2) -> BivariateSeries:
    """c1 x^m w_yy + c2 y^n w_xx restricted to its trusted box."""
    term1 = w.diff_y().diff_y().shift(m, 0).scale(c1)
    term2 = w.diff_x().diff_x().shift(0, n).scale(c2)
    res = term1 + term2
    # x^m w_yy is complete through x-degree nx+m, but y^n w_xx only to nx-2
    res.nx = w.nx - 2 if w.nx is not INF else INF
    res.ny = w.ny - 2 if w.ny is not INF else INF
    res.coeffs = {k: c for k, c in res.coeffs.items() if k[0] <= res.nx and k[1] <= res.ny}
    return res


def pde_residual(w: BivariateSeries, m: int, n: int, eps: int) -> BivariateSeries:
    """x^m w_yy + eps y^n w_xx on the trusted box; exact zero for build_w output."""
    return weighted_pde_residual(w, m, n, 1, eps)


def surface_coefficients(m: int, n: int, eps: int):
    """(c1, c2) of the graph equation c1 s^m w_tt + c2 t^n w_ss = 0."""
    return (m + 2) * (m + 1), eps * (n + 2) * (n + 1)


def surface_ratio(m: int, n: int) -> Fraction:
    return Fraction((n + 2) * (n + 1), (m + 2) * (m + 1))


def surface_solution(m: int, n: int, eps: int, quad: GeneratorQuad, Ny: int) -> BivariateSeries:
    """Solution of the graph equation for s^(m+2) + eps t^(n+2), in (s, t)."""
    return build_w(m, n, eps, quad, Ny, ratio=surface_ratio(m, n))


def surface_pde_residual(w: BivariateSeries, m: int, n: int, eps: int) -> BivariateSeries:
    c1, c2 = surface_coefficients(m, n, eps)
    return weighted_pde_residual(w, m, n, c1, c2)


# ---------------------------------------------------------------------------
# convergence constant and the linear change of variables
# ---------------------------------------------------------------------------


def radius_constant(m: int, n: int) -> float:
    """min of ((m+1)/(4(m+2)))^(1/(m+2)) and ((n+2)(n+1)/(4(m+2)^2))^(1/(n+2))."""
    first = ((m + 1) / (4.0 * (m + 2))) ** (1.0 / (m + 2))
    second = ((n + 2) * (n + 1) / (4.0 * (m + 2) ** 2)) ** (1.0 / (n + 2))
    return min(first, second)


@dataclass(frozen=True)
class ScalingTriple:
    """x = P s, y = Q t maps the graph equation to lam * (pure equation).

    Invariants P^m = lam (m+2)(m+1) Q^2 and Q^n = lam (n+2)(n+1) P^2 hold to
    1e-12 relative.
    """

    P: float
    Q: float
    lam: float

    def residuals(self, m: int, n: int):
        a = (m + 2) * (m + 1)
        b = (n + 2) * (n + 1)
        r1 = self.P**m - self.lam * a * self.Q**2
        r2 = self.Q**n - self.lam * b * self.P**2
        return (r1 / max(abs(self.P**m), 1e-300), r2 / max(abs(self.Q**n), 1e-300))


def scaling_triple(m: int, n: int) -> ScalingTriple:
    if m < 1 or n < 1:
        raise ValueError("the graph scaling needs integers m, n >= 1")
    a = (m + 2) * (m + 1)
    b = (n + 2) * (n + 1)
    if m * n != 4:
        P = a ** (n / (m * n - 4)) * b ** (2 / (m * n - 4))
        Q = b ** (m / (m * n - 4)) * a ** (2 / (m * n - 4))
        triple = ScalingTriple(P=P, Q=Q, lam=1.0)
    else:
        # the homogeneous equation is scale invariant; lam is the free factor
        Q = (b / a) ** (1.0 / (n + 2))
        triple = ScalingTriple(P=1.0, Q=Q, lam=1.0 / (a * Q * Q))
    r1, r2 = triple.residuals(m, n)
    if max(abs(r1), abs(r2)) > 1e-12:
        raise AssertionError(f"scaling identities violated: {r1}, {r2}")
    return triple


# ---------------------------------------------------------------------------
# bending recovery and generator extraction
# ---------------------------------------------------------------------------


def recover_bending(w: BivariateSeries, m: int, n: int, eps: int) -> PolynomialField:
    """Recover U = (u, v, w) from a solution w(s, t) of the graph equation.

    u and v start as termwise integrals of -(m+2) s^(m+1) w_s and
    -eps (n+2) t^(n+1) w_t; the middle equation then forces a pure-t
    completion of u and a pure-s completion of v (these are genuinely
    nonzero for the y^1-slice generators, e.g. w = t needs
    v = -eps t^(n+2) - s^(m+2)).  The remaining 3-parameter rigid kernel
    (two constants and the rotation split of the leftover constant) is
    normalized to zero.  A non-separable leftover -- any mixed s^i t^j term
    with i, j >= 1 -- raises CompatibilityFailure: w was not a solution or
    the truncation is too tight.
    """
    res = surface_pde_residual(w, m, n, eps)
    if not res.is_zero():
        _, idx = res.max_abs_entry()
        raise CompatibilityFailure(f"w does not solve the graph equation (coefficient {idx})")

    u: dict = {}
    v: dict = {}
    for (i, j), c in w.coeffs.items():
        if i >= 1:
            # -(m+2) * integral of s^(m+1) * i c s^(i-1) t^j ds
            k = i + m + 1
            u[(k, j)] = u.get((k, j), Fraction(0)) - Fraction(m + 2, 1) * c * i / k
        if j >= 1:
            k = j + n + 1
            v[(i, k)] = v.get((i, k), Fraction(0)) - Fraction(eps * (n + 2), 1) * c * j / k
    u_nx = w.nx + m + 1 if w.nx is not INF else INF
    v_ny = w.ny + n + 1 if w.ny is not INF else INF
    u_series = BivariateSeries(u, nx=u_nx, ny=w.ny)
    v_series = BivariateSeries(v, nx=w.nx, ny=v_ny)

    sm = BivariateSeries({(m + 1, 0): m + 2}, nx=INF, ny=INF)
    tn = BivariateSeries({(0, n + 1): eps * (n + 2)}, nx=INF, ny=INF)
    leftover = (
        u_series.diff_y()
        + v_series.diff_x()
        + _mul(sm, w.diff_y())
        + _mul(tn, w.diff_x())
    )
    mixed = {k: c for k, c in leftover.coeffs.items()
             if k[0] >= 1 and k[1] >= 1 and k[0] <= leftover.nx and k[1] <= leftover.ny
             and c != 0}
    if mixed:
        idx = max(mixed, key=lambda k: abs(mixed[k]))
        raise CompatibilityFailure(f"middle equation nonzero at coefficient {idx}")

    # separable completion: u_t picks up the pure-t part, v_s the pure-s
    # part (constants go to v, which pins the rotation freedom)
    for (i, j), c in leftover.coeffs.items():
        if c == 0 or i > leftover.nx or j > leftover.ny:
            continue
        if j >= 1 and i == 0:
            u[(0, j + 1)] = u.get((0, j + 1), Fraction(0)) - c / (j + 1)
        elif j == 0:
            v[(i + 1, 0)] = v.get((i + 1, 0), Fraction(0)) - c / (i + 1)
    u_series = BivariateSeries(u, nx=u_nx, ny=w.ny)
    v_series = BivariateSeries(v, nx=w.nx, ny=v_ny)

    middle = (
        u_series.diff_y()
        + v_series.diff_x()
        + _mul(sm, w.diff_y())
        + _mul(tn, w.diff_x())
    )
    if not middle.is_zero():
        _, idx = middle.max_abs_entry()
        raise CompatibilityFailure(f"middle equation nonzero at coefficient {idx}")
    return PolynomialField(u_series.to_poly2(), v_series.to_poly2(), w.to_poly2())


def _mul(a: BivariateSeries, b: BivariateSeries) -> BivariateSeries:
    ax = min((i for (i, _) in a.coeffs), default=0)
    ay = min((j for (_, j) in a.coeffs), default=0)
    bx = min((i for (i, _) in b.coeffs), default=0)
    by = min((j for (_, j) in b.coeffs), default=0)
    nx = min(a.nx + bx if a.nx is not INF else INF, b.nx + ax if b.nx is not INF else INF)
    ny = min(a.ny + by if a.ny is not INF else INF, b.ny + ay if b.ny is not INF else INF)
    out: dict = {}
    for (i1, j1), c1 in a.coeffs.items():
        for (i2, j2), c2 in b.coeffs.items():
            k = (i1 + i2, j1 + j2)
            if k[0] > nx or k[1] > ny:
                continue
            val = out.get(k, Fraction(0)) + c1 * c2
            if val == 0:
                out.pop(k, None)
            else:
                out[k] = val
    r = BivariateSeries.__new__(BivariateSeries)
    r.coeffs, r.nx, r.ny = out, nx, ny
    return r


def extract_generators(w: BivariateSeries, m: int, n: int, eps: int,
                       ratio: Fraction = Fraction(1)) -> GeneratorQuad:
    """Invert build_w: read (h1..h4) off the y^0 / y^1 slices and verify.

    Exponent residues of the slices modulo m+2 must lie in {0, 1}; the
    reconstruction from the extracted quad must reproduce w on its trust
    box.  Violations raise NotInSolutionForm naming the offending
    coefficient.
    """
    k = m + 2
    quads = []
    for row_idx in (0, 1):
        slice_ = w.row(row_idx)
        even: dict = {}
        odd: dict = {}
        for e, c in slice_.coeffs.items():
            r = e % k
            if r == 0:
                even[e // k] = c
            elif r == 1:
                odd[(e - 1) // k] = c
            else:
                raise NotInSolutionForm(
                    (e, row_idx), f"exponent {e} in the y^{row_idx} slice is "
                    f"congruent to {r} mod {k}"
                )
        t_even = INF if w.nx is INF else w.nx // k
        t_odd = INF if w.nx is INF else (w.nx - 1) // k
        quads.append(Series1(even, t_even))
        quads.append(Series1(odd, t_odd))
    quad = GeneratorQuad(*quads)

    ny_eff = w.ny if w.ny is not INF else max(w.rows(), default=0)
    rebuilt = build_w(m, n, eps, quad, int(ny_eff), ratio=ratio)
    nx_cmp = min(w.nx, rebuilt.nx)
    keys = {kk for kk in w.coeffs if kk[0] <= nx_cmp and kk[1] <= ny_eff}
    keys |= {kk for kk in rebuilt.coeffs if kk[0] <= nx_cmp and kk[1] <= ny_eff}
    for kk in sorted(keys):
        if w.coeffs.get(kk, Fraction(0)) != rebuilt.coeffs.get(kk, Fraction(0)):
            raise NotInSolutionForm(kk, f"coefficient {kk} deviates from the generated family")
    return quad


def layer_partial_sums(w: BivariateSeries, x: float, y: float):
    """Partial sums over y-layers at (x, y): S_J = sum_(j<=J) row_j(x) y^j."""
    sums = []
    acc = 0.0
    for j in range(int(max(w.rows(), default=0)) + 1):
        acc += w.row(j).eval_float(x) * y**j
        sums.append(acc)
    return sums
