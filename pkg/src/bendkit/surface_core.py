"""Fundamental forms, bending-field equations and order certification.

The first-order system certified here is, per order j,

    R_s . U_s = F,   R_s . U_t + R_t . U_s = G,   R_t . U_t = H,

with F = G = H = 0 at order 1 and quadratic sums of the lower-order fields
afterwards.  A family R + 2 eps U^1 + ... + 2 eps^m U^m is an order-m
bending exactly when these hold for j = 1..m, which is certified two ways:
pointwise residuals, and the log-log slope of the metric defect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParametrization, DegenerateSampleSet, MissingLowerOrderFields
from .fields import DeformationFamily, TrivialField, VectorField3
from .surfaces import ParametricSurface
from .vec3 import cross3, dot3, norm3

MACHINE_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class FormData:
    """First and second fundamental forms at a point, plus derived curvature."""

    E: float
    F: float
    G: float
    e: float
    f: float
    g: float
    N: tuple
    area_elem: float
    K: float


def fundamental_data(surface: ParametricSurface, point) -> FormData:
    """Evaluate both fundamental forms and the Gaussian curvature at ``point``.

    Raises DegenerateParametrization when ||R_s x R_t|| is below the
    machine-scaled regularity threshold.
    """
    s, t = point
    Rs = surface.partial(1, 0, s, t)
    Rt = surface.partial(0, 1, s, t)
    Rss = surface.partial(2, 0, s, t)
    Rst = surface.partial(1, 1, s, t)
    Rtt = surface.partial(0, 2, s, t)

    nvec = cross3(Rs, Rt)
    area = norm3(nvec)
    scale = max(norm3(Rs), norm3(Rt), 1.0)
    if area < 64 * MACHINE_EPS * scale * scale:
        raise DegenerateParametrization(f"||R_s x R_t|| = {area} at {point}")
    N = tuple(float(c) / area for c in nvec)

    E = float(dot3(Rs, Rs))
    F = float(dot3(Rs, Rt))
    G = float(dot3(Rt, Rt))
    e = float(dot3(Rss, N))
    f = float(dot3(Rst, N))
    g = float(dot3(Rtt, N))
    K = (e * g - f * f) / (area * area)
    return FormData(E=E, F=F, G=G, e=e, f=f, g=g, N=N, area_elem=area, K=K)


def rhs_terms(fields, j: int, point):
    """Source terms (F^j, G^j, H^j) of the order-j bending equations.

    Zero for j = 1.  For j >= 2 requires U^1 .. U^(j-1) in ``fields``;
    results are exact when the fields and the point are rational.
    """
    if j < 1:
        raise ValueError("order index j must be >= 1")
    if j == 1:
        return (0, 0, 0)
    if len(fields) < j - 1:
        raise MissingLowerOrderFields(f"order {j} needs {j - 1} lower fields, got {len(fields)}")
    s, t = point
    ders = [(U.partial(1, 0, s, t), U.partial(0, 1, s, t)) for U in fields[: j - 1]]
    F = 0
    G = 0
    H = 0
    for i in range(1, j):
        Us_i, Ut_i = ders[i - 1]
        Us_k, Ut_k = ders[j - i - 1]
        F = F - dot3(Us_k, Us_i)
        H = H - dot3(Ut_k, Ut_i)
        G = G - (dot3(Us_i, Ut_k) + dot3(Ut_i, Us_k))
    return (F, G, H)


def bending_residual(deformation: DeformationFamily, j: int, point):
    """Left-minus-right of the three order-j equations at ``point``."""
    if not 1 <= j <= deformation.order:
        raise ValueError(f"order index {j} outside 1..{deformation.order}")
    s, t = point
    surf = deformation.surface
    Rs = surf.partial(1, 0, s, t)
    Rt = surf.partial(0, 1, s, t)
    U = deformation.fields[j - 1]
    Us = U.partial(1, 0, s, t)
    Ut = U.partial(0, 1, s, t)
    F, G, H = rhs_terms(deformation.fields, j, point)
    r1 = dot3(Rs, Us) - F
    r2 = dot3(Rs, Ut) + dot3(Rt, Us) - G
    r3 = dot3(Rt, Ut) - H
    return (r1, r2, r3)


def max_bending_residual(deformation: DeformationFamily, grid) -> list:
    """Max |residual| per order over a grid; convenience for certificates."""
    out = []
    for j in range(1, deformation.order + 1):
        worst = 0.0
        for s, t in grid:
            r = bending_residual(deformation, j, (s, t))
            worst = max(worst, max(abs(float(c)) for c in r))
        out.append(worst)
    return out


@dataclass
class MetricDefectReport:
    slope: float
    eps: list
    defects: list
    below_noise_floor: bool
    norm: str = "max"


def _metric_entries(surface, fields, eps, s, t):
    Rs = np.array(surface.partial(1, 0, s, t), dtype=float)
    Rt = np.array(surface.partial(0, 1, s, t), dtype=float)
    for j, U in enumerate(fields, start=1):
        Rs = Rs + 2.0 * eps**j * np.array(U.partial(1, 0, s, t), dtype=float)
        Rt = Rt + 2.0 * eps**j * np.array(U.partial(0, 1, s, t), dtype=float)
    return np.array([Rs @ Rs, Rs @ Rt, Rt @ Rt])


def metric_defect_order(
    deformation: DeformationFamily,
    grid,
    eps_list,
    norm: str = "max",
) -> MetricDefectReport:
    """Fit the log-log slope of the metric defect Delta(eps).

    Delta(eps) aggregates |E_eps - E|, |F_eps - F|, |G_eps - G| over the grid
    (max entry by default, Frobenius with norm="fro").  A fitted slope
    >= m + 1 - tol certifies order m.  Needs >= 4 eps values spanning at
    least two decades.
    """
    eps_list = sorted((float(e) for e in eps_list), reverse=True)
    if len(eps_list) < 4:
        raise ValueError("need at least 4 eps values")
    if eps_list[0] / eps_list[-1] < 99.0:
        raise ValueError("eps values must span at least two decades")
    if norm not in ("max", "fro"):
        raise ValueError("norm must be 'max' or 'fro'")

    surf = deformation.surface
    pts = [(float(s), float(t)) for s, t in grid]
    if not pts:
        raise ValueError("grid is empty")
    base = {p: _metric_entries(surf, [], 0.0, *p) for p in pts}
    scale = max(float(np.max(np.abs(b))) for b in base.values())

    defects = []
    for eps in eps_list:
        worst = 0.0
        acc = 0.0
        for p in pts:
            d = _metric_entries(surf, deformation.fields, eps, *p) - base[p]
            worst = max(worst, float(np.max(np.abs(d))))
            acc += float(d @ d)
        defects.append(worst if norm == "max" else math.sqrt(acc))

    floor = 10.0 * MACHINE_EPS * max(scale, 1.0)
    below = all(d < floor for d in defects)
    if below:
        slope = float("nan")
    else:
        slope = float(np.polyfit(np.log(eps_list), np.log(np.maximum(defects, 1e-300)), 1)[0])
    return MetricDefectReport(slope=slope, eps=eps_list, defects=defects,
                              below_noise_floor=below, norm=norm)


def trivial_field(A, B, surface: ParametricSurface) -> TrivialField:
    """The rigid-motion bending field A x R + B."""
    return TrivialField(A, B, surface)


@dataclass
class TrivialityFit:
    trivial: bool
    A: np.ndarray
    B: np.ndarray
    residual: float


def is_trivial(field: VectorField3, surface: ParametricSurface, tol: float = 1e-7,
               samples=None) -> TrivialityFit:
    """Least-squares fit of (A, B) minimizing ||U - (A x R + B)|| over samples.

    The field is trivial when the fit residual (max norm over samples) is
    below ``tol``.  Raises DegenerateSampleSet when the sample geometry
    cannot determine (A, B) (e.g. collinear positions).
    """
    if samples is None:
        samples = surface.domain.interior_grid(4)
    samples = [(float(s), float(t)) for s, t in samples]
    if len(samples) < 3:
        raise ValueError("need at least 3 sample points")

    rows = []
    rhs = []
    for s, t in samples:
        x, y, z = (float(c) for c in surface.partial(0, 0, s, t))
        u = [float(c) for c in field.partial(0, 0, s, t)]
        # A x R = -R x A = [-[R]_x] A
        rows.append([0.0, z, -y, 1.0, 0.0, 0.0])
        rows.append([-z, 0.0, x, 0.0, 1.0, 0.0])
        rows.append([y, -x, 0.0, 0.0, 0.0, 1.0])
        rhs.extend(u)
    M = np.array(rows)
    b = np.array(rhs)

    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] < 1e3 * MACHINE_EPS * sv[0] * len(samples):
        raise DegenerateSampleSet("sample set does not determine (A, B)")

    sol, *_ = np.linalg.lstsq(M, b, rcond=None)
    resid = float(np.max(np.abs(M @ sol - b)))
    return TrivialityFit(trivial=resid < tol, A=sol[:3], B=sol[3:], residual=resid)
