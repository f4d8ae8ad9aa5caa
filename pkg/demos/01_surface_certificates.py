"""Walkthrough: fundamental forms and bending certificates on a paraboloid.

Every candidate deformation gets two independent certificates here:
pointwise residuals of the linearized equations, and the log-log slope of
the metric defect under the epsilon sweep.
"""

from fractions import Fraction as F

import numpy as np

import bendkit as bk
from bendkit.fields import PolynomialField
from bendkit.polynomial import Poly2

surface = bk.paraboloid()          # graph of z = s^2 + t^2

# --- curvature data ---------------------------------------------------------
for point in [(0.0, 0.0), (1.0, 0.0), (0.5, -0.5)]:
    fd = bk.fundamental_data(surface, point)
    print(f"at {point}: e={fd.e:.4f} f={fd.f:.4f} g={fd.g:.4f} K={fd.K:.4f}")

# --- a rigid-motion field is always a first-order bending -------------------
rigid = bk.trivial_field((0.0, 0.0, 1.0), (0.0, 0.0, 0.0), surface)
family = bk.DeformationFamily(surface, [rigid])
res = bk.bending_residual(family, 1, (0.3, -0.7))
print("\nrotation field residual:", [float(r) for r in res])

# --- a nontrivial exact bending of the paraboloid ---------------------------
# (-2s^3/3, 2t^3/3, (s^2 - t^2)/2) solves the first-order system exactly
cubic = PolynomialField(
    Poly2({(3, 0): F(-2, 3)}),
    Poly2({(0, 3): F(2, 3)}),
    Poly2({(2, 0): F(1, 2), (0, 2): F(-1, 2)}),
)
family = bk.DeformationFamily(surface, [cubic])
print("cubic field residual at rational points (exact):",
      bk.bending_residual(family, 1, (F(2, 7), F(-3, 5))))

fit = bk.is_trivial(cubic, surface, tol=1e-8)
print("triviality fit: trivial =", fit.trivial, " residual =", f"{fit.residual:.2e}")

# --- order certification by the metric defect slope -------------------------
grid = [(0.1 * i, 0.09 * j) for i in range(-3, 4) for j in range(-3, 4)]
report = bk.metric_defect_order(family, grid, [1e-1, 1e-2, 1e-3, 1e-4])
print("\nmetric defect slope:", round(report.slope, 4), "(slope >= 2 certifies order 1)")
for eps, d in zip(report.eps, report.defects):
    print(f"  eps = {eps:8.1e}   defect = {d:.3e}")

# a field that is NOT a bending shows slope ~1
stretch = PolynomialField(Poly2({(1, 0): 1}), Poly2(), Poly2())
bad = bk.DeformationFamily(bk.GraphSurface(Poly2()), [stretch])
print("non-bending slope:", round(bk.metric_defect_order(bad, grid,
                                                         [1e-1, 1e-2, 1e-3, 1e-4]).slope, 4))
