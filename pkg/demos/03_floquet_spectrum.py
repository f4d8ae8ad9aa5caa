"""Walkthrough: periodic-system spectra for homogeneous graphs z = r^m P(theta).

lambda is an eigenvalue when the monodromy of X' = lambda Lam(theta) X over
one period has a fixed vector (trace = 2); the combined slot index j obeys
lambda_j ~ j pi / b1 + b2 / b1.
"""

import numpy as np

import bendkit as bk
from bendkit import floquet as fl
from bendkit.fourier import PeriodicProfile

# --- the rotationally symmetric case has a closed form -----------------------
P1 = PeriodicProfile(cos=[1.0])
print("monodromy trace at lambda = 0.37 (expect 2 cos(2 pi 0.37) = "
      f"{2 * np.cos(2 * np.pi * 0.37):.6f}):", np.trace(bk.monodromy(2.0, P1, 0.37)).round(6))

spec = bk.spectrum(2.0, P1, (0.5, 4.5))
print("P = 1 periodic spectrum on [0.5, 4.5]:",
      [round(ev.value, 8) for ev in spec.eigenvalues])

# --- a general profile: quadrature invariants + asymptotic law ---------------
P = PeriodicProfile(cos=[1.0, 0.0, 0.0, 0.15])   # 1 + 0.15 cos(3 theta)
margin = bk.curvature_margin(2.0, P)
binv = fl.b_invariants(2.0, P)
print(f"\nP = 1 + 0.15cos(3t): margin {margin:.4f}, b1 = {binv.b1:.9f}, b2 = {binv.b2:.6f}")

hi = fl.asymptotic_eigenvalue(14, binv.b1, binv.b2)
spec = bk.spectrum(2.0, P, (0.05, hi), boundary="combined")
print(" j  tag  boundary      lambda     asymptote        gap")
for ev in spec.eigenvalues:
    asy = fl.asymptotic_eigenvalue(ev.j, spec.b1, spec.b2)
    print(f"{ev.j:3d}  {ev.tag}   {ev.boundary:<12} {ev.value:10.6f} {asy:10.6f} "
          f"{ev.value - asy:12.2e}")

rep = bk.nonresonance(binv.b1, binv.b2, 2.0, 2)
print(f"\norder-2 nonresonance: pass={rep.passes} margin={rep.margin:.4f} ({rep.worst})")
