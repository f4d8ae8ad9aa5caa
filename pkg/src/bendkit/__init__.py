"""bendkit: construction and numerical certification of infinitesimal bendings.

Three construction routes are provided:

* exact generator-quad power series for graphs of s^(m+2) + eps t^(n+2)
  (:mod:`bendkit.series`),
* periodic-system spectra and forced solves for graphs of homogeneous
  functions z = r^m P(theta) (:mod:`bendkit.floquet`),
* pointwise certificates for any candidate family: bending residuals and
  metric-defect slopes (:mod:`bendkit.surface_core`) and the complex
  reduction residual on positively curved patches (:mod:`bendkit.vekua`).
"""

from .fields import CallableField, DeformationFamily, PolynomialField, TrivialField, VectorField3
from .floquet import (
    BendingBuild,
    HomogeneousSurface,
    PolarField,
    SpectralData,
    asymptotic_eigenvalue,
    b_invariants,
    build_bending,
    coefficient_matrices,
    curvature_margin,
    monodromy,
    nonresonance,
    periodic_solve,
    polar_hessian,
    spectrum,
)
from .fourier import PeriodicProfile
from .polynomial import Poly1, Poly2
from .series import (
    BivariateSeries,
    GeneratorQuad,
    ScalingTriple,
    Series1,
    alpha_recursion,
    build_w,
    coeff,
    D_op,
    extract_generators,
    pde_residual,
    radius_constant,
    recover_bending,
    scaling_triple,
    surface_solution,
)
from .surface_core import (
    FormData,
    bending_residual,
    fundamental_data,
    is_trivial,
    metric_defect_order,
    rhs_terms,
    trivial_field,
)
from .surfaces import Annulus, GraphSurface, NumericalSurface, ParametricSurface, Rectangle, paraboloid, smn_surface
from .vekua import (
    AsymptoticData,
    VekuaCoefficients,
    asymptotic_data,
    phi_psi_h_convert,
    vekua_coefficients,
    vekua_residual,
)

__version__ = "0.1.0"
