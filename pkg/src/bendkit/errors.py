"""Exception hierarchy shared by all bendkit modules."""


class BendkitError(Exception):
    """Base class for all bendkit errors."""


class DegenerateParametrization(BendkitError):
    """||R_s x R_t|| fell below the machine-scaled regularity threshold."""


class MissingLowerOrderFields(BendkitError):
    """Source terms of order j were requested with fewer than j-1 lower fields."""


class DegenerateSampleSet(BendkitError):
    """Rigid-motion fit was attempted on a collinear / rank-deficient sample set."""


class NegativeCurvature(BendkitError):
    """eg - f^2 < 0 beyond tolerance: the asymptotic direction field is undefined."""


class FlatPointDegeneracy(BendkitError):
    """|C| is below the flat-point threshold; the reduction coefficients degenerate."""


class SingularConversion(BendkitError):
    """(phi, psi) <-> h conversion attempted where lambda is real or g vanishes."""


class NonIntegrableCoefficient(BendkitError):
    """Adaptive refinement of the c1/c2 integrals diverged (L^1 hypothesis violated)."""


class IntegratorFailure(BendkitError):
    """The ODE integrator failed (step underflow or solver error)."""


class RangeTooCoarse(BendkitError):
    """Two spectrum roots could not be separated within the refinement cap."""


class ResonantForcing(BendkitError):
    """I - Phi_mu(2*pi) is numerically singular: mu hit the periodic spectrum."""

    def __init__(self, mu, message=None):
        self.mu = mu
        super().__init__(message or f"forcing frequency mu={mu} is in the periodic spectrum")


class ResonantExponent(BendkitError):
    """A radial exponent generated by the bending recursion hit the spectrum."""

    def __init__(self, exponent, detail=""):
        self.exponent = exponent
        super().__init__(f"resonant exponent {exponent}" + (f": {detail}" if detail else ""))


class SmoothnessUnreachable(BendkitError):
    """No eigenvalue in the searched range makes every radial exponent >= k."""


class CurvatureViolation(BendkitError):
    """The positivity margin of the homogeneous surface is not strictly positive."""

    def __init__(self, margin, locations=()):
        self.margin = margin
        self.locations = list(locations)
        super().__init__(f"curvature margin {margin} <= 0 (violating theta: {self.locations})")


class NotDivisible(BendkitError):
    """f'' is not divisible by z^m; names the offending exponent of f''."""

    def __init__(self, exponent, message=None):
        self.exponent = exponent
        super().__init__(message or f"second derivative has a nonzero coefficient at z^{exponent} < z^m")


class NotInSolutionForm(BendkitError):
    """A bivariate series is not in the solution family; names the offending coefficient."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"coefficient at {index} violates the solution form")


class CompatibilityFailure(BendkitError):
    """The middle linearized equation is nonzero after recovering (u, v)."""


class SchemaError(BendkitError):
    """A JSON document does not match its published schema."""
