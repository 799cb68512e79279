"""Hasse-Witt matrices, higher alpha matrices, truncated periods and unit roots."""

from .errors import (
    ArtifactError, BudgetExceeded, FieldTooLarge, MalformedInput, NonLaurentResult,
    NonOrdinary, NonUnitDeterminant, NonUnitVertexCoefficient, PrecisionMismatch,
    Supersingular, UnboundedPolytope, UnsupportedAmbient,
)
from .hasse_witt import (
    HypersurfaceFamily, alpha_matrix, cartier_tau, connection_matrix_1param,
    frobenius_unit_root_matrix, hw_complete_intersection, hw_matrix_toric, hw_scalar_cy,
    verify_congruences,
)
from .lattice import LatticePolytope, ToricData, polytope_from_toric
from .laurent import LaurentPoly, coefficient_of_power, geometric_inverse_series, multiply, power
from .periods import (
    check_truncation_relation, dwork_ratio, hypergeometric_dwork, invertibility_certificate,
    period_series, truncate_series,
)
from .rings import (
    IntMod, Matrix, PadicMatrix, ParamPoly, FrobeniusEndo, apply_frobenius, matrix_inverse,
    multinomial, teichmuller_lift, valuation,
)

__version__ = "0.1.0"
