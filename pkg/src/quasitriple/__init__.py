"""Finite weighted-matrix models of boundary triples for adjoint pairs."""

from .numcore import (
    ConvergenceError,
    ShapeError,
    SingularMatrixError,
    WeightedSpace,
    null_basis,
    pencil_eigenvalues,
    rank,
    solve,
    weighted_adjoint,
)
from .triple import (
    ConstructionError,
    ResolventPointError,
    SpectralSample,
    TripleModel,
    a0_resolvent,
    build,
    check_density,
    check_maximality,
    gamma,
    gamma_shift_check,
    gamma_star_check,
    gamma_tilde,
    green_defect,
    minimal_operators,
    swap,
    weyl_identity_check,
    weyl_representation_check,
)
from .extensions import (
    BirmanSchwingerSingular,
    BoundaryParameter,
    ContractError,
    VerificationReport,
    ab_resolvent_direct,
    adjoint_duality_check,
    bs_test,
    eigenvalue_search,
    krein_hypotheses,
    krein_resolvent,
    symmetric_suite,
)
from .models import (
    Coefficients1D,
    Grid2D,
    analytic_dtn_1d,
    builtin,
    convection_diffusion_1d,
    elliptic_2d,
    sturm_liouville_1d,
    synthetic_pair,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "ShapeError",
    "SingularMatrixError",
    "WeightedSpace",
    "null_basis",
    "pencil_eigenvalues",
    "rank",
    "solve",
    "weighted_adjoint",
    "ConstructionError",
    "ResolventPointError",
    "SpectralSample",
    "TripleModel",
    "a0_resolvent",
    "build",
    "check_density",
    "check_maximality",
    "gamma",
    "gamma_shift_check",
    "gamma_star_check",
    "gamma_tilde",
    "green_defect",
    "minimal_operators",
    "swap",
    "weyl_identity_check",
    "weyl_representation_check",
    "BirmanSchwingerSingular",
    "BoundaryParameter",
    "ContractError",
    "VerificationReport",
    "ab_resolvent_direct",
    "adjoint_duality_check",
    "bs_test",
    "eigenvalue_search",
    "krein_hypotheses",
    "krein_resolvent",
    "symmetric_suite",
    "Coefficients1D",
    "Grid2D",
    "analytic_dtn_1d",
    "builtin",
    "convection_diffusion_1d",
    "elliptic_2d",
    "sturm_liouville_1d",
    "synthetic_pair",
]
