"""Self-similar step functions, discrete Sturm-Liouville weights and spectra.

The canonical example throughout is a = d = 1/2, beta1 = 0, beta2 = 1:
masses 2^(1-k) at 1 - 2^(-k), q = 4, r = 1/2, eigenvalues approaching
4^k. See the module docstrings for the construction (selfsim), the matrix
renderings and quadratic forms (operators), the eigensolvers (eigensolve)
and the spectral laws (spectral).
"""

from .eigensolve import (
    EigenvalueList,
    PencilProblem,
    dense_symmetric_eigs,
    inverse_iteration,
    pencil_eigenpairs,
    solve_pencil,
    sturm_count,
    tridiag_cholesky,
    tridiag_eigs,
)
from .errors import (
    AtBreakpoint,
    DegenerateWeight,
    DepthExceeded,
    EmptyWindow,
    IndefiniteCase,
    NonConvergence,
    NotContractive,
    NotPositiveDefinite,
    NumericalError,
    OutOfRange,
    RangeOverflow,
    ValidationError,
    WrongSign,
    ZeroEigenvalue,
)
from .operators import (
    SECTION_KINDS,
    BandedSection,
    SlopeSequence,
    TridiagonalSymmetric,
    adjoint_domain_residual,
    boundary_functional,
    default_form_depth,
    eigenfunction_slopes,
    extension_condition_trace,
    green_kernel_matrix,
    mass_matrix,
    quadratic_form_sides,
    section,
    stiffness_matrix,
    symmetrized_section,
    symmetry_defect,
)
from .selfsim import (
    DiscreteWeight,
    SelfSimilarParams,
    StepFunction,
    apply_similarity,
    fixed_point_residual,
    make_params,
    step_function,
    step_value,
    weight_truncation,
)
from .spectral import (
    FORMULATIONS,
    AsymptoticsReport,
    CrossValidation,
    IndefiniteReport,
    SpectrumResult,
    compute_spectrum,
    cross_validate,
    estimate_c,
    indefinite_report,
    stable_window,
    verify_suite,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticsReport",
    "AtBreakpoint",
    "BandedSection",
    "CrossValidation",
    "DegenerateWeight",
    "DepthExceeded",
    "DiscreteWeight",
    "EigenvalueList",
    "EmptyWindow",
    "FORMULATIONS",
    "IndefiniteCase",
    "IndefiniteReport",
    "NonConvergence",
    "NotContractive",
    "NotPositiveDefinite",
    "NumericalError",
    "OutOfRange",
    "PencilProblem",
    "RangeOverflow",
    "SECTION_KINDS",
    "SelfSimilarParams",
    "SlopeSequence",
    "SpectrumResult",
    "StepFunction",
    "TridiagonalSymmetric",
    "ValidationError",
    "WrongSign",
    "ZeroEigenvalue",
    "adjoint_domain_residual",
    "apply_similarity",
    "boundary_functional",
    "compute_spectrum",
    "cross_validate",
    "default_form_depth",
    "dense_symmetric_eigs",
    "eigenfunction_slopes",
    "estimate_c",
    "extension_condition_trace",
    "fixed_point_residual",
    "green_kernel_matrix",
    "indefinite_report",
    "inverse_iteration",
    "make_params",
    "mass_matrix",
    "pencil_eigenpairs",
    "quadratic_form_sides",
    "section",
    "solve_pencil",
    "stable_window",
    "step_function",
    "step_value",
    "stiffness_matrix",
    "sturm_count",
    "symmetrized_section",
    "symmetry_defect",
    "tridiag_cholesky",
    "tridiag_eigs",
    "verify_suite",
    "weight_truncation",
]
