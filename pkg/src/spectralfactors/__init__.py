"""Complete families of minimal spectral factors for discrete-time rational
spectral densities.

Starting from a minimal realization of the outer (minimum-phase) factor of a
density, the package constructs the remaining extremal factors, the
conjugate phase function with its structural Gramian, parametrizes every
left all-pass divisor by invariant subspaces, and generates and verifies the
resulting family of minimal spectral factors.
"""

from .errors import (
    AmbiguousEigenspace,
    ComplexPairSplit,
    CompressionNotPD,
    DegreeAdditivityViolation,
    DegreeViolation,
    DimensionMismatch,
    EvaluationAtPole,
    GramianIdentityViolation,
    InvalidSubspace,
    NoParameterFound,
    NotAFactor,
    NotInvariant,
    NotMinimalFactor,
    NotOuter,
    NotPositiveDefinite,
    NotPositiveDefiniteY,
    ParameterHitsSpectrum,
    RankDeficientBasis,
    SingularFeedthrough,
    SingularStateMatrix,
    SingularSteinOperator,
    SpectralFactorsError,
    SpectrumMismatch,
)
from .matnum import (
    DEFAULT_TOL,
    ToleranceConfig,
    eigen_blocks,
    invariant_basis,
    is_invariant,
    orth_projector,
    pseudo_inverse,
    solve_stein,
    sym_sqrt,
)
from .statespace import (
    PoleZeroReport,
    Realization,
    adjoint,
    choose_moebius_parameter,
    constant,
    evalfr,
    evalfr_many,
    identity,
    inverse,
    mcmillan_degree,
    minimal,
    moebius,
    poles_zeros,
    series,
    transfer_equal,
)
from .spectral import (
    ConjugatePhase,
    ExtremalSet,
    GramianCheck,
    allpass_residual,
    check_gramian_identities,
    conjugate_phase,
    extremal_set,
    is_all_pass,
    outer_to_plus,
    plus_to_bar_plus,
    spectrum_sample,
    spectrum_samples,
    validate_outer,
    zero_matrix,
)
from .divisors import (
    AllPassDivisor,
    ContinuumFamily,
    DivisorEnumeration,
    SubspaceSpec,
    continuum_angle_basis,
    divisor_from_projector,
    enumerate_divisors,
    projector_from_spec,
    right_complement,
)
from .factors import (
    FactorReport,
    extract_left_divisor,
    factor_family,
    minimal_factor,
    orthogonal_equivalence_gap,
    verify_factor,
)
from .modelio import ModelDocument, read_model, write_model

__version__ = "0.1.0"

__all__ = [
    "AllPassDivisor",
    "AmbiguousEigenspace",
    "ComplexPairSplit",
    "CompressionNotPD",
    "ConjugatePhase",
    "ContinuumFamily",
    "DEFAULT_TOL",
    "DegreeAdditivityViolation",
    "DegreeViolation",
    "DimensionMismatch",
    "DivisorEnumeration",
    "EvaluationAtPole",
    "ExtremalSet",
    "FactorReport",
    "GramianCheck",
    "GramianIdentityViolation",
    "InvalidSubspace",
    "ModelDocument",
    "NoParameterFound",
    "NotAFactor",
    "NotInvariant",
    "NotMinimalFactor",
    "NotOuter",
    "NotPositiveDefinite",
    "NotPositiveDefiniteY",
    "ParameterHitsSpectrum",
    "PoleZeroReport",
    "RankDeficientBasis",
    "Realization",
    "SingularFeedthrough",
    "SingularStateMatrix",
    "SingularSteinOperator",
    "SpectralFactorsError",
    "SpectrumMismatch",
    "SubspaceSpec",
    "ToleranceConfig",
    "adjoint",
    "allpass_residual",
    "check_gramian_identities",
    "choose_moebius_parameter",
    "conjugate_phase",
    "constant",
    "continuum_angle_basis",
    "divisor_from_projector",
    "eigen_blocks",
    "enumerate_divisors",
    "evalfr",
    "evalfr_many",
    "extract_left_divisor",
    "extremal_set",
    "factor_family",
    "identity",
    "invariant_basis",
    "inverse",
    "is_all_pass",
    "is_invariant",
    "mcmillan_degree",
    "minimal",
    "minimal_factor",
    "moebius",
    "orth_projector",
    "orthogonal_equivalence_gap",
    "outer_to_plus",
    "plus_to_bar_plus",
    "poles_zeros",
    "projector_from_spec",
    "pseudo_inverse",
    "read_model",
    "right_complement",
    "series",
    "solve_stein",
    "spectrum_sample",
    "spectrum_samples",
    "sym_sqrt",
    "transfer_equal",
    "validate_outer",
    "verify_factor",
    "write_model",
    "zero_matrix",
]
