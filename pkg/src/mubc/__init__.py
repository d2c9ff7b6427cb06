"""Mutually unbiased continuous-variable bases over exact and float scalars.

The package is organized around the unsigned symplectic product of
direction vectors: exact quadratic-field scalars (`exact`), products and
verification (`symplectic`), metaplectic overlaps through Cayley matrices
(`metaplectic`), certificates and searches (`search`), an independent
quadrature oracle (`oracle`), and a CLI (`cli`).
"""

from .errors import (
    ContextMismatch,
    DegenerateBlock,
    DimensionMismatch,
    DivisionByZero,
    ExactSqrtUnavailable,
    InvalidDirection,
    InvalidProblem,
    InvalidTarget,
    LimitExceeded,
    MubcError,
    NonInvertible,
    NotRealEmbeddable,
    ParallelDirections,
    PreconditionFailed,
    SingularCayley,
)
from .exact import GOLDEN, Ambient, QuadNum, Rat, quad_sqrt
from .metaplectic import (
    BlockDecomposition,
    MetaplecticSpec,
    cayley_matrix,
    compose_overlap_sq,
    genmu_overlap_sq,
    interleaved_j,
    interleaved_to_stacked,
    is_symplectic,
    ordering_permutation,
    random_symplectic,
    rotation_matrix,
    special_m,
    stacked_j,
    stacked_to_interleaved,
    symplectic_defect,
)
from .oracle import (
    ChirpState,
    GridSpec,
    QuadratureResult,
    ScanResult,
    ScanRow,
    chirp_eval,
    default_epsilons,
    direction_for_angle,
    fresnel_reference,
    overlap_quadrature,
    pairwise_unbiased_scan,
)
from .search import (
    CounterexampleFound,
    Equivalence,
    InfeasibilityCertificate,
    SearchProblem,
    SearchReport,
    SignPatternRecord,
    certify_no_fourth,
    enumerate_triples_n1,
    find_equivalence,
    search_extension,
)
from .symplectic import (
    EXACT,
    NUMERIC,
    POSITION,
    DirectionVector,
    MUConfiguration,
    PairCheck,
    ProductVector,
    UnsignedSymplecticClass,
    UnsignedSymplecticMatrix,
    VerificationReport,
    apply_transform,
    build_jN,
    config_from_json,
    config_to_json,
    expanded_product,
    is_unsigned_symplectic,
    overlap_magnitude_sq,
    rescale_config,
    symp2,
    symp_product,
    verify_mu,
)

__version__ = "0.1.0"

__all__ = [
    "Ambient",
    "BlockDecomposition",
    "ChirpState",
    "ContextMismatch",
    "CounterexampleFound",
    "DegenerateBlock",
    "DimensionMismatch",
    "DirectionVector",
    "DivisionByZero",
    "EXACT",
    "Equivalence",
    "ExactSqrtUnavailable",
    "GOLDEN",
    "GridSpec",
    "InfeasibilityCertificate",
    "InvalidDirection",
    "InvalidProblem",
    "InvalidTarget",
    "LimitExceeded",
    "MUConfiguration",
    "MetaplecticSpec",
    "MubcError",
    "NUMERIC",
    "NonInvertible",
    "NotRealEmbeddable",
    "POSITION",
    "PairCheck",
    "ParallelDirections",
    "PreconditionFailed",
    "ProductVector",
    "QuadNum",
    "QuadratureResult",
    "Rat",
    "ScanResult",
    "ScanRow",
    "SearchProblem",
    "SearchReport",
    "SignPatternRecord",
    "SingularCayley",
    "UnsignedSymplecticClass",
    "UnsignedSymplecticMatrix",
    "VerificationReport",
    "apply_transform",
    "build_jN",
    "cayley_matrix",
    "certify_no_fourth",
    "chirp_eval",
    "compose_overlap_sq",
    "config_from_json",
    "config_to_json",
    "default_epsilons",
    "direction_for_angle",
    "enumerate_triples_n1",
    "expanded_product",
    "find_equivalence",
    "fresnel_reference",
    "genmu_overlap_sq",
    "interleaved_j",
    "interleaved_to_stacked",
    "is_symplectic",
    "is_unsigned_symplectic",
    "ordering_permutation",
    "overlap_magnitude_sq",
    "overlap_quadrature",
    "pairwise_unbiased_scan",
    "quad_sqrt",
    "random_symplectic",
    "rescale_config",
    "rotation_matrix",
    "search_extension",
    "special_m",
    "stacked_j",
    "stacked_to_interleaved",
    "symp2",
    "symp_product",
    "symplectic_defect",
    "verify_mu",
]
