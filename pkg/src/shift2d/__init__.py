"""Positivity tests for commuting 2-variable weighted shifts.

The library decides hyponormality, k-hyponormality, semi-hyponormality,
weak (polynomial) hyponormality, and quasinormality of commuting pairs of
weighted shifts by reducing each question to 2x2 blocks on the homogeneous
levels of the index lattice, where a closed-form square root settles
operator order.  A three-parameter family with fully closed-form answers
drives the region atlas exposed by the command line.
"""

from .axy_region import (
    BOUNDARY_BAND,
    DEFAULT_WINDOW,
    LABEL_CODES,
    LABELS,
    OUT_OF_CLASS,
    AxyPoint,
    FormulaMismatch,
    InconsistentLattice,
    PredicateResult,
    RegionLabel,
    transcription_audit,
    classify,
    classify_grid,
    hypo_bound_y,
    is_hyponormal_cf,
    is_semihypo_cf,
    is_subnormal_cf,
    is_weakhypo_cf,
    sh_matrix,
    sub_bound_y,
    weakhypo_bound_y,
)
from .blockdecomp import (
    BlockPair,
    CommutatorBlocks,
    LevelOutOfRange,
    NoStabilization,
    blocks,
    commutator_blocks,
    effective_cap,
    stabilization_level,
)
from .hypo_tests import (
    CapTooSmall,
    KHypoReport,
    TestVerdict,
    embedding_equivalence_audit,
    entries_commute_test,
    k_hypo_up_to,
    l_positivity_test,
    moment_matrix_test,
    quasinormal_test,
    semi_hypo_test,
    six_point_test,
    weak_hypo_test,
)
from .mat2 import (
    DEFAULT_TOL,
    FlatExtension,
    NotPsd,
    PsdTolerance,
    PsdVerdict,
    SqrtDiffVerdict,
    Sym2,
    flat_extension_check,
    is_psd,
    sqrt_diff_psd,
    sqrt_psd,
)
from .shift_model import (
    EmbeddingSpec,
    MomentTable,
    NonCommuting,
    NonPositiveWeight,
    OutOfClass,
    Overflow,
    SchemaError,
    ValidationReport,
    WeightDiagram,
    alpha,
    beta,
    build_axy,
    build_drury_arveson,
    build_embedding,
    build_ex215,
    build_ex216,
    build_helton_howe,
    load_weights,
    moments,
    save_weights,
    validate,
    validate_embedding,
)

__version__ = "0.1.0"

__all__ = [
    "AxyPoint", "BOUNDARY_BAND", "BlockPair", "CapTooSmall",
    "CommutatorBlocks", "DEFAULT_TOL", "DEFAULT_WINDOW", "EmbeddingSpec",
    "FlatExtension", "FormulaMismatch", "InconsistentLattice",
    "KHypoReport", "LABELS", "LABEL_CODES", "LevelOutOfRange",
    "MomentTable", "NoStabilization", "NonCommuting", "NonPositiveWeight",
    "NotPsd", "OUT_OF_CLASS", "OutOfClass", "Overflow", "PredicateResult",
    "PsdTolerance", "PsdVerdict", "RegionLabel", "SchemaError",
    "SqrtDiffVerdict", "Sym2", "TestVerdict", "ValidationReport",
    "WeightDiagram", "alpha", "transcription_audit", "beta", "blocks", "build_axy",
    "build_drury_arveson", "build_embedding", "build_ex215", "build_ex216",
    "build_helton_howe", "classify", "classify_grid", "commutator_blocks",
    "effective_cap", "embedding_equivalence_audit", "entries_commute_test",
    "flat_extension_check", "hypo_bound_y", "is_hyponormal_cf", "is_psd",
    "is_semihypo_cf", "is_subnormal_cf", "is_weakhypo_cf", "k_hypo_up_to",
    "l_positivity_test", "load_weights", "moment_matrix_test", "moments",
    "quasinormal_test", "save_weights", "semi_hypo_test", "sh_matrix",
    "six_point_test", "sqrt_diff_psd", "sqrt_psd", "stabilization_level",
    "sub_bound_y", "validate", "validate_embedding", "weak_hypo_test",
    "weakhypo_bound_y",
]
