"""Derivation spaces and module dimensions for finite-dimensional tracial
*-algebras, with crossed products by finite group actions and a check
suite for the dimension formulas relating them."""

from .algebra import FDAlgebra, AntilinearOp, ValidationReport, tomita_j, validate
from .constructions import (
    CrossedProduct,
    GroupAction,
    ad_action,
    center_basis,
    crossed_product,
    dual_action,
    generates,
    group_algebra,
    group_central_family,
    matrix_units,
    multimatrix,
    multimatrix_decompose,
    multimatrix_generators,
    opposite,
    permutation_action,
    scaled_generating_set,
    scaling_residual,
    span_equal,
    subalgebra_generate,
    tensor,
    trivial_action,
    validate_action,
)
from .derivations import (
    Bimodule,
    CrossedContext,
    Derivation,
    DerivationSpace,
    VanishingDecomposition,
    average_scaling,
    central_projection_element,
    central_vectors,
    commutator_derivation,
    covariance_defect,
    decompose_vanishing,
    derivation_space,
    extend_vanishing,
    inner_derivations,
    is_covariant,
    relative_derivations,
    restrict_component,
    scaling_conjugation,
    vanishing_space,
)
from .errors import (
    ActionInvalid,
    GeneratingSetNotScaled,
    GroupInvalid,
    NotAbelian,
    NotGenerating,
    NotRightClosed,
    NotSemisimple,
    NotSubalgebra,
    NotSubgroup,
    RankAmbiguous,
    ShapeMismatch,
    SpecInvalid,
    SteinlabError,
    UnitsInvalid,
    WeightsNotNormalized,
)
from .groups import (
    Character,
    FiniteGroup,
    characters,
    cyclic,
    dihedral_4,
    direct_product,
    regular_representation,
    subgroup,
    symmetric_3,
)
from .reports import (
    CheckRow,
    ExperimentSpec,
    VerificationReport,
    corpus_specs,
    run,
    run_corpus,
    to_csv,
    to_json,
    to_markdown,
)
from .vndim import (
    DimensionResult,
    IndependenceReport,
    ModuleSubspace,
    as_fraction,
    generating_set_independence_check,
    inner_derivation_module,
    phi_x,
    restrict_scalars,
    twisted_module,
    vn_dimension,
)

__version__ = "0.1.0"

__all__ = [
    "FDAlgebra", "AntilinearOp", "ValidationReport", "tomita_j", "validate",
    "CrossedProduct", "GroupAction", "ad_action", "center_basis",
    "crossed_product", "dual_action", "generates", "group_algebra",
    "group_central_family", "matrix_units", "multimatrix",
    "multimatrix_decompose", "multimatrix_generators", "opposite",
    "permutation_action", "scaled_generating_set", "scaling_residual",
    "span_equal", "subalgebra_generate", "tensor", "trivial_action",
    "validate_action",
    "Bimodule", "CrossedContext", "Derivation", "DerivationSpace",
    "VanishingDecomposition", "average_scaling", "central_projection_element",
    "central_vectors", "commutator_derivation", "covariance_defect",
    "decompose_vanishing", "derivation_space", "extend_vanishing",
    "inner_derivations", "is_covariant", "relative_derivations",
    "restrict_component", "scaling_conjugation", "vanishing_space",
    "ActionInvalid", "GeneratingSetNotScaled", "GroupInvalid", "NotAbelian",
    "NotGenerating", "NotRightClosed", "NotSemisimple", "NotSubalgebra",
    "NotSubgroup", "RankAmbiguous", "ShapeMismatch", "SpecInvalid",
    "SteinlabError", "UnitsInvalid", "WeightsNotNormalized",
    "Character", "FiniteGroup", "characters", "cyclic", "dihedral_4",
    "direct_product", "regular_representation", "subgroup", "symmetric_3",
    "CheckRow", "ExperimentSpec", "VerificationReport", "corpus_specs",
    "run", "run_corpus", "to_csv", "to_json", "to_markdown",
    "DimensionResult", "IndependenceReport", "ModuleSubspace", "as_fraction",
    "generating_set_independence_check", "inner_derivation_module", "phi_x",
    "restrict_scalars", "twisted_module", "vn_dimension",
]
