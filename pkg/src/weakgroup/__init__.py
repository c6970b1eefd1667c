"""Weighted weak group inverse and the generalized inverses it is built from."""

__version__ = "0.1.0"

from .errors import (
    DecompositionFailure,
    DegenerateDraw,
    EquivalenceViolation,
    GInverseError,
    IndexOverflow,
    IndexTooLarge,
    InputError,
    NotComplementary,
    NotConsistent,
    NumericalError,
    ParseError,
    ShapeError,
    ShapeMismatch,
    Singular,
    ZeroWeight,
)
from .ginverse import (
    CommutationReport,
    RouteTable,
    Variant,
    characterization_check,
    commutation_analysis,
    core_ep,
    core_inverse,
    group_inverse,
    outer_inverse_prescribed,
    weak_group,
    weighted_core_ep,
    weighted_weak_group,
    wg_representations,
    wwg_representations,
)
from .numeric import (
    NumericContext,
    SubspaceBasis,
    moore_penrose,
    null_basis,
    numerical_rank,
    oblique_projector,
    range_basis,
)
from .relations import (
    Method,
    Side,
    lemma_equiv_suite,
    preorder_probe,
    relation_block_analysis,
    wg_below,
    wwg_below,
)
from .spectral import CanonicalPair, canonical_pair, drazin, index, w_drazin

__all__ = [
    "__version__",
    "CanonicalPair",
    "CommutationReport",
    "DecompositionFailure",
    "DegenerateDraw",
    "EquivalenceViolation",
    "GInverseError",
    "IndexOverflow",
    "IndexTooLarge",
    "InputError",
    "Method",
    "NotComplementary",
    "NotConsistent",
    "NumericContext",
    "NumericalError",
    "ParseError",
    "RouteTable",
    "ShapeError",
    "ShapeMismatch",
    "Side",
    "Singular",
    "SubspaceBasis",
    "Variant",
    "ZeroWeight",
    "canonical_pair",
    "characterization_check",
    "commutation_analysis",
    "core_ep",
    "core_inverse",
    "drazin",
    "group_inverse",
    "index",
    "lemma_equiv_suite",
    "moore_penrose",
    "null_basis",
    "numerical_rank",
    "oblique_projector",
    "outer_inverse_prescribed",
    "preorder_probe",
    "range_basis",
    "relation_block_analysis",
    "weak_group",
    "weighted_core_ep",
    "weighted_weak_group",
    "w_drazin",
    "wg_below",
    "wg_representations",
    "wwg_below",
    "wwg_representations",
]
