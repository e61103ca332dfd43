"""Reflection Lie algebras inside the group algebras of B_n and D_n.

Exact simple modules, certified Lie closures, and checks of the predicted
decomposition of the derived reflection Lie algebra into sl / so / sp blocks.
"""

from .irreps import (
    APPROX,
    EXACT,
    RepMatrixSet,
    artin_wedderburn_check,
    bilinear_form,
    build_rep_b,
    build_rep_d,
    intertwiner,
    split_module,
    verify_branching,
    verify_exterior_power,
)
from .lie_structure import (
    BlockImage,
    ClassificationLabel,
    TheoremReport,
    block_image,
    classify,
    verify_main_theorem,
)
from .predicted import marin_structure, predicted_structure
from .tableaux import Bipartition, DLabel, Partition, parse_label
from .weyl import SignedPermutation

__version__ = "0.1.0"

__all__ = [
    "APPROX",
    "EXACT",
    "Bipartition",
    "BlockImage",
    "ClassificationLabel",
    "DLabel",
    "Partition",
    "RepMatrixSet",
    "SignedPermutation",
    "TheoremReport",
    "artin_wedderburn_check",
    "bilinear_form",
    "block_image",
    "build_rep_b",
    "build_rep_d",
    "classify",
    "intertwiner",
    "marin_structure",
    "parse_label",
    "predicted_structure",
    "split_module",
    "verify_branching",
    "verify_exterior_power",
    "verify_main_theorem",
]
