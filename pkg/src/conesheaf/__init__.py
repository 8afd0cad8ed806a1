"""Finite-scale checkers for cone sheaf conditions, matrix functional calculus,
and piecewise / almost algebraic structures."""

from __future__ import annotations

from .cones import (
    classify_guarantee,
    is_directed,
    is_effective_monic,
    is_locally_injective,
    malcev_check,
    search_refinement,
)
from .errors import ConesheafError
from .finspace import Cone, FinMap, FinSpace, pushout, pushforward
from .groups import FiniteGroup, enumerate_almost_endos, verify_almost_group_hom
from .matstar import (
    MatrixFamily,
    PartitionOfUnity,
    apply_function,
    bivariate_op,
    check_compatibility,
    joint_diagonalize,
    lift_family,
    search_noncommuting_family,
    spectral_decompose,
)
from .piecewise import PieceMap, extend, ks_assignment_search, verify_piecewise_hom
from .almost import SelfAction, m2_extend, verify_almost_hom, verify_cocycle_identity, verify_self_action
from .words import zeta

__version__ = "0.1.0"

__all__ = [
    "Cone",
    "ConesheafError",
    "FinMap",
    "FinSpace",
    "FiniteGroup",
    "MatrixFamily",
    "PartitionOfUnity",
    "PieceMap",
    "SelfAction",
    "apply_function",
    "bivariate_op",
    "check_compatibility",
    "classify_guarantee",
    "enumerate_almost_endos",
    "extend",
    "is_directed",
    "is_effective_monic",
    "is_locally_injective",
    "joint_diagonalize",
    "ks_assignment_search",
    "lift_family",
    "m2_extend",
    "malcev_check",
    "pushforward",
    "pushout",
    "search_noncommuting_family",
    "search_refinement",
    "spectral_decompose",
    "verify_almost_group_hom",
    "verify_almost_hom",
    "verify_cocycle_identity",
    "verify_piecewise_hom",
    "verify_self_action",
    "zeta",
]
