"""Universality and membership deciders for finite gate sets and Hamiltonians in SU(d)."""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    AlgebraVerdict,
    Answer,
    HypothesisError,
    centralizer_in,
    commutant_of_operators,
    decide_algebra_membership,
    decide_algebra_universality,
    derived_algebra,
    generate_subalgebra,
    is_simple,
    projector_PX,
    split_center_derived,
)
from .group import (  # noqa: E402
    DiagramCase,
    GroupVerdict,
    WordClosure,
    bfs_words,
    center_distance,
    classify_diagram,
    decide_group_membership,
    decide_group_universality,
    decide_subgroup_universality,
    is_in_ball,
    space_a,
    xy_parts,
)
from .matrix_core import (  # noqa: E402
    LogVerdict,
    RealSubspace,
    Tolerances,
    commutator_bound_holds,
    frobenius_distance,
    group_commutator,
    log_trace_bound_verdict,
    mat_exp,
    principal_log,
    real_null_space,
)
from .su_structure import Ad_matrix, SuStructure, ad_matrix, build_su_structure, inner_product  # noqa: E402
