"""Back-and-forth equivalence, Scott rank, ultrahomogeneity, and
distance-matrix isometry invariants for finite metric spaces and finite
trees, over exact rational arithmetic."""

from ._backend import BACKEND
from .equivalence import (
    EquivalenceFamily,
    are_equivalent,
    compute_family,
    is_ultrahomogeneous,
    naive_equivalence,
    naive_rank,
    scott_rank,
)
from .gromov import (
    DnComparison,
    FormulaSpec,
    compare_dn,
    distance_matrix,
    dn_set,
    ep_equivalent,
    epsilon_net,
    eval_phi,
    find_isometric_embedding,
    is_isometric,
    max_norm_distance,
)
from .ordinals import OrdinalCNF, cnf_compare, cnf_parse
from .spaces import (
    FiniteMetricSpace,
    QfType,
    StructureView,
    dedupe_reduce,
    format_space_file,
    function_view,
    metric_view,
    parse_space_file,
    qf_type,
    satisfies_R,
    validate_space,
)
from .trees import (
    FiniteTree,
    TreeSpec,
    build_tree,
    limit_enumeration,
    tree_function_structure,
    tree_metric_space,
)

__version__ = "0.1.0"
