"""gel: exact invertibility analysis for permutative and localized
endomorphisms of graph C*-algebras."""

__version__ = "0.1.0"

from .algebra import (
    AlgebraElement,
    ad_apply,
    cocycle,
    core_dimension,
    format_element,
    lambda_apply,
    unitary_from_json,
    unitary_to_json,
)
from .annihilation import (
    Classification,
    brute_force_annihilation,
    classify,
    classify_detail,
    decide_annihilation,
    pair_maps,
)
from .errors import (
    CapExceededError,
    GelError,
    GradeMismatchError,
    GraphParseError,
    InputParseError,
    PreconditionError,
    ValidationError,
)
from .graphs import (
    Edge,
    Graph,
    GraphAut,
    Path,
    StructuralReport,
    graph_automorphisms,
    parse_graph,
    validate,
)
from .ktheory import AbelianGroup, SNFResult, k_groups, smith_normal_form
from .localized import (
    core_basis,
    decide_diagonal_invertible,
    decide_invertible,
    normalizes_diagonal,
    ring_nilpotent,
    stabilize_inverse,
    transfer_matrices,
)
from .permutations import (
    BlockPermutation,
    cycles_str,
    enumerate_unitaries,
    invert,
    order_up_to,
    parse_cycles,
    reduce_level,
    star_compose,
    to_unitary,
    unitary_count,
)
from .scalars import Scalar, parse_scalar
from .synchronization import (
    DecisionCertificate,
    brute_force_synchronization,
    decide_synchronization,
    edge_maps,
    edge_maps_dot,
    replay_cycle,
)
from .weyl import (
    CompositeAut,
    conjugate,
    find_inner_witness,
    relabel_element,
    shift_commutation_degree,
)
