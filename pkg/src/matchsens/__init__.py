"""Low-sensitivity maximum-matching algorithms and a coupled-run harness.

The package bundles: randomized greedy maximal matching with identity-keyed
randomness, a layered-graph augmentation driver reaching a (1-eps)
approximation, a deterministic query-local matcher for bounded-degree graphs,
weight-bucketed matching for weighted graphs, a vertex-arrival replacement
simulator, brute-force oracles, and a measurement harness that estimates how
far outputs move when one edge or vertex is deleted.
"""

from .approx import ApproxParams, DESK_PARAMS, approx_matching, params_from_eps
from .graphs import (
    DeleteEdge,
    DeleteVertex,
    Graph,
    Matching,
    NotFoundError,
    ParseError,
    WeightedGraph,
    apply_perturbation,
    bounded_degree,
    cycle,
    dump_graph,
    dump_weighted,
    gen,
    gnp,
    hamming,
    is_matching,
    is_maximal,
    load_graph,
    load_weighted,
    path,
    weighted_hamming,
)
from .greedy import EdgeOrder, change_set, change_set_for_edge, greedy_matching
from .layered import (
    Budget,
    BudgetExceededError,
    LayeredGraph,
    apply_augmentations,
    augmenting_paths,
    build_layered,
    find_paths,
)
from .lca import (
    Coloring,
    ForestDecomposition,
    ProbeOracle,
    color_forests,
    coloring_to_mm,
    deterministic_mm,
    form_forests,
    mm_query,
)
from .online import ReplacementTrace, VertexArrivalStream, simulate
from .oracle import OracleGuardError, max_matching, max_weight_matching
from .sensitivity import (
    ApproxRunner,
    GreedyRunner,
    LocalRunner,
    SensitivityReport,
    WeightedRunner,
    adversarial_greedy_instance,
    default_perturbations,
    estimate,
    randomized_lb_experiment,
)
from .tape import InvocationPath, RandomTape, ROOT, derive_seed
from .weighted import WeightBuckets, build_buckets, weighted_matching

__version__ = "0.1.0"
