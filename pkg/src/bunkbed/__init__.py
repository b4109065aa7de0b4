"""Exact computation and search engine for the bunkbed inequality and its relatives."""

from .graph import (
    BunkbedGraph,
    EdgePartition,
    GraphError,
    Instance,
    MultiGraph,
    build_bunkbed,
    complete_bipartite,
    complete_graph,
    components_after_removal,
    contract_edge,
    cut_vertices,
    cycle_graph,
    delete_edge,
    format_instance,
    is_connected,
    parse_instance,
    path_graph,
    read_instance,
    star_graph,
)
from .minors import are_isomorphic, canonical_form, is_outerplanar, minor_contains
from .models import (
    ModelError,
    ModelSpec,
    Query,
    avg_poly_over_T,
    avg_prob_over_T,
    bbc_margin,
    connection_polynomial,
    critical_probability,
    exact_prob,
    exact_prob_conditional,
    joint_prob,
    mc_estimate,
    total_probability,
)
from .poly import RootInterval, UniPoly, isolate_roots
from .reach import (
    Endpoint,
    colored_reach,
    directed_reach,
    mode_reach,
    nonreversing_reach,
    reversal_involution,
    subgraph_reach,
)
from .reductions import (
    HybridTriple,
    ReductionError,
    ReductionStep,
    Triple,
    delta_reduce,
    e2_condition_edge,
    mirror_config,
    parallel_pair_reduce,
    restricted_delta_reduce,
    t_contract,
    v2_reduce,
    verify_reduction,
    y_reduce,
)
from .search import InstanceFilter, ScanReport, enumerate_graphs, find_figure2, scan_conjecture

__version__ = "0.1.0"
