"""Disjoint cross-intersecting families of r-sets: predicates, constructions,
chains in the disjointness graph and exact small-case maxima."""

from .chain import Chain, ChainTrace, build_chain, pick_avoiding, verify_chain
from .constructions import FamilyPair, expected_sizes, large_r_pair, pair_partition, star_partition
from .errors import BudgetError, DomainError, ExhaustionError, KneserLabError, ParseError
from .extremal import BoundReport, exact_max_sum, scan, theorem_bound, verify_pair
from .kneser import (
    ComponentLabeling,
    CutWitness,
    are_adjacent,
    bfs_path_avoiding,
    check_complete_kpartite,
    components_avoiding,
    is_connected_avoiding,
    min_disconnecting_set,
)
from .setfam import (
    CompressionOp,
    Family,
    RSet,
    ScenarioReport,
    UniverseParams,
    all_rsets,
    are_cross_intersecting,
    are_disjoint,
    complement,
    compress_family,
    compress_set,
    compression_failure_scenario,
    enumerate_rsets,
    is_intersecting,
    make_params,
    parse_family,
    read_family,
    write_family,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "BudgetError",
    "Chain",
    "ChainTrace",
    "ComponentLabeling",
    "CompressionOp",
    "CutWitness",
    "DomainError",
    "ExhaustionError",
    "Family",
    "FamilyPair",
    "KneserLabError",
    "ParseError",
    "RSet",
    "ScenarioReport",
    "UniverseParams",
    "all_rsets",
    "are_adjacent",
    "are_cross_intersecting",
    "are_disjoint",
    "bfs_path_avoiding",
    "build_chain",
    "check_complete_kpartite",
    "complement",
    "components_avoiding",
    "compress_family",
    "compress_set",
    "compression_failure_scenario",
    "enumerate_rsets",
    "exact_max_sum",
    "expected_sizes",
    "is_connected_avoiding",
    "is_intersecting",
    "large_r_pair",
    "make_params",
    "min_disconnecting_set",
    "pair_partition",
    "parse_family",
    "pick_avoiding",
    "read_family",
    "scan",
    "star_partition",
    "theorem_bound",
    "verify_chain",
    "verify_pair",
    "write_family",
]
