"""Exact semi-algebraic Ramsey constructions, extractors and their brute-force oracles."""

from .algebra import Poly, milnor_thom_bound
from .relations import (
    Membership,
    PointSet,
    RelationSystem,
    SemiAlgRelation,
    brute_force_clique,
    brute_force_independent,
    clique_number,
    find_mono_triangle_bruteforce,
    parse_points,
    parse_relation,
)
from .cutting import build_cutting, partition_low_crossing, verify_cutting
from .multicolor import blowup, find_mono_triangle, schur_coloring, schur_search, verify_blowup
from .transitive import empty_in_all, transitive_subset
from .triple import ExtractConfig, extract_independent, homogeneous_parts
from .geometry import (
    cupcap_extremal,
    dualize_hyperplanes,
    es_extremal_sequence,
    find_cup_cap,
    longest_monotone,
    osh_extract,
)
from .harness import generate_instance, run_suite

__version__ = "0.1.0"
