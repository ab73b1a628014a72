"""Contained belief revision over parcel graphs."""

from .consistency import Conflict, conflict_size, is_consistent, minimal_conflicts
from .errors import (
    BudgetExceeded,
    DisconnectedFootprint,
    IngestError,
    InvalidParams,
    InvalidRadii,
    ParseError,
    SpaceRevError,
    UnrepairableConflict,
)
from .flood import FloodScenario, GenParams, compile, generate, parse_scenario
from .graph import Blocking, SeedPolicy, SpaceGraph, distance, k_neighborhood, partition, shift_blockings
from .hitting import combine_independent, combine_min_union, hs_tree, prefer
from .kb import Atom, Clause, ClauseClass, KnowledgeBase, Source, classify
from .revision import Regime, RevisionResult, check_h0, contained_revision, global_rdr

__all__ = [
    "Atom", "Blocking", "BudgetExceeded", "Clause", "ClauseClass", "Conflict", "DisconnectedFootprint",
    "FloodScenario", "GenParams", "IngestError", "InvalidParams", "InvalidRadii", "KnowledgeBase",
    "ParseError", "Regime", "RevisionResult", "SeedPolicy", "Source", "SpaceGraph", "SpaceRevError",
    "UnrepairableConflict", "check_h0", "classify", "combine_independent", "combine_min_union",
    "compile", "conflict_size", "contained_revision", "distance", "generate", "global_rdr", "hs_tree",
    "is_consistent", "k_neighborhood", "minimal_conflicts", "parse_scenario", "partition", "prefer",
    "shift_blockings",
]
