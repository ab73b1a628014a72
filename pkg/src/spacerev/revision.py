"""Global and block-local (contained) revision of a knowledge base."""

from __future__ import annotations

import enum
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .consistency import (
    DEFAULT_MAX_CARD,
    DEFAULT_MAX_NODES,
    Conflict,
    conflict_size,
    is_consistent,
    minimal_conflicts,
)
from .errors import DisconnectedFootprint, UnrepairableConflict
from .graph import Blocking, SeedPolicy, partition, shift_blockings
from .hitting import HSDiagnostics, combine_independent, combine_min_union, hs_tree, prefer
from .kb import ClauseClass, KnowledgeBase, classify

DEFAULT_KR = 12


class Regime(enum.Enum):
    SPACE_INDEPENDENT = "space-independent"
    INFO_INDEPENDENT = "info-independent"
    DEPENDENT = "dependent"


@dataclass(frozen=True)
class H0Report:
    d_c: int | None  # None: some conflict spans disconnected parcels
    k_r: int
    holds: bool


def check_h0(d_c: int | None, k_r: int) -> H0Report:
    """Tractability gate: conflicts of radius d_c fit if 3 * d_c <= k_r."""
    if k_r < 0 or (d_c is not None and d_c < 0):
        raise ValueError("d_c and k_r must be non-negative")
    return H0Report(d_c, k_r, d_c is not None and 3 * d_c <= k_r)


@dataclass
class BlockTrace:
    index: int
    window: frozenset[int]  # clause ids handed to local revision
    removed: frozenset[int]  # b-clauses of earlier blocks of the same pass
    found: int = 0
    processed: int = 0
    deferred: int = 0


@dataclass
class PassTrace:
    origin: str
    blocks: list[BlockTrace] = field(default_factory=list)

    @property
    def new_conflicts(self) -> int:
        return sum(b.processed for b in self.blocks)


@dataclass
class RevisionResult:
    global_hitting_sets: set[frozenset[int]]
    chosen: frozenset[int]
    revised_kb: KnowledgeBase
    regime_per_block: dict[int, Regime]
    shifts_used: int
    h0: H0Report
    conjecture_verified: bool
    warnings: list[str] = field(default_factory=list)
    conflicts: list[Conflict] = field(default_factory=list)
    hs_diagnostics: HSDiagnostics = field(default_factory=HSDiagnostics)
    passes: list[PassTrace] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    search_nodes: int = 0


def _observed_dc(conflicts, kb, warnings) -> int | None:
    try:
        return max((conflict_size(c, kb) for c in conflicts), default=0)
    except DisconnectedFootprint as exc:
        warnings.append(f"H0 cannot be assessed: {exc}")
        return None


def _finish(kb, hitting, conflicts, k_r, warnings):
    h0 = check_h0(_observed_dc(conflicts, kb, warnings), k_r)
    if not h0.holds and h0.d_c is not None:
        warnings.append(f"H0 fails: observed conflict size {h0.d_c} exceeds k_r/3 with k_r={k_r}")
    chosen = prefer(hitting)
    return chosen, kb.without(chosen), h0


def _unrepairable(kb, conflicts):
    bad = [c for c in conflicts if c.clause_ids <= kb.protected_ids]
    return UnrepairableConflict(
        f"{len(bad) or len(conflicts)} conflict(s) cannot be repaired without removing protected clauses",
        bad or conflicts,
    )


def global_rdr(
    kb: KnowledgeBase,
    k_r: int = DEFAULT_KR,
    max_card: int | None = DEFAULT_MAX_CARD,
    max_nodes: int | None = DEFAULT_MAX_NODES,
) -> RevisionResult:
    """Unpartitioned baseline: every minimal conflict of the whole base, its
    minimal hitting sets over revisable clauses, and the preferred one."""
    t0 = time.perf_counter()
    stats: dict = {}
    conflicts = minimal_conflicts(kb.clauses, max_card, max_nodes, stats)
    t1 = time.perf_counter()
    hitting, diag = hs_tree(conflicts, protected=kb.protected_ids)
    if not hitting:
        raise _unrepairable(kb, conflicts)
    warnings: list[str] = []
    chosen, revised, h0 = _finish(kb, hitting, conflicts, k_r, warnings)
    t2 = time.perf_counter()
    return RevisionResult(
        global_hitting_sets=hitting,
        chosen=chosen,
        revised_kb=revised,
        regime_per_block={},
        shifts_used=0,
        h0=h0,
        # exact method: nothing is left to the containment assumption
        conjecture_verified=True,
        warnings=warnings,
        conflicts=conflicts,
        hs_diagnostics=diag,
        timings={"conflicts": t1 - t0, "hitting": t2 - t1, "total": t2 - t0},
        search_nodes=stats.get("nodes", 0),
    )


def _owner_blocks(kb: KnowledgeBase, blocking: Blocking) -> dict[int, int]:
    """clause id -> index of the block containing its whole footprint (b-clauses only)."""
    vertex_block = {v: i for i, b in enumerate(blocking.blocks) for v in b}
    owners = {}
    for c in kb.clauses:
        idx = {vertex_block[v] for v in c.footprint}
        if len(idx) == 1:
            owners[c.id] = idx.pop()
    return owners


def pass_windows(kb: KnowledgeBase, blocking: Blocking) -> list[BlockTrace]:
    """Clause ids each block of one pass revises: b, c and q clauses of the
    block, minus b-clauses of blocks processed earlier in the pass."""
    by_parcel: dict[int, list] = {}
    for c in kb.clauses:
        for v in c.footprint:
            by_parcel.setdefault(v, []).append(c)
    owners = _owner_blocks(kb, blocking)
    traces = []
    for i, window in enumerate(blocking.windows):
        inside = {c.id for v in window for c in by_parcel.get(v, ()) if c.footprint <= window}
        removed = frozenset(cid for cid in inside if owners.get(cid, i) < i)
        traces.append(BlockTrace(i, frozenset(inside) - removed, removed))
    return traces


def _regime(conflicts: list[Conflict], classes: dict[int, ClauseClass]) -> Regime:
    crossing = [c for c in conflicts if any(classes[x] is ClauseClass.C for x in c.clause_ids)]
    if not crossing:
        return Regime.SPACE_INDEPENDENT
    inner = [c for c in conflicts if all(classes[x] is ClauseClass.B for x in c.clause_ids)]
    if all(not (a.clause_ids & b.clause_ids) for a in crossing for b in inner):
        return Regime.INFO_INDEPENDENT
    return Regime.DEPENDENT


def _local_conflicts(args):
    clauses, max_card, max_nodes = args
    stats: dict = {}
    return minimal_conflicts(clauses, max_card, max_nodes, stats), stats.get("nodes", 0)


class _Folder:
    """Running global hitting sets over the conflicts processed so far."""

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self.hitting: set[frozenset[int]] = {frozenset()}
        self.touched: set[int] = set()
        self.processed: dict[frozenset[int], Conflict] = {}
        self.diag = HSDiagnostics()
        self.dependent_folds = 0

    def fold(self, conflicts: list[Conflict]) -> None:
        local, d = hs_tree(conflicts, protected=self.kb.protected_ids)
        self.diag = self.diag + d
        if not local:
            raise _unrepairable(self.kb, conflicts)
        ids = frozenset().union(*(c.clause_ids for c in conflicts))
        if ids & self.touched:
            self.dependent_folds += 1
            self.hitting = combine_min_union([self.hitting, local])
        else:
            self.hitting = combine_independent(self.hitting, local)
        self.touched |= ids
        for c in conflicts:
            self.processed[c.clause_ids] = c


def contained_revision(
    kb: KnowledgeBase,
    k: int = 2,
    kprime: int = 4,
    k_r: int = DEFAULT_KR,
    seed_policy: SeedPolicy | None = None,
    max_card: int | None = DEFAULT_MAX_CARD,
    max_nodes: int | None = DEFAULT_MAX_NODES,
    jobs: int = 1,
    verify: bool = False,
) -> RevisionResult:
    """Revise block by block over the base partition and its shifts.

    Each block sees only the clauses inside its block and cover. Conflicts
    already processed are skipped; conflicts lying wholly in the cover are
    left for a later block. Local hitting sets are folded into the global
    ones. The result is a repair of the whole base only under the
    containment assumption; ``conjecture_verified`` stays False unless
    ``verify`` re-checks the revised base as a whole.
    """
    t0 = time.perf_counter()
    g = kb.graph
    warnings: list[str] = []
    base = partition(g, k, kprime, seed_policy)
    blockings = [base] + shift_blockings(g, base, seed_policy)
    if any(b.heuristic for b in blockings):
        warnings.append("graph is neither a path nor a grid: shifted blockings are heuristic")
    if kprime - k > k:
        warnings.append("cover thickness exceeds block radius: shifts may miss conflicts of size kprime-k")
    t1 = time.perf_counter()

    folder = _Folder(kb)
    deferred: dict[frozenset[int], Conflict] = {}
    regimes: dict[int, Regime] = {}
    passes: list[PassTrace] = []
    cache: dict[frozenset[int], list[Conflict]] = {}
    nodes = 0
    shifts_used = 0
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for pass_no, blocking in enumerate(blockings):
            trace = PassTrace(blocking.origin, pass_windows(kb, blocking))
            todo = list(dict.fromkeys(t.window for t in trace.blocks if t.window not in cache))
            args = [(kb.subset(w), max_card, max_nodes) for w in todo]
            results = pool.map(_local_conflicts, args) if pool else map(_local_conflicts, args)
            for w, (confs, n) in zip(todo, results):
                cache[w] = confs
                nodes += n
            for bt in trace.blocks:
                local = cache[bt.window]
                bt.found = len(local)
                classes = {cid: classify(kb[cid], blocking, bt.index) for cid in bt.window}
                if pass_no == 0:
                    regimes[bt.index] = _regime(local, classes)
                fresh = [c for c in local if c.clause_ids not in folder.processed]
                todo_here = []
                for c in fresh:
                    if all(classes[x] is ClauseClass.Q for x in c.clause_ids):
                        deferred.setdefault(c.clause_ids, c)
                        bt.deferred += 1
                    else:
                        todo_here.append(c)
                if todo_here:
                    folder.fold(todo_here)
                    bt.processed = len(todo_here)
                    for c in todo_here:
                        deferred.pop(c.clause_ids, None)
            passes.append(trace)
            if pass_no > 0:
                shifts_used += 1
    finally:
        if pool:
            pool.shutdown()

    survivors = [c for key, c in sorted(deferred.items(), key=lambda kv: sorted(kv[0])) if key not in folder.processed]
    if survivors:
        warnings.append(f"{len(survivors)} cover-only conflict(s) were claimed by no block; folded in at the end")
        folder.fold(survivors)
    t2 = time.perf_counter()

    conflicts = sorted(folder.processed.values(), key=Conflict.key)
    chosen, revised, h0 = _finish(kb, folder.hitting, conflicts, k_r, warnings)
    verified = False
    if verify:
        verified = is_consistent(revised.clauses)
        if not verified:
            warnings.append("revised base is inconsistent: some conflict escaped every block window")
    t3 = time.perf_counter()
    return RevisionResult(
        global_hitting_sets=folder.hitting,
        chosen=chosen,
        revised_kb=revised,
        regime_per_block=regimes,
        shifts_used=shifts_used,
        h0=h0,
        conjecture_verified=verified,
        warnings=warnings,
        conflicts=conflicts,
        hs_diagnostics=folder.diag,
        passes=passes,
        timings={"partition": t1 - t0, "local": t2 - t1, "finish": t3 - t2, "total": t3 - t0},
        search_nodes=nodes,
    )

