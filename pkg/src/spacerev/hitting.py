"""Minimal hitting sets: Reiter's HS-tree, protected filtering, combination
of locally computed hitting sets, and the preference order."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Collection, Hashable, Iterable

from .errors import BudgetExceeded, EmptyCandidates, IndependenceViolated

HittingSet = frozenset


@dataclass
class HSDiagnostics:
    nodes_expanded: int = 0
    pruned: int = 0
    conflicts_used: int = 0

    def __add__(self, other: "HSDiagnostics") -> "HSDiagnostics":
        return HSDiagnostics(
            self.nodes_expanded + other.nodes_expanded,
            self.pruned + other.pruned,
            self.conflicts_used + other.conflicts_used,
        )


def _as_set(c) -> frozenset:
    return frozenset(getattr(c, "clause_ids", c))


def minimize(sets: Iterable[frozenset]) -> set[frozenset]:
    """Drop every set that strictly contains another member."""
    kept: list[frozenset] = []
    for s in sorted(set(sets), key=len):
        if not any(k <= s for k in kept):
            kept.append(s)
    return set(kept)


def hs_tree(
    conflicts: Iterable[Collection[Hashable]],
    protected: Collection = frozenset(),
    max_nodes: int | None = None,
) -> tuple[set[frozenset], HSDiagnostics]:
    """All minimal hitting sets of ``conflicts`` that avoid ``protected`` elements.

    Breadth-first HS-tree: a node whose path labels H already hit every
    conflict is a leaf; otherwise it is labeled by the first conflict disjoint
    from H and gets one child per (unprotected) element. Nodes with a path set
    seen before are closed, and so are leaves containing a smaller hitting set.
    Raises BudgetExceeded past ``max_nodes`` expanded nodes.
    """
    coll = sorted({_as_set(c) for c in conflicts}, key=lambda s: (len(s), sorted(s)))
    if any(not c for c in coll):
        raise ValueError("empty conflict in collection")
    protected = frozenset(protected)
    labels = [sorted(c - protected) for c in coll]
    diag = HSDiagnostics()
    used: set[int] = set()
    found: list[frozenset] = []
    seen = {frozenset()}
    level = [frozenset()]

    def hits(h):
        return all(c & h for c in coll)

    while level:
        nxt = []
        for h in level:
            diag.nodes_expanded += 1
            if max_nodes is not None and diag.nodes_expanded > max_nodes:
                raise BudgetExceeded(f"hitting-set tree exceeded {max_nodes} nodes")
            idx = next((j for j, c in enumerate(coll) if not (c & h)), None)
            if idx is None:
                # only a hitting node can contain a found one; hitting is
                # monotone, so checking one-element removals is enough
                if any(hits(h - {e}) for e in h):
                    diag.pruned += 1
                else:
                    found.append(h)
                continue
            used.add(idx)
            for e in labels[idx]:
                child = h | {e}
                if child in seen:
                    diag.pruned += 1
                    continue
                seen.add(child)
                nxt.append(child)
        level = nxt
    diag.conflicts_used = len(used)
    return set(found), diag


def filter_protected(hs: Iterable[frozenset], kb_or_ids) -> set[frozenset]:
    protected = getattr(kb_or_ids, "protected_ids", kb_or_ids)
    return {h for h in hs if not (h & protected)}


def combine_independent(ha: Iterable[frozenset], hb: Iterable[frozenset]) -> set[frozenset]:
    """Hitting sets of two clause-disjoint conflict collections: all pairwise unions."""
    ha, hb = set(ha), set(hb)
    left = frozenset().union(*ha)
    right = frozenset().union(*hb)
    if left & right:
        raise IndependenceViolated(f"shared elements {sorted(left & right)}")
    return {a | b for a in ha for b in hb}


def combine_min_union(parts: Iterable[Iterable[frozenset]]) -> set[frozenset]:
    """Minimal hitting sets of a union of collections from the per-part ones."""
    return reduce(lambda acc, part: minimize(a | b for a in acc for b in part), parts, {frozenset()})


PreferenceOrder = Callable[[frozenset], object]


def min_cardinality_lex(h: frozenset):
    return (len(h), sorted(h))


def prefer(hs: Iterable[frozenset], ordering: PreferenceOrder = min_cardinality_lex) -> frozenset:
    hs = list(hs)
    if not hs:
        raise EmptyCandidates("no hitting set to choose from")
    return min(hs, key=ordering)
