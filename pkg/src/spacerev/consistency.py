"""Satisfiability, minimal conflict (MUS) enumeration and spatial conflict size."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BudgetExceeded, DisconnectedFootprint
from .hitting import hs_tree
from .kb import Atom, Clause, KnowledgeBase

DEFAULT_MAX_CARD = 6
DEFAULT_MAX_NODES = 500_000


@dataclass(frozen=True)
class Conflict:
    """A minimal inconsistent set of clause ids."""

    clause_ids: frozenset[int]
    k0: int | None = field(default=None, compare=False)

    def __iter__(self):
        return iter(sorted(self.clause_ids))

    def __len__(self) -> int:
        return len(self.clause_ids)

    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.clause_ids))


# ---------------------------------------------------------------- SAT

Cnf = list[frozenset[int]]


def encode(clauses: Iterable[Clause]) -> dict[int, frozenset[int]]:
    """Map clause id -> frozenset of signed variable indices."""
    var_of: dict[Atom, int] = {}
    out = {}
    for c in clauses:
        lits = []
        for atom, pol in c.literals:
            v = var_of.setdefault(atom, len(var_of) + 1)
            lits.append(v if pol else -v)
        out[c.id] = frozenset(lits)
    return out


def _assign(cnf: Cnf, lit: int) -> Cnf:
    out = []
    for c in cnf:
        if lit in c:
            continue
        if -lit in c:
            c = c - {-lit}
        out.append(c)
    return out


def _dpll(cnf: Cnf, model: dict[int, bool]) -> dict[int, bool] | None:
    while True:
        unit = None
        for c in cnf:
            if not c:
                return None
            if unit is None and len(c) == 1:
                unit = next(iter(c))
        if unit is None:
            break
        model[abs(unit)] = unit > 0
        cnf = _assign(cnf, unit)
    if not cnf:
        return model
    lit = min(min(cnf, key=len))
    for branch in (lit, -lit):
        found = _dpll(_assign(cnf, branch), {**model, abs(branch): branch > 0})
        if found is not None:
            return found
    return None


def solve(cnf: Iterable[Iterable[int]]) -> dict[int, bool] | None:
    """A satisfying partial assignment of an integer CNF, or None."""
    return _dpll([frozenset(c) for c in cnf], {})


def is_consistent(clauses: Iterable[Clause]) -> bool:
    return solve(encode(clauses).values()) is not None


# ---------------------------------------------------------------- MUS


class _Enumerator:
    def __init__(self, cnf: dict[int, frozenset[int]], max_card, max_nodes):
        self.cnf = cnf
        self.max_card = max_card
        self.max_nodes = max_nodes
        self.nodes = 0
        self.truncated = False
        self._sat_cache: dict[frozenset[int], bool] = {}
        self.occurs: dict[int, list[int]] = {}
        self.var_occurs: dict[int, list[int]] = {}
        for cid in sorted(cnf):
            for lit in cnf[cid]:
                self.occurs.setdefault(lit, []).append(cid)
                self.var_occurs.setdefault(abs(lit), []).append(cid)

    def sat(self, ids: frozenset[int]) -> bool:
        r = self._sat_cache.get(ids)
        if r is None:
            r = _dpll([self.cnf[i] for i in ids], {}) is not None
            self._sat_cache[ids] = r
        return r

    def branch(self, s: frozenset[int], seed: int) -> list[int]:
        """Clauses one of which must join ``s`` on the way to any MUS whose
        smallest id is ``seed``; empty means no such MUS extends ``s``."""
        lits = set().union(*(self.cnf[i] for i in s))
        best = None
        for lit in sorted(lits):
            if -lit in lits:
                continue
            cand = [c for c in self.occurs.get(-lit, ()) if c > seed and c not in s]
            if not cand:
                return []
            if best is None or len(cand) < len(best):
                best = cand
        if best is not None:
            return best
        # no pure literal left: a MUS is connected, so grow through a shared variable
        return sorted({c for lit in lits for c in self.var_occurs[abs(lit)] if c > seed and c not in s})

    def run(self) -> set[frozenset[int]]:
        found: set[frozenset[int]] = set()
        visited: set[frozenset[int]] = set()
        for seed in sorted(self.cnf):
            stack = [frozenset({seed})]
            while stack:
                s = stack.pop()
                if s in visited:
                    continue
                visited.add(s)
                self.nodes += 1
                if self.max_nodes is not None and self.nodes > self.max_nodes:
                    raise BudgetExceeded(f"conflict search exceeded {self.max_nodes} candidate sets")
                if not self.sat(s):
                    if all(self.sat(s - {c}) for c in s):
                        found.add(s)
                    continue
                cand = self.branch(s, seed)
                if self.max_card is not None and len(s) >= self.max_card:
                    if cand:
                        self.truncated = True
                    continue
                stack.extend(s | {c} for c in reversed(cand))
        return found

    def complete(self, found: set[frozenset[int]]) -> bool:
        # every MUS is found iff removing any minimal hitting set of the found ones restores consistency
        # the proof is charged to the same node budget as the search
        everything = frozenset(self.cnf)
        left = None if self.max_nodes is None else self.max_nodes - self.nodes
        hitting, diag = hs_tree(found, max_nodes=left)
        self.nodes += diag.nodes_expanded
        for h in sorted(hitting, key=lambda h: sorted(h)):
            self.nodes += 1
            if self.max_nodes is not None and self.nodes > self.max_nodes:
                raise BudgetExceeded(f"completeness check exceeded {self.max_nodes} nodes")
            if not self.sat(everything - h):
                return False
        return True


def minimal_conflicts(
    clauses: Sequence[Clause] | Iterable[Clause],
    max_card: int | None = DEFAULT_MAX_CARD,
    max_nodes: int | None = DEFAULT_MAX_NODES,
    stats: dict | None = None,
) -> list[Conflict]:
    """All subset-minimal inconsistent subsets, sorted by clause-id tuple.

    Raises BudgetExceeded when a conflict larger than ``max_card`` exists or
    the search visits more than ``max_nodes`` candidate sets.
    """
    en = _Enumerator(encode(clauses), max_card, max_nodes)
    found = en.run()
    if en.truncated and not en.complete(found):
        raise BudgetExceeded(f"a minimal conflict larger than {max_card} clauses exists")
    if stats is not None:
        stats["nodes"] = stats.get("nodes", 0) + en.nodes
        stats["truncated"] = stats.get("truncated", False) or en.truncated
    return sorted((Conflict(s) for s in found), key=Conflict.key)


# ---------------------------------------------------------------- spatial size


def conflict_size(conf: Conflict | Iterable[int], kb: KnowledgeBase) -> int:
    """Radius of the smallest k-neighborhood holding every parcel of the conflict."""
    ids = conf.clause_ids if isinstance(conf, Conflict) else conf
    fp = sorted(set().union(*(kb[i].footprint for i in ids)))
    g = kb.graph
    dists = [g.bfs(v) for v in fp]
    reach = dists[0]
    if any(v not in reach for v in fp):
        raise DisconnectedFootprint(f"conflict {sorted(ids)} spans disconnected parcels")
    return min(max(d[v] for d in dists) for v in reach)


def max_conflict_size(confs: Iterable[Conflict], kb: KnowledgeBase) -> int:
    return max((conflict_size(c, kb) for c in confs), default=0)
