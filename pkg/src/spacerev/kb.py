"""Parcel-anchored propositional clauses and their locality relative to a blocking."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from .errors import BadIndex, IngestError, ParseError
from .graph import Blocking, SpaceGraph, iter_lines


class Source(enum.Enum):
    S1 = "S1"  # belief, revisable
    S2 = "S2"  # knowledge, protected


class ClauseClass(enum.Enum):
    B = "b"  # inside the block
    C = "c"  # straddles block and cover
    Q = "q"  # inside the cover only
    N = "n"  # anything else


WINDOW_CLASSES = frozenset({ClauseClass.B, ClauseClass.C, ClauseClass.Q})


@dataclass(frozen=True, order=True)
class Atom:
    parcel: int
    name: str

    def __str__(self) -> str:
        return f"{self.name}@{self.parcel}"


Literal = tuple[Atom, bool]


@dataclass(frozen=True)
class Clause:
    id: int
    literals: frozenset[Literal]
    source: Source = Source.S1

    def __post_init__(self):
        if not self.literals:
            raise IngestError(f"clause {self.id} is empty")
        atoms = [a for a, _ in self.literals]
        if len(set(atoms)) != len(atoms):
            raise IngestError(f"clause {self.id} is a tautology")

    @classmethod
    def of(cls, id: int, lits: Iterable[str | Literal], source: Source | str = Source.S1) -> "Clause":
        """Build a clause from ``"-A3@4"`` style strings or (Atom, polarity) pairs."""
        parsed = frozenset(parse_literal(x) if isinstance(x, str) else x for x in lits)
        return cls(id, parsed, Source(source))

    @property
    def protected(self) -> bool:
        return self.source is Source.S2

    @cached_property
    def footprint(self) -> frozenset[int]:
        return frozenset(a.parcel for a, _ in self.literals)

    def sorted_literals(self) -> list[Literal]:
        # positive first per atom order keeps text output stable
        return sorted(self.literals, key=lambda lit: (lit[0], not lit[1]))

    def to_text(self) -> str:
        lits = " ".join(("" if pol else "-") + str(a) for a, pol in self.sorted_literals())
        return f"c {self.id} {self.source.value} {lits}"

    def __str__(self) -> str:
        body = " | ".join(("" if pol else "~") + str(a) for a, pol in self.sorted_literals())
        return f"#{self.id}[{self.source.value}] {body}"


def parse_literal(tok: str, lineno: int | None = None) -> Literal:
    positive = not tok.startswith("-")
    body = tok if positive else tok[1:]
    name, sep, parcel = body.rpartition("@")
    if not sep or not name or not parcel.isdigit():
        raise ParseError(f"bad literal {tok!r}", lineno)
    return Atom(int(parcel), name), positive


def footprint(c: Clause) -> frozenset[int]:
    return c.footprint


@dataclass(frozen=True)
class KnowledgeBase:
    clauses: tuple[Clause, ...]
    graph: SpaceGraph
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_id = {}
        verts = set(self.graph.vertices)
        for c in self.clauses:
            if c.id in by_id:
                raise IngestError(f"duplicate clause id {c.id}")
            if not c.footprint <= verts:
                raise IngestError(f"clause {c.id} mentions parcels outside the graph")
            by_id[c.id] = c
        object.__setattr__(self, "_by_id", by_id)

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __getitem__(self, cid: int) -> Clause:
        return self._by_id[cid]

    def __contains__(self, cid) -> bool:
        return cid in self._by_id

    @cached_property
    def protected_ids(self) -> frozenset[int]:
        return frozenset(c.id for c in self.clauses if c.protected)

    def subset(self, ids: Iterable[int]) -> list[Clause]:
        return [self._by_id[i] for i in sorted(ids)]

    def without(self, ids: Iterable[int]) -> "KnowledgeBase":
        drop = set(ids)
        return KnowledgeBase(tuple(c for c in self.clauses if c.id not in drop), self.graph)

    def to_text(self) -> str:
        return "".join(c.to_text() + "\n" for c in self.clauses)


def classify(c: Clause, blocking: Blocking, i: int) -> ClauseClass:
    if not 0 <= i < len(blocking.blocks):
        raise BadIndex(f"block index {i} out of range 0..{len(blocking.blocks) - 1}")
    fp = c.footprint
    block, cover = blocking.blocks[i], blocking.covers[i]
    if fp <= block:
        return ClauseClass.B
    if fp <= cover:
        return ClauseClass.Q
    if fp <= block | cover:
        return ClauseClass.C
    return ClauseClass.N


def clauses_of(kb: KnowledgeBase, blocking: Blocking, i: int, classes=WINDOW_CLASSES) -> list[Clause]:
    return [c for c in kb.clauses if classify(c, blocking, i) in classes]


def parse_clause_line(tokens: list[str], lineno: int) -> Clause:
    if len(tokens) < 4:
        raise ParseError("expected 'c <id> <S1|S2> <lit>...'", lineno)
    if not tokens[1].isdigit():
        raise ParseError(f"bad clause id {tokens[1]!r}", lineno)
    if tokens[2] not in ("S1", "S2"):
        raise ParseError(f"bad source {tokens[2]!r}", lineno)
    lits = [parse_literal(t, lineno) for t in tokens[3:]]
    if len(set(lits)) != len(lits):
        raise ParseError("repeated literal", lineno)
    try:
        return Clause(int(tokens[1]), frozenset(lits), Source(tokens[2]))
    except IngestError as exc:
        raise ParseError(str(exc), lineno) from exc


def parse_clauses(text: str) -> list[Clause]:
    out = []
    for lineno, tokens in iter_lines(text):
        if tokens[0] != "c":
            raise ParseError(f"unknown directive {tokens[0]!r}", lineno)
        out.append(parse_clause_line(tokens, lineno))
    return out


def load_kb(graph: SpaceGraph, clauses: Iterable[Clause]) -> KnowledgeBase:
    try:
        return KnowledgeBase(tuple(clauses), graph)
    except IngestError as exc:
        raise ParseError(str(exc)) from exc
