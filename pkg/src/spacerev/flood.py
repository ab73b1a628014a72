"""Flooding scenario: water-level interval beliefs and flux-direction knowledge
compiled to parcel-anchored clauses, plus a seeded instance generator.

Encoding. ``A<l>@x`` means "water level at parcel x is at least l" for
l = 1..L-1. Per parcel, protected ladder clauses ``A<l+1>@x -> A<l>@x`` keep
the atoms a threshold encoding. An interval (lo, hi) becomes the revisable
units ``A<lo>@x`` and ``-A<hi+1>@x`` (each omitted when trivially true).
A flux x -> y states level(x) >= level(y) and becomes the protected clauses
``A<l>@y -> A<l>@x`` for every l.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import isqrt

from .errors import InvalidParams, InvalidScenario, ParseError
from .graph import SpaceGraph, build_graph, iter_lines, parse_graph_line
from .kb import Atom, Clause, KnowledgeBase, Source


def level_atom(parcel: int, level: int) -> Atom:
    return Atom(parcel, f"A{level}")


@dataclass(frozen=True)
class FloodScenario:
    graph: SpaceGraph
    levels: int
    intervals: dict[int, tuple[int, int]] = field(default_factory=dict)
    fluxes: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        if self.levels < 1:
            raise InvalidScenario("levels must be positive")
        for p, (lo, hi) in self.intervals.items():
            if p not in self.graph:
                raise InvalidScenario(f"interval on unknown parcel {p}")
            if not 0 <= lo <= hi < self.levels:
                raise InvalidScenario(f"interval ({lo}, {hi}) at parcel {p} outside [0, {self.levels})")
        for x, y in self.fluxes:
            if frozenset((x, y)) not in self.graph.edges:
                raise InvalidScenario(f"flux {x}->{y} is not along a graph edge")

    def to_text(self) -> str:
        lines = [f"levels {self.levels}", self.graph.to_text().rstrip("\n")]
        lines += [f"interval {p} {lo} {hi}" for p, (lo, hi) in sorted(self.intervals.items())]
        lines += [f"flux {x} {y}" for x, y in sorted(self.fluxes)]
        return "\n".join(lines) + "\n"


def flux_clause(cid: int, upstream: int, downstream: int, level: int) -> Clause:
    # water reaching `level` downstream has reached it upstream too
    return Clause(
        cid,
        frozenset({(level_atom(downstream, level), False), (level_atom(upstream, level), True)}),
        Source.S2,
    )


def compile(s: FloodScenario) -> KnowledgeBase:
    clauses: list[Clause] = []

    def add(lits, source):
        clauses.append(Clause(len(clauses), frozenset(lits), source))

    L = s.levels
    for x in s.graph.vertices:
        for lvl in range(1, L - 1):
            add({(level_atom(x, lvl + 1), False), (level_atom(x, lvl), True)}, Source.S2)
    for x, y in sorted(s.fluxes):
        for lvl in range(1, L):
            clauses.append(flux_clause(len(clauses), x, y, lvl))
    for x, (lo, hi) in sorted(s.intervals.items()):
        if lo >= 1:
            add({(level_atom(x, lo), True)}, Source.S1)
        if hi + 1 <= L - 1:
            add({(level_atom(x, hi + 1), False)}, Source.S1)
    return KnowledgeBase(tuple(clauses), s.graph)


def parse_scenario(text: str) -> FloodScenario:
    vertices: list[int] = []
    edges: list[tuple[int, int, int]] = []
    seen: set = set()
    levels = None
    intervals: dict[int, tuple[int, int]] = {}
    fluxes: set[tuple[int, int]] = set()
    for lineno, tokens in iter_lines(text):
        if parse_graph_line(tokens, lineno, vertices, edges, seen):
            continue
        head, args = tokens[0], tokens[1:]
        if not all(a.isdigit() for a in args):
            raise ParseError(f"non-numeric field in {head!r} line", lineno)
        nums = [int(a) for a in args]
        if head == "levels" and len(nums) == 1:
            if levels is not None:
                raise ParseError("levels declared twice", lineno)
            levels = nums[0]
        elif head == "interval" and len(nums) == 3:
            if nums[0] in intervals:
                raise ParseError(f"second interval for parcel {nums[0]}", lineno)
            intervals[nums[0]] = (nums[1], nums[2])
        elif head == "flux" and len(nums) == 2:
            if tuple(nums) in fluxes:
                raise ParseError(f"duplicate flux {nums[0]} {nums[1]}", lineno)
            fluxes.add((nums[0], nums[1]))
        else:
            raise ParseError(f"malformed {head!r} line", lineno)
    if levels is None:
        raise ParseError("missing 'levels' line")
    graph = build_graph(vertices, edges)
    try:
        return FloodScenario(graph, levels, intervals, frozenset(fluxes))
    except InvalidScenario as exc:
        raise ParseError(str(exc)) from exc


@dataclass(frozen=True)
class GenParams:
    parcel_count: int
    layout: str = "path"
    levels: int = 4
    interval_density: float = 0.3
    flux_density: float = 0.5
    planted_conflict_size: int | None = None
    planted_count: int = 1
    grid_cols: int | None = None

    def validate(self) -> None:
        if self.parcel_count < 1:
            raise InvalidParams("parcel_count must be positive")
        if self.layout not in ("path", "grid"):
            raise InvalidParams(f"layout must be 'path' or 'grid', got {self.layout!r}")
        if self.levels < 1:
            raise InvalidParams("levels must be positive")
        for name in ("interval_density", "flux_density"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidParams(f"{name} must lie in [0, 1]")
        if self.planted_conflict_size is not None:
            if self.planted_conflict_size < 1:
                raise InvalidParams("planted_conflict_size must be at least 1")
            if self.levels < 2:
                raise InvalidParams("planting a conflict needs at least 2 levels")
            if self.planted_count < 1:
                raise InvalidParams("planted_count must be at least 1")


def _make_graph(p: GenParams) -> SpaceGraph:
    if p.layout == "path":
        return SpaceGraph.path(p.parcel_count)
    cols = p.grid_cols or isqrt(p.parcel_count)
    if cols < 1 or p.parcel_count % cols:
        raise InvalidParams(f"{p.parcel_count} parcels do not fill a grid with {cols} columns")
    return SpaceGraph.grid(p.parcel_count // cols, cols)


def _straight_chains(g: SpaceGraph, length: int) -> list[list[int]]:
    """Every straight run of ``length`` edges (both directions)."""
    layout = g.layout
    if layout[0] == "path":
        runs = [list(range(a, a + length + 1)) for a in range(layout[1] - length)]
    else:
        _, rows, cols = layout
        runs = []
        for r in range(rows):
            for c in range(cols - length):
                runs.append([r * cols + c + t for t in range(length + 1)])
        for r in range(rows - length):
            for c in range(cols):
                runs.append([(r + t) * cols + c for t in range(length + 1)])
    return runs + [run[::-1] for run in runs]


def generate(params: GenParams, rng_seed: int) -> FloodScenario:
    """A random scenario; with ``planted_conflict_size = d`` it contains a
    flux chain of 2d edges whose end intervals cannot both hold, i.e. a
    minimal conflict of spatial size exactly d."""
    params.validate()
    rng = random.Random(rng_seed)
    g = _make_graph(params)
    L = params.levels
    fluxes: set[tuple[int, int]] = set()
    for e in sorted(tuple(sorted(e)) for e in g.edges):
        if rng.random() < params.flux_density:
            fluxes.add(e if rng.random() < 0.5 else e[::-1])
    intervals: dict[int, tuple[int, int]] = {}
    for v in g.vertices:
        if rng.random() < params.interval_density:
            lo = rng.randrange(L)
            intervals[v] = (lo, rng.randrange(lo, L))

    d = params.planted_conflict_size
    if d is not None:
        runs = _straight_chains(g, 2 * d)
        if not runs:
            raise InvalidParams(f"graph too small for a planted conflict of size {d}")
        used: set[int] = set()
        for _ in range(params.planted_count):
            free = [r for r in runs if not (set(r) & used)]
            if not free:
                raise InvalidParams("no room for another planted conflict")
            chain = rng.choice(free)
            used.update(chain)
            for a, b in zip(chain, chain[1:]):
                fluxes.discard((b, a))
                fluxes.add((a, b))
            for v in chain[1:-1]:
                intervals.pop(v, None)
            h = rng.randrange(L - 1)
            intervals[chain[0]] = (rng.randint(0, h), h)
            intervals[chain[-1]] = (h + 1, rng.randint(h + 1, L - 1))
    return FloodScenario(g, L, intervals, frozenset(fluxes))
