"""Parcel space as a simple undirected graph: distances, k-neighborhoods,
block/cover partitions and shifted partitions.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InvalidRadii, ParseError, SpaceRevError, UnknownVertex

Vertex = int


@dataclass(frozen=True)
class SpaceGraph:
    vertices: tuple[Vertex, ...]
    edges: frozenset[frozenset[Vertex]]

    def __post_init__(self):
        verts = tuple(sorted(set(self.vertices)))
        if len(verts) != len(self.vertices):
            raise SpaceRevError("duplicate vertex ids")
        object.__setattr__(self, "vertices", verts)
        vset = set(verts)
        for e in self.edges:
            if len(e) != 2:
                raise SpaceRevError(f"self-loop or malformed edge {sorted(e)}")
            for v in e:
                if v not in vset:
                    raise UnknownVertex(v)
        for v in verts:
            if v < 0:
                raise SpaceRevError(f"negative vertex id {v}")

    @classmethod
    def from_edges(cls, vertices: Iterable[Vertex], edges: Iterable[tuple[Vertex, Vertex]]) -> "SpaceGraph":
        es = set()
        for u, v in edges:
            e = frozenset((u, v))
            if e in es:
                raise SpaceRevError(f"duplicate edge {u}-{v}")
            es.add(e)
        return cls(tuple(vertices), frozenset(es))

    @classmethod
    def path(cls, n: int) -> "SpaceGraph":
        return cls.from_edges(range(n), ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def grid(cls, rows: int, cols: int) -> "SpaceGraph":
        """Row-major grid: vertex ``r * cols + c`` sits at row r, column c."""
        edges = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
        return cls.from_edges(range(rows * cols), edges)

    @cached_property
    def adjacency(self) -> dict[Vertex, tuple[Vertex, ...]]:
        adj: dict[Vertex, list[Vertex]] = {v: [] for v in self.vertices}
        for e in self.edges:
            u, v = sorted(e)
            adj[u].append(v)
            adj[v].append(u)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    @cached_property
    def _bfs_cache(self) -> dict[Vertex, dict[Vertex, int]]:
        return {}

    @cached_property
    def layout(self) -> tuple | None:
        """``("path", n)`` or ``("grid", rows, cols)`` when the graph is exactly
        one of those with canonical ids, else None."""
        n = len(self.vertices)
        if self.vertices != tuple(range(n)):
            return None
        if self.edges == SpaceGraph.path(n).edges:
            return ("path", n)
        for cols in range(2, n // 2 + 1):
            if n % cols == 0 and n // cols >= 2:
                if len(self.edges) == (n // cols) * (cols - 1) + (n // cols - 1) * cols:
                    if self.edges == SpaceGraph.grid(n // cols, cols).edges:
                        return ("grid", n // cols, cols)
        return None

    def __contains__(self, v) -> bool:
        return v in self.adjacency

    def __len__(self) -> int:
        return len(self.vertices)

    def check_vertex(self, v: Vertex) -> None:
        if v not in self.adjacency:
            raise UnknownVertex(v)

    def bfs(self, source: Vertex) -> dict[Vertex, int]:
        """Distances from ``source`` to every reachable vertex."""
        self.check_vertex(source)
        cached = self._bfs_cache.get(source)
        if cached is not None:
            return cached
        dist = {source: 0}
        queue = deque([source])
        adj = self.adjacency
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        self._bfs_cache[source] = dist
        return dist

    def to_text(self) -> str:
        lines = [f"v {v}" for v in self.vertices]
        lines += [f"e {u} {v}" for u, v in sorted(tuple(sorted(e)) for e in self.edges)]
        return "\n".join(lines) + "\n"


def distance(g: SpaceGraph, u: Vertex, v: Vertex) -> int | None:
    """Shortest-path edge count between u and v; None when unreachable."""
    g.check_vertex(v)
    return g.bfs(u).get(v)


def k_neighborhood(g: SpaceGraph, v: Vertex, k: int) -> frozenset[Vertex]:
    if k < 0:
        raise InvalidRadii(f"negative radius {k}")
    return frozenset(w for w, d in g.bfs(v).items() if d <= k)


def components(g: SpaceGraph) -> list[frozenset[Vertex]]:
    seen: set[Vertex] = set()
    out = []
    for v in g.vertices:
        if v not in seen:
            comp = frozenset(g.bfs(v))
            seen |= comp
            out.append(comp)
    return out


@dataclass(frozen=True)
class SeedPolicy:
    """How the next seed is chosen among unassigned vertices.

    ``det`` takes the lowest id; ``random`` draws with ``random.Random(rng_seed)``.
    """

    kind: str = "det"
    rng_seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("det", "random"):
            raise ValueError(f"unknown seed policy {self.kind!r}")

    @classmethod
    def deterministic(cls) -> "SeedPolicy":
        return cls("det")

    @classmethod
    def random(cls, rng_seed: int) -> "SeedPolicy":
        return cls("random", rng_seed)


@dataclass(frozen=True)
class Blocking:
    k: int
    kprime: int
    blocks: tuple[frozenset[Vertex], ...]
    seeds: tuple[Vertex, ...]
    covers: tuple[frozenset[Vertex], ...]
    origin: str = "base"
    windows: tuple[frozenset[Vertex], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "windows", tuple(b | q for b, q in zip(self.blocks, self.covers)))

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def thickness(self) -> int:
        return self.kprime - self.k

    @property
    def heuristic(self) -> bool:
        return self.origin.startswith("general")

    def block_of(self, v: Vertex) -> int:
        for i, b in enumerate(self.blocks):
            if v in b:
                return i
        raise UnknownVertex(v)

    def check(self, g: SpaceGraph) -> None:
        """Raise AssertionError if any Blocking invariant fails on ``g``."""
        seen: set[Vertex] = set()
        for i, (b, s, q) in enumerate(zip(self.blocks, self.seeds, self.covers)):
            assert b, f"empty block {i}"
            assert not (b & seen), f"block {i} overlaps an earlier block"
            seen |= b
            nk = k_neighborhood(g, s, self.k)
            assert s in b and b <= nk, f"block {i} not inside the k-neighborhood of its seed"
            assert q == k_neighborhood(g, s, self.kprime) - nk, f"cover {i} mismatch"
            assert not (q & b)
        assert seen == set(g.vertices), "blocks do not cover the graph"


def partition(
    g: SpaceGraph,
    k: int,
    kprime: int,
    seed_policy: SeedPolicy | None = None,
    preferred_seeds: Sequence[Vertex] = (),
    origin: str = "base",
) -> Blocking:
    """Split ``g`` into blocks of k-neighborhoods with their (k'-k)-thick covers.

    Seeds from ``preferred_seeds`` are consumed first (skipping assigned or
    unknown ones); the policy picks seeds afterwards.
    """
    if k < 0 or kprime <= k:
        raise InvalidRadii(f"need kprime > k >= 0, got k={k}, kprime={kprime}")
    if not g.vertices:
        raise SpaceRevError("cannot partition an empty graph")
    seed_policy = seed_policy or SeedPolicy()
    rng = random.Random(seed_policy.rng_seed) if seed_policy.kind == "random" else None

    unassigned = set(g.vertices)
    blocks, seeds, covers = [], [], []

    def take(s: Vertex) -> None:
        nk = k_neighborhood(g, s, k)
        block = frozenset(nk & unassigned)
        unassigned.difference_update(block)
        blocks.append(block)
        seeds.append(s)
        covers.append(k_neighborhood(g, s, kprime) - nk)

    for s in preferred_seeds:
        if s in unassigned:
            take(s)
    while unassigned:
        if rng is None:
            s = min(unassigned)
        else:
            s = rng.choice(sorted(unassigned))
        take(s)
    return Blocking(k, kprime, tuple(blocks), tuple(seeds), tuple(covers), origin)


def shift_offsets(g: SpaceGraph, base: Blocking) -> list:
    q = base.thickness
    layout = g.layout
    if layout is not None and layout[0] == "grid":
        return [(dy, dx) for dy in range(1, 2 * q + 1) for dx in range(2 * q)]
    return list(range(1, 2 * q + 1))


def _translate_general(g: SpaceGraph, s: Vertex, j: int) -> Vertex | None:
    # lowest id above s at distance exactly j, falling back to the lowest id overall
    ring = sorted(v for v, d in g.bfs(s).items() if d == j)
    if not ring:
        return None
    above = [v for v in ring if v > s]
    return above[0] if above else ring[0]


def shift_blockings(g: SpaceGraph, base: Blocking, seed_policy: SeedPolicy | None = None) -> list[Blocking]:
    """Alternative blockings whose blocks straddle the boundaries of ``base``.

    Paths advance the base seed chain by 1..2q; grids translate it by
    (dy, dx) with dy in 1..2q and dx in 0..2q-1 (4q^2 members); other graphs re-seed
    at graph distance 1..2q from each base seed (a heuristic, flagged through
    ``Blocking.heuristic``).
    """
    layout = g.layout
    out = []
    for off in shift_offsets(g, base):
        if layout is not None and layout[0] == "path":
            n = layout[1]
            pref = [s + off for s in base.seeds if s + off < n]
            origin = f"path+{off}"
        elif layout is not None and layout[0] == "grid":
            _, rows, cols = layout
            dy, dx = off
            pref = []
            for s in base.seeds:
                r, c = divmod(s, cols)
                if r + dy < rows and c + dx < cols:
                    pref.append((r + dy) * cols + c + dx)
            origin = f"grid+{dy},{dx}"
        else:
            pref = [t for t in (_translate_general(g, s, off) for s in base.seeds) if t is not None]
            origin = f"general+{off}"
        out.append(partition(g, base.k, base.kprime, seed_policy, pref, origin))
    return out


def parse_graph_line(tokens: list[str], lineno: int, vertices: list, edges: list, seen_edges: set) -> bool:
    """Consume one ``v``/``e`` line; return False when the line is not a graph line."""
    if tokens[0] == "v":
        if len(tokens) != 2:
            raise ParseError("expected 'v <id>'", lineno)
        vid = _parse_id(tokens[1], lineno)
        if ("v", vid) in seen_edges:
            raise ParseError(f"vertex {vid} declared twice", lineno)
        seen_edges.add(("v", vid))
        vertices.append(vid)
        return True
    if tokens[0] == "e":
        if len(tokens) != 3:
            raise ParseError("expected 'e <id1> <id2>'", lineno)
        u, v = _parse_id(tokens[1], lineno), _parse_id(tokens[2], lineno)
        if u == v:
            raise ParseError(f"self-loop on {u}", lineno)
        key = frozenset((u, v))
        if key in seen_edges:
            raise ParseError(f"duplicate edge {u} {v}", lineno)
        seen_edges.add(key)
        edges.append((u, v, lineno))
        return True
    return False


def _parse_id(tok: str, lineno: int) -> int:
    if not tok.isdigit():
        raise ParseError(f"bad vertex id {tok!r}", lineno)
    return int(tok)


def iter_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def build_graph(vertices: list, edges: list) -> SpaceGraph:
    """``edges`` holds ``(u, v, lineno)`` triples from parse_graph_line."""
    vset = set(vertices)
    for u, v, lineno in edges:
        for w in (u, v):
            if w not in vset:
                raise ParseError(f"edge endpoint {w} is not a declared vertex", lineno)
    return SpaceGraph.from_edges(vertices, [(u, v) for u, v, _ in edges])


def parse_graph(text: str) -> SpaceGraph:
    vertices: list[int] = []
    edges: list[tuple[int, int, int]] = []
    seen: set = set()
    for lineno, tokens in iter_lines(text):
        if not parse_graph_line(tokens, lineno, vertices, edges, seen):
            raise ParseError(f"unknown directive {tokens[0]!r}", lineno)
    return build_graph(vertices, edges)

