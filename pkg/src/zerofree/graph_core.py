"""Decorated graphs: the (V, E, node weights, edge matrices) data model.

Colors are 1-based at every public surface (``ColorAssignment`` values,
``reduce``); weight vectors and matrices are indexed 0-based internally, so
color ``c`` reads ``a[c - 1]``.

Edge matrices are stored once per undirected edge ``(u, v)`` with ``u < v``;
row index is the color of ``u``.  ``DecoratedGraph.edge_matrix(v, u)`` returns
the transpose.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, ConflictingAssignment

Vector = tuple[Fraction, ...]
Matrix = tuple[Vector, ...]
NodeSet = tuple[int, ...]


def as_fraction(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to an exact Fraction.

    Floats are rejected: a binary float silently turns 0.1 into
    3602879701896397/36028797018963968.
    """
    if isinstance(value, bool):
        raise ConfigError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"not a rational: {value!r}") from exc
    raise ConfigError(f"not an exact rational (use int, Fraction or 'p/q'): {value!r}")


def fraction_str(x: Fraction) -> str:
    """Serialize as ``"p/q"`` (denominator always present)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes ``0..n-1``."""

    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ConfigError("node count must be non-negative")
        canon = set()
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise ConfigError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ConfigError(f"edge ({u}, {v}) out of range for n={self.n}")
            key = (min(u, v), max(u, v))
            if key in canon:
                raise ConfigError(f"duplicate edge {key}")
            canon.add(key)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edge_index

    def induced(self, nodes: Sequence[int]) -> "Graph":
        """Induced subgraph, relabelled to ``0..len(nodes)-1`` in the given order."""
        pos = {u: i for i, u in enumerate(nodes)}
        return Graph(
            len(nodes),
            tuple((pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos),
        )

    def components(self) -> list[NodeSet]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                u = stack.pop()
                comp.append(u)
                for w in self.adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        stack.append(w)
            comps.append(tuple(sorted(comp)))
        return comps

    def is_connected(self) -> bool:
        return self.n > 0 and len(self.components()) == 1


@dataclass(frozen=True)
class DecoratedGraph:
    """A graph with node weight vectors ``a^u`` and edge matrices ``A^(u,v)``.

    ``edge_weights[i]`` belongs to ``graph.edges[i]``.  All weights must be
    non-negative rationals; matrices are K x K and need not be symmetric,
    since reading them against the stored orientation transposes them.
    """

    graph: Graph
    K: int
    node_weights: tuple[Vector, ...]
    edge_weights: tuple[Matrix, ...]
    _check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        nw = tuple(tuple(as_fraction(x) for x in a) for a in self.node_weights)
        ew = tuple(
            tuple(tuple(as_fraction(x) for x in row) for row in m)
            for m in self.edge_weights
        )
        object.__setattr__(self, "node_weights", nw)
        object.__setattr__(self, "edge_weights", ew)
        if self.K < 1:
            raise ConfigError("K must be >= 1")
        if len(nw) != self.graph.n:
            raise ConfigError(f"expected {self.graph.n} node weight vectors, got {len(nw)}")
        if len(ew) != len(self.graph.edges):
            raise ConfigError(
                f"expected {len(self.graph.edges)} edge matrices, got {len(ew)}"
            )
        for u, a in enumerate(nw):
            if len(a) != self.K:
                raise ConfigError(f"node {u}: weight vector has length {len(a)} != K={self.K}")
            if self._check and any(x < 0 for x in a):
                raise ConfigError(f"node {u}: negative weight")
        for e, m in zip(self.graph.edges, ew):
            if len(m) != self.K or any(len(row) != self.K for row in m):
                raise ConfigError(f"edge {e}: matrix is not {self.K}x{self.K}")
            if self._check and any(x < 0 for row in m for x in row):
                raise ConfigError(f"edge {e}: negative weight")

    @classmethod
    def from_mapping(
        cls,
        graph: Graph,
        K: int,
        node_weights: Sequence[Sequence],
        edge_weights: Mapping[tuple[int, int], Sequence[Sequence]],
    ) -> "DecoratedGraph":
        """Build from a dict keyed by edge; a key ``(v, u)`` with ``v > u`` is
        read as oriented from ``v`` and stored transposed."""
        mats = []
        for u, v in graph.edges:
            if (u, v) in edge_weights:
                mats.append(tuple(tuple(r) for r in edge_weights[(u, v)]))
            elif (v, u) in edge_weights:
                mats.append(transpose(tuple(tuple(r) for r in edge_weights[(v, u)])))
            else:
                raise ConfigError(f"missing matrix for edge {(u, v)}")
        return cls(graph, K, tuple(tuple(a) for a in node_weights), tuple(mats))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self.graph.edges

    def edge_matrix(self, u: int, v: int) -> Matrix:
        i = self.graph.edge_index.get((min(u, v), max(u, v)))
        if i is None:
            raise KeyError((u, v))
        m = self.edge_weights[i]
        return m if u < v else transpose(m)

    def replace(self, node_weights=None, edge_weights=None) -> "DecoratedGraph":
        return DecoratedGraph(
            self.graph,
            self.K,
            self.node_weights if node_weights is None else node_weights,
            self.edge_weights if edge_weights is None else edge_weights,
        )


@dataclass(frozen=True)
class ColorAssignment:
    """Partial coloring ``node -> color in 1..K`` (the sigma / tau of a pinning)."""

    items: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        seen: dict[int, int] = {}
        for u, c in self.items:
            u, c = int(u), int(c)
            if u in seen and seen[u] != c:
                raise ConflictingAssignment(u, seen[u], c)
            seen[u] = c
        object.__setattr__(self, "items", tuple(sorted(seen.items())))

    @classmethod
    def of(cls, assign) -> "ColorAssignment":
        if isinstance(assign, ColorAssignment):
            return assign
        if assign is None:
            return cls()
        if isinstance(assign, Mapping):
            return cls(tuple(assign.items()))
        return cls(tuple(assign))

    @classmethod
    def from_lists(cls, nodes: Iterable[int], colors: Iterable[int]) -> "ColorAssignment":
        nodes, colors = list(nodes), list(colors)
        if len(nodes) != len(colors):
            raise ConfigError("node and color lists differ in length")
        return cls(tuple(zip(nodes, colors)))

    @property
    def domain(self) -> NodeSet:
        return tuple(u for u, _ in self.items)

    def as_dict(self) -> dict[int, int]:
        return dict(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)

    def union(self, other) -> "ColorAssignment":
        return ColorAssignment(self.items + ColorAssignment.of(other).items)

    def validate(self, g: DecoratedGraph) -> None:
        for u, c in self.items:
            if not 0 <= u < g.n:
                raise ConfigError(f"assigned node {u} not in graph (n={g.n})")
            if not 1 <= c <= g.K:
                raise ConfigError(f"color {c} at node {u} outside 1..{g.K}")


def reduce(g: DecoratedGraph, assign) -> DecoratedGraph:
    """The pinned decoration G_{S,sigma}.

    For every edge with an endpoint ``u`` in S the matrix entries are kept
    only where ``u``'s color equals ``sigma(u)``.  A pinned node with no
    incident edge cannot be pinned that way, so its node weight vector is
    masked instead; everything else is left untouched.
    """
    assign = ColorAssignment.of(assign)
    assign.validate(g)
    if not assign:
        return g
    pins = {u: c - 1 for u, c in assign.items}
    mats = []
    for (u, v), m in zip(g.edges, g.edge_weights):
        pu, pv = pins.get(u), pins.get(v)
        if pu is None and pv is None:
            mats.append(m)
            continue
        mats.append(
            tuple(
                tuple(
                    x if (pu is None or i == pu) and (pv is None or j == pv) else Fraction(0)
                    for j, x in enumerate(row)
                )
                for i, row in enumerate(m)
            )
        )
    nws = list(g.node_weights)
    for u, c in pins.items():
        if g.graph.degree(u) == 0:
            nws[u] = tuple(x if i == c else Fraction(0) for i, x in enumerate(nws[u]))
    return DecoratedGraph(g.graph, g.K, tuple(nws), tuple(mats))


def node_set(nodes: Iterable[int], n: int | None = None) -> NodeSet:
    out = tuple(sorted(set(int(u) for u in nodes)))
    if n is not None and any(not 0 <= u < n for u in out):
        raise ConfigError(f"node set {out} out of range for n={n}")
    return out


def distances(g, sources: Iterable[int]) -> list[int | None]:
    """Multi-source BFS distances; ``None`` for unreachable nodes."""
    graph = g.graph if isinstance(g, DecoratedGraph) else g
    dist: list[int | None] = [None] * graph.n
    queue = deque()
    for s in sources:
        if dist[s] is None:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        for w in graph.adjacency[u]:
            if dist[w] is None:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def ball(g, s: Iterable[int], r: int) -> NodeSet:
    s = node_set(s)
    if not s:
        raise ConfigError("ball needs a nonempty source set")
    if r < 0:
        raise ConfigError("radius must be >= 0")
    return tuple(u for u, d in enumerate(distances(g, s)) if d is not None and d <= r)


def boundary(g, s: Iterable[int], r: int) -> NodeSet:
    """Nodes at distance exactly ``r`` from ``s``; empty past the eccentricity."""
    s = node_set(s)
    if not s:
        raise ConfigError("boundary needs a nonempty source set")
    if r < 1:
        raise ConfigError("boundary radius must be >= 1")
    return tuple(u for u, d in enumerate(distances(g, s)) if d == r)


def disjoint_union(g1: DecoratedGraph, g2: DecoratedGraph) -> DecoratedGraph:
    if g1.K != g2.K:
        raise ConfigError(f"cannot union decorations with K={g1.K} and K={g2.K}")
    shift = g1.n
    graph = Graph(
        g1.n + g2.n,
        g1.edges + tuple((u + shift, v + shift) for u, v in g2.edges),
    )
    # shifted g2 edges sort after all g1 edges, so matrix order is preserved
    return DecoratedGraph(
        graph, g1.K, g1.node_weights + g2.node_weights, g1.edge_weights + g2.edge_weights
    )
