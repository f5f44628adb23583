"""Standard decorations (hard-core, colorings, list colorings, Ising) and test graphs."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ConfigError
from .graph_core import DecoratedGraph, Graph, as_fraction

ONE, ZERO = Fraction(1), Fraction(0)

# hard-core color convention: 1 = unoccupied, 2 = occupied
UNOCCUPIED, OCCUPIED = 1, 2


@dataclass(frozen=True)
class ModelSpec:
    """Named model plus parameters; ``build(graph)`` returns the decoration."""

    kind: str
    params: tuple[tuple[str, object], ...] = ()

    def build(self, graph: Graph) -> DecoratedGraph:
        p = dict(self.params)
        if self.kind == "hardcore":
            return build_hardcore(graph, p.get("lambda", 1))
        if self.kind == "coloring":
            return build_proper_coloring(graph, int(p.get("K", 3)))
        if self.kind == "list":
            return build_list_coloring(graph, int(p["K"]), p["lists"])
        if self.kind == "ising":
            return build_ising(graph, p.get("h", 1), p.get("b", 1))
        raise ConfigError(f"unknown model kind {self.kind!r}")


def _uniform(graph: Graph, K: int, a: Sequence, A: Sequence[Sequence]) -> DecoratedGraph:
    a = tuple(a)
    A = tuple(tuple(r) for r in A)
    return DecoratedGraph(graph, K, (a,) * graph.n, (A,) * len(graph.edges))


def build_hardcore(graph: Graph, lam) -> DecoratedGraph:
    lam = as_fraction(lam)
    if lam < 0:
        raise ConfigError(f"fugacity must be >= 0, got {lam}")
    return _uniform(graph, 2, (ONE, lam), ((ONE, ONE), (ONE, ZERO)))


def build_proper_coloring(graph: Graph, K: int) -> DecoratedGraph:
    if K < 1:
        raise ConfigError("K must be >= 1")
    A = tuple(tuple(ZERO if i == j else ONE for j in range(K)) for i in range(K))
    return _uniform(graph, K, (ONE,) * K, A)


def build_list_coloring(graph: Graph, K: int, lists: Sequence[Sequence[int]]) -> DecoratedGraph:
    """Proper list colorings with lists ``lists[u]`` of 1-based colors.

    Lists are enforced through the edge matrices only (node weights stay all
    ones), so an isolated node contributes a factor K rather than
    ``len(lists[u])``.
    """
    if len(lists) != graph.n:
        raise ConfigError(f"need {graph.n} color lists, got {len(lists)}")
    sets = []
    for u, lst in enumerate(lists):
        s = {int(c) for c in lst}
        if any(not 1 <= c <= K for c in s):
            raise ConfigError(f"node {u}: list {sorted(s)} not within 1..{K}")
        sets.append(s)
    mats = []
    for u, v in graph.edges:
        mats.append(
            tuple(
                tuple(
                    ONE if i != j and i + 1 in sets[u] and j + 1 in sets[v] else ZERO
                    for j in range(K)
                )
                for i in range(K)
            )
        )
    return DecoratedGraph(graph, K, ((ONE,) * K,) * graph.n, tuple(mats))


def build_ising(graph: Graph, h_factor, b) -> DecoratedGraph:
    """Ising model with ``h_factor`` standing for e^h and ``b`` for e^beta.

    Both must be given as rationals; irrational exponentials have to be
    approximated by the caller.
    """
    h_factor, b = as_fraction(h_factor), as_fraction(b)
    if b <= 0:
        raise ConfigError(f"b (= e^beta) must be > 0, got {b}")
    if h_factor < 0:
        raise ConfigError(f"h_factor (= e^h) must be >= 0, got {h_factor}")
    return _uniform(graph, 2, (ONE, h_factor), ((b, 1 / b), (1 / b, b)))


def hardcore_threshold(d: int) -> Fraction:
    """Uniqueness threshold (d-1)^(d-1) / (d-2)^d for max degree d >= 3."""
    if d < 3:
        raise ConfigError("threshold defined for d >= 3")
    return Fraction((d - 1) ** (d - 1), (d - 2) ** d)


# -- test graphs ---------------------------------------------------------

def _need(n: int, lo: int = 1):
    if n < lo:
        raise ConfigError(f"size must be >= {lo}, got {n}")


def edgeless(n: int) -> Graph:
    _need(n)
    return Graph(n)


def path(n: int) -> Graph:
    _need(n)
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle(n: int) -> Graph:
    _need(n, 3)
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete(n: int) -> Graph:
    _need(n)
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def grid(w: int, h: int) -> Graph:
    _need(w)
    _need(h)
    idx = lambda x, y: y * w + x  # noqa: E731
    edges = [(idx(x, y), idx(x + 1, y)) for y in range(h) for x in range(w - 1)]
    edges += [(idx(x, y), idx(x, y + 1)) for y in range(h - 1) for x in range(w)]
    return Graph(w * h, tuple(edges))


def regular_tree(d: int, depth: int) -> Graph:
    """Tree in which every internal node has degree d: root has d children,
    deeper internal nodes d - 1.  Nodes are numbered breadth-first."""
    _need(d)
    if depth < 0:
        raise ConfigError("depth must be >= 0")
    edges, level, nxt = [], [0], 1
    for lvl in range(depth):
        new = []
        for parent in level:
            for _ in range(d if lvl == 0 else d - 1):
                edges.append((parent, nxt))
                new.append(nxt)
                nxt += 1
        level = new
    return Graph(nxt, tuple(edges))


def erdos_renyi(n: int, p: float, rng: random.Random) -> Graph:
    _need(n)
    return Graph(
        n,
        tuple((i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p),
    )


BUILDERS = {
    "edgeless": (edgeless, ("n",)),
    "path": (path, ("n",)),
    "cycle": (cycle, ("n",)),
    "complete": (complete, ("n",)),
    "grid": (grid, ("w", "h")),
    "regular_tree": (regular_tree, ("d", "depth")),
}


def build_test_graph(name: str, **params) -> Graph:
    try:
        fn, names = BUILDERS[name]
    except KeyError:
        raise ConfigError(f"unknown graph builder {name!r}; choose from {sorted(BUILDERS)}") from None
    missing = [k for k in names if k not in params]
    extra = [k for k in params if k not in names]
    if missing or extra:
        raise ConfigError(f"builder {name} takes {names}; missing {missing}, unexpected {extra}")
    return fn(*(int(params[k]) for k in names))
