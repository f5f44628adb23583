"""Induced-subgraph counts and the cluster coefficients of the hard-core model.

``Ind(F, H)`` counts node subsets of H that induce a copy of F.  Products of
such counts expand linearly in counts of larger patterns (``ind_product_decompose``),
which turns the Girard sum for the power sums of the independence polynomial
into a linear combination ``sum_F beta_{F,k} Ind(F, G)``.  Coefficients of
disconnected patterns cancel, so only connected patterns on <= k nodes matter.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import BudgetExceeded, ConfigError
from .graph_core import DecoratedGraph, Graph
from .taylor import compositions, girard_coefficient, power_sums_newton

DEFAULT_P_MAX = 8


def _as_graph(h) -> Graph:
    return h.graph if isinstance(h, DecoratedGraph) else h


def _refined_cells(n: int, adj: Sequence[Sequence[int]]) -> list[list[int]]:
    """Color refinement started from degrees; cells are ordered by an
    isomorphism-invariant label, so they can be used to restrict relabelings."""
    colors = [len(adj[u]) for u in range(n)]
    while True:
        sigs = [(colors[u], tuple(sorted(colors[w] for w in adj[u]))) for u in range(n)]
        ranking = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranking[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            colors = new
            break
        colors = new
    cells = defaultdict(list)
    for u, c in enumerate(colors):
        cells[c].append(u)
    return [cells[c] for c in sorted(cells)]


@lru_cache(maxsize=None)
def canonical_form(n: int, edges: tuple[tuple[int, int], ...]) -> bytes:
    """Canonical bytes: identical exactly for isomorphic graphs.

    Minimum adjacency bit string over all relabelings that respect the
    refined cells; exhaustive within cells, fine for small patterns.
    """
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    cells = _refined_cells(n, adj)
    edge_set = {(min(u, v), max(u, v)) for u, v in edges}
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    best = None
    for perms in itertools.product(*(itertools.permutations(c) for c in cells)):
        order = [u for p in perms for u in p]
        bits = 0
        for i, j in pairs:
            a, b = order[i], order[j]
            bits = (bits << 1) | ((min(a, b), max(a, b)) in edge_set)
        if best is None or bits < best:
            best = bits
    nbytes = max(1, (len(pairs) + 7) // 8)
    return bytes([n]) + (best or 0).to_bytes(nbytes, "big")


@dataclass(frozen=True)
class PatternGraph(Graph):
    """Small graph identified up to isomorphism by ``canonical``."""

    @classmethod
    def from_graph(cls, g) -> "PatternGraph":
        g = _as_graph(g)
        return cls(g.n, g.edges)

    @cached_property
    def canonical(self) -> bytes:
        return canonical_form(self.n, self.edges)

    def isomorphic(self, other) -> bool:
        other = other if isinstance(other, PatternGraph) else PatternGraph.from_graph(other)
        return self.canonical == other.canonical

    def label(self) -> str:
        """Short human-readable key: node count, edge count, canonical hex."""
        return f"n{self.n}e{len(self.edges)}:{self.canonical[1:].hex()}"


def independent_pattern(j: int) -> PatternGraph:
    return PatternGraph(j)


@lru_cache(maxsize=None)
def all_graphs(n: int) -> tuple[PatternGraph, ...]:
    """One representative of every isomorphism class on exactly n nodes.

    Built by adding a node with every possible neighborhood to the classes on
    n - 1 nodes.
    """
    if n < 0:
        raise ConfigError("n must be >= 0")
    if n == 0:
        return (PatternGraph(0),)
    seen: dict[bytes, PatternGraph] = {}
    for base in all_graphs(n - 1):
        new = n - 1
        for r in range(n):
            for nbrs in itertools.combinations(range(new), r):
                edges = base.edges + tuple((u, new) for u in nbrs)
                key = canonical_form(n, tuple(sorted(edges)))
                if key not in seen:
                    seen[key] = PatternGraph(n, edges)
    return tuple(sorted(seen.values(), key=lambda p: (len(p.edges), p.canonical)))


def graphs_up_to(n: int) -> tuple[PatternGraph, ...]:
    return tuple(p for j in range(1, n + 1) for p in all_graphs(j))


def _check_pattern(f: PatternGraph, p_max: int) -> None:
    if f.n > p_max:
        raise BudgetExceeded(f"pattern with {f.n} nodes exceeds p_max={p_max}")


def embedding_sets(f, h) -> list[tuple[int, ...]]:
    """Node subsets of h inducing a copy of f."""
    f = f if isinstance(f, PatternGraph) else PatternGraph.from_graph(f)
    h = _as_graph(h)
    key, ne = f.canonical, len(f.edges)
    out = []
    for combo in itertools.combinations(range(h.n), f.n):
        cs = set(combo)
        inner = [(u, v) for u, v in h.edges if u in cs and v in cs]
        if len(inner) != ne:
            continue
        pos = {u: i for i, u in enumerate(combo)}
        if canonical_form(f.n, tuple((pos[u], pos[v]) for u, v in inner)) == key:
            out.append(combo)
    return out


def ind_count(f, h, *, p_max: int = DEFAULT_P_MAX) -> int:
    """Ind(F, H): number of node subsets of H whose induced subgraph is F."""
    f = f if isinstance(f, PatternGraph) else PatternGraph.from_graph(f)
    _check_pattern(f, p_max)
    return len(embedding_sets(f, h))


def connected_induced_subgraphs(h, size_max: int, *, budget: int | None = None) -> Iterator[tuple[int, ...]]:
    """Every connected induced subgraph on 1..size_max nodes, exactly once.

    Extension with an exclusive-neighborhood set: subgraphs are grown from
    their smallest node ``v``, only ever adding nodes larger than ``v`` that
    are neighbors of the newest node but not of the earlier ones.
    """
    h = _as_graph(h)
    if size_max < 0:
        raise ConfigError("size_max must be >= 0")
    if budget is not None and size_max > budget:
        raise BudgetExceeded(f"size_max {size_max} exceeds budget {budget}")
    adj = h.adjacency

    def extend(sub: list[int], closed: set[int], ext: list[int], root: int):
        yield tuple(sorted(sub))
        if len(sub) == size_max:
            return
        ext = list(ext)
        while ext:
            w = ext.pop(0)
            fresh = [u for u in adj[w] if u > root and u not in closed]
            new_closed = closed | set(adj[w])
            yield from extend(sub + [w], new_closed, ext + fresh, root)

    if size_max == 0:
        return
    for v in range(h.n):
        start_ext = [u for u in adj[v] if u > v]
        yield from extend([v], {v} | set(adj[v]), start_ext, v)


def connected_subsets_bruteforce(h, size_max: int) -> list[tuple[int, ...]]:
    """Filter every subset for connectivity (reference for the enumerator)."""
    h = _as_graph(h)
    out = []
    for k in range(1, size_max + 1):
        for combo in itertools.combinations(range(h.n), k):
            if h.induced(combo).is_connected():
                out.append(combo)
    return out


def graph_union(h1, h2) -> Graph:
    h1, h2 = _as_graph(h1), _as_graph(h2)
    return Graph(h1.n + h2.n, h1.edges + tuple((u + h1.n, v + h1.n) for u, v in h2.edges))


def ind_sum_additivity_check(f, h1, h2) -> bool:
    """Ind(F, H1 + H2) = Ind(F, H1) + Ind(F, H2); only claimed for connected F."""
    f = f if isinstance(f, PatternGraph) else PatternGraph.from_graph(f)
    if not f.is_connected():
        raise ConfigError("additivity over disjoint unions requires a connected pattern")
    return ind_count(f, graph_union(h1, h2)) == ind_count(f, h1) + ind_count(f, h2)


def spanning_tuple_count(f_list: Sequence[PatternGraph], F: PatternGraph) -> int:
    """Ordered tuples (X_1..X_m) of copies of f_1..f_m in F whose union is V(F)."""
    full = (1 << F.n) - 1
    dp = {0: 1}
    for f in f_list:
        masks = [sum(1 << u for u in s) for s in embedding_sets(f, F)]
        if not masks:
            return 0
        new: dict[int, int] = defaultdict(int)
        for mask, cnt in dp.items():
            for x in masks:
                new[mask | x] += cnt
        dp = new
    return dp.get(full, 0)


def ind_product_decompose(
    f_list: Sequence, h=None, *, p_max: int = DEFAULT_P_MAX
) -> dict[PatternGraph, int]:
    """Multipliers alpha(F) with prod_l Ind(f_l, H) = sum_F alpha(F) Ind(F, H).

    alpha(F) counts tuples of copies of the f_l inside F that together cover
    F, so it depends on the patterns only.  When ``h`` is given the identity
    is checked on it.
    """
    pats = [f if isinstance(f, PatternGraph) else PatternGraph.from_graph(f) for f in f_list]
    t = sum(f.n for f in pats)
    if t > p_max:
        raise BudgetExceeded(f"patterns span up to {t} nodes, above p_max={p_max}")
    lo = max((f.n for f in pats), default=0)
    alpha = {}
    for j in range(max(lo, 1), t + 1):
        for F in all_graphs(j):
            a = spanning_tuple_count(pats, F)
            if a:
                alpha[F] = a
    if h is not None:
        lhs = math.prod(ind_count(f, h, p_max=p_max) for f in pats)
        rhs = sum(a * ind_count(F, h, p_max=p_max) for F, a in alpha.items())
        if lhs != rhs:
            raise AssertionError(f"product decomposition fails on host: {lhs} != {rhs}")
    return alpha


@dataclass(frozen=True)
class BetaTable:
    """beta_{H,k} for every pattern H on <= k nodes, at fugacity ``lam``."""

    k: int
    lam: Fraction
    entries: dict[PatternGraph, Fraction]

    def evaluate(self, h) -> Fraction:
        """sum_H beta_{H,k} Ind(H, h)."""
        return sum((b * ind_count(H, h) for H, b in self.entries.items() if b), Fraction(0))

    def disconnected_nonzero(self) -> list[PatternGraph]:
        return [H for H, b in self.entries.items() if b and not H.is_connected()]

    def connected(self) -> dict[PatternGraph, Fraction]:
        return {H: b for H, b in self.entries.items() if H.is_connected()}


def default_beta_panel() -> list[Graph]:
    from .models import complete, cycle, path, regular_tree

    return [
        path(3), path(5), cycle(4), cycle(5), complete(4), regular_tree(3, 1),
        graph_union(path(2), path(3)), Graph(4, ((0, 1), (1, 2), (2, 0), (2, 3))),
    ]


@lru_cache(maxsize=None)
def _beta_entries(k: int, lam: Fraction) -> tuple[tuple[PatternGraph, Fraction], ...]:
    acc: dict[PatternGraph, Fraction] = {H: Fraction(0) for H in graphs_up_to(k)}
    for ms in compositions(k):
        f_list = [independent_pattern(j) for j, mj in enumerate(ms, start=1) for _ in range(mj)]
        coeff = girard_coefficient(ms) * lam ** k
        for F, a in ind_product_decompose(f_list, p_max=max(k, 1)).items():
            acc[F] += coeff * a
    return tuple(acc.items())


def beta_table_type1(k: int, lam=1, *, panel: Iterable | None = None, verify: bool = True,
                     k_max: int = 4) -> BetaTable:
    """Coefficients of Roots(Z(G(z)), k) in the basis Ind(H, G), hard-core Type I.

    Expands the Girard sum over compositions of k, with c_j = lam^j Ind(I_j, G)
    (I_j the edgeless pattern on j nodes), through ``ind_product_decompose``.
    With ``verify`` the table is checked against the Newton power sums of
    each panel graph, and every disconnected pattern must have coefficient 0.
    """
    from .models import build_hardcore
    from .poly import type1_polynomial

    if not 1 <= k <= k_max:
        raise BudgetExceeded(f"beta tables are built for 1 <= k <= {k_max}, got {k}")
    lam = Fraction(lam)
    table = BetaTable(k, lam, dict(_beta_entries(k, lam)))
    if verify:
        bad = table.disconnected_nonzero()
        if bad:
            raise AssertionError(f"nonzero beta on disconnected patterns: {[b.label() for b in bad]}")
        for h in (default_beta_panel() if panel is None else panel):
            h = _as_graph(h)
            want = power_sums_newton(type1_polynomial(build_hardcore(h, lam)), k)[k]
            got = table.evaluate(h)
            if want != got:
                raise AssertionError(f"beta expansion {got} != Newton power sum {want} on {h}")
    return table


def connected_pattern_counts(h, size_max: int) -> Counter:
    """Ind(H, h) for every connected H on <= size_max nodes, keyed by canonical bytes."""
    h = _as_graph(h)
    counts: Counter = Counter()
    for sub in connected_induced_subgraphs(h, size_max):
        g = h.induced(sub)
        counts[canonical_form(g.n, g.edges)] += 1
    return counts


def independent_counts_from_connected(h, k_max: int) -> list[int]:
    """i_0..i_{k_max} from connected-subgraph counts alone (k_max <= 4).

    r_k = sum over connected H of beta_{H,k} Ind(H, h); the Newton recursion
    then recovers c_k = i_k.
    """
    h = _as_graph(h)
    if k_max > 4:
        raise BudgetExceeded("connected-subgraph path supports k_max <= 4")
    counts = connected_pattern_counts(h, max(k_max, 1))
    r = [Fraction(0)]
    for k in range(1, k_max + 1):
        conn = beta_table_type1(k, 1, verify=False).connected()
        r.append(sum((b * counts.get(H.canonical, 0) for H, b in conn.items()), Fraction(0)))
    c = [Fraction(1)]
    for k in range(1, k_max + 1):
        c.append(-sum((c[i] * r[k - i] for i in range(k)), Fraction(0)) / k)
    if any(x.denominator != 1 for x in c):
        raise AssertionError(f"non-integral independent-set counts {c}")
    return [int(x) for x in c]
