"""Exact partition functions, Gibbs marginals and the R-range sensitivity.

Two evaluators compute the same sum of ``w(phi)`` over all K^n colorings.

* Enumeration visits colorings as a mixed-radix counter (node 0 is the
  fastest digit) in chunks, each evaluated with numpy on integers obtained
  by clearing the denominators of every weight vector and matrix.  It is the
  reference path and the only one that can split the sum by a key.
* Variable elimination contracts the factor graph node by node in a
  min-degree order with object-dtype (Python int) tensors.  Cost grows with
  K^(width + 1) instead of K^n; the result is identical.

The budget always bounds K^n, whichever evaluator runs.
"""
from __future__ import annotations

import functools
import itertools
import math
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, ConfigError, GibbsUndefined, InfeasibleCondition
from .graph_core import ColorAssignment, DecoratedGraph, NodeSet, boundary, node_set, reduce

DEFAULT_BUDGET = 1 << 24
DEFAULT_TAU_BUDGET = 1 << 12
DEFAULT_TAU_SAMPLES = 256
_CHUNK = 1 << 16
_INT64_SAFE = 1 << 62


def default_budget() -> int:
    env = os.environ.get("ZF_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def check_budget(K: int, n: int, budget: int | None) -> None:
    budget = default_budget() if budget is None else budget
    if K ** n > budget:
        raise BudgetExceeded(f"enumeration of {K}^{n} colorings exceeds budget {budget}")


def _clear_denominators(values: Sequence) -> tuple[list[int], int]:
    """Integers ``x * d`` and the common denominator ``d`` (ints or Fractions in)."""
    d = math.lcm(*(x.denominator for x in values)) if values else 1
    if d == 1:
        return [x.numerator for x in values], 1
    return [x.numerator * (d // x.denominator) for x in values], d


@dataclass
class _Tables:
    node: list[np.ndarray]
    edge: list[np.ndarray]
    denom: int
    dtype: object


def _tables(K, node_w, edge_w) -> _Tables:
    denom = 1
    bound = 1
    node_ints, edge_ints = [], []
    for a in node_w:
        ints, d = _clear_denominators(a)
        denom *= d
        bound *= max((abs(x) for x in ints), default=0)
        node_ints.append(ints)
    for m in edge_w:
        ints, d = _clear_denominators([x for row in m for x in row])
        denom *= d
        bound *= max((abs(x) for x in ints), default=0)
        edge_ints.append(ints)
    dtype = np.int64 if bound * _CHUNK < _INT64_SAFE else object
    node = [np.array(a, dtype=dtype) for a in node_ints]
    edge = [np.array(m, dtype=dtype).reshape(K, K) for m in edge_ints]
    return _Tables(node, edge, denom, dtype)


def _chunks(n: int, K: int):
    total = K ** n
    powers = [K ** u for u in range(n)]
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        yield np.stack([(idx // p) % K for p in powers], axis=1) if n else idx[:, None][:, :0]


def _chunk_weights(phi: np.ndarray, edges, tabs: _Tables) -> np.ndarray:
    w = np.ones(phi.shape[0], dtype=tabs.dtype)
    for u, a in enumerate(tabs.node):
        w = w * a[phi[:, u]]
    for (u, v), m in zip(edges, tabs.edge):
        w = w * m[phi[:, u], phi[:, v]]
    return w


def weighted_sum_enumerate(n, K, edges, node_w, edge_w, budget=None) -> Fraction:
    """Sum of w(phi) over [K]^n by visiting every coloring (reference path)."""
    check_budget(K, n, budget)
    tabs = _tables(K, node_w, edge_w)
    total = 0
    for phi in _chunks(n, K):
        total += int(_chunk_weights(phi, edges, tabs).sum())
    return Fraction(total, tabs.denom)


def weighted_histogram(
    n, K, edges, node_w, edge_w, key: Callable[[np.ndarray], np.ndarray], nkeys: int, budget=None
) -> list[Fraction]:
    """Like ``weighted_sum`` but split by ``key(phi_chunk)`` in ``range(nkeys)``."""
    check_budget(K, n, budget)
    tabs = _tables(K, node_w, edge_w)
    totals = [0] * nkeys
    for phi in _chunks(n, K):
        w = _chunk_weights(phi, edges, tabs)
        acc = np.zeros(nkeys, dtype=tabs.dtype)
        np.add.at(acc, key(phi), w)
        for i in range(nkeys):
            totals[i] += int(acc[i])
    return [Fraction(t, tabs.denom) for t in totals]


@functools.lru_cache(maxsize=256)
def elimination_order(n: int, edges: tuple[tuple[int, int], ...]) -> tuple[int, ...]:
    """Greedy min-degree order; ties broken by node id, so it is deterministic."""
    adj = {u: set() for u in range(n)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    order = []
    while adj:
        u = min(adj, key=lambda x: (len(adj[x]), x))
        nbrs = adj.pop(u)
        for a in nbrs:
            adj[a].discard(u)
            adj[a] |= nbrs - {a}
        order.append(u)
    return tuple(order)


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _contract(factors, keep, var=None):
    """einsum over ``factors`` summing out ``var``; result indexed by ``keep``."""
    names = {}
    for vs, _ in factors:
        for x in vs:
            names.setdefault(x, _LETTERS[len(names)])
    if len(names) > len(_LETTERS):
        raise BudgetExceeded("elimination width too large")
    spec = ",".join("".join(names[x] for x in vs) for vs, _ in factors)
    spec += "->" + "".join(names[x] for x in keep)
    return np.einsum(spec, *(arr for _, arr in factors))


def weighted_sum(n, K, edges, node_w, edge_w, budget=None) -> Fraction:
    """Sum of w(phi) over [K]^n for raw (possibly negative) weights.

    Evaluated by variable elimination; equals ``weighted_sum_enumerate``.
    """
    check_budget(K, n, budget)
    denom = 1
    factors = []
    for u, a in enumerate(node_w):
        ints, d = _clear_denominators(a)
        denom *= d
        factors.append(((u,), np.array(ints, dtype=object)))
    for (u, v), m in zip(edges, edge_w):
        ints, d = _clear_denominators([x for row in m for x in row])
        denom *= d
        factors.append(((u, v), np.array(ints, dtype=object).reshape(K, K)))
    for var in elimination_order(n, tuple(edges)):
        hit = [f for f in factors if var in f[0]]
        factors = [f for f in factors if var not in f[0]]
        keep = tuple(sorted({x for vs, _ in hit for x in vs} - {var}))
        factors.append((keep, _contract(hit, keep)))
    total = 1
    for _, arr in factors:
        total *= int(np.asarray(arr, dtype=object).reshape(()))
    return Fraction(total, denom)


def weighted_sums(n, K, edges, node_w, edge_w_sets, budget=None) -> list[Fraction]:
    """``weighted_sum`` for several edge-weight sets on one node decoration."""
    return [weighted_sum(n, K, edges, node_w, ew, budget) for ew in edge_w_sets]


def partition_exact(g: DecoratedGraph, budget: int | None = None) -> Fraction:
    """Z(G): sum over all phi: V -> [K] of the product of node and edge weights."""
    return weighted_sum(g.n, g.K, g.edges, g.node_weights, g.edge_weights, budget)


def weight(g: DecoratedGraph, phi: Sequence[int]) -> Fraction:
    """w(phi) for a full coloring given with 1-based colors."""
    if len(phi) != g.n:
        raise ConfigError(f"coloring has {len(phi)} entries, graph has {g.n} nodes")
    w = Fraction(1)
    for u, c in enumerate(phi):
        w *= g.node_weights[u][c - 1]
    for (u, v), m in zip(g.edges, g.edge_weights):
        w *= m[phi[u] - 1][phi[v] - 1]
    return w


def _assignment(S, sigma) -> ColorAssignment:
    if sigma is None:
        return ColorAssignment.of(S)
    return ColorAssignment.from_lists(S, sigma)


@dataclass(frozen=True)
class MarginalTable:
    """Gibbs marginal of the node set ``S``: colors of S (1-based) -> probability."""

    S: NodeSet
    table: dict[tuple[int, ...], Fraction]

    def __getitem__(self, colors) -> Fraction:
        return self.table[tuple(colors)]

    def total(self) -> Fraction:
        return sum(self.table.values(), Fraction(0))


def _s_weights(g: DecoratedGraph, S: NodeSet, budget) -> list[Fraction]:
    """Unnormalized weight of each coloring of S (mixed radix, S[0] fastest)."""
    powers = np.array([g.K ** i for i in range(len(S))], dtype=np.int64)
    cols = list(S)

    def key(phi):
        if not cols:
            return np.zeros(phi.shape[0], dtype=np.int64)
        return phi[:, cols] @ powers

    return weighted_histogram(
        g.n, g.K, g.edges, g.node_weights, g.edge_weights, key, g.K ** len(S), budget
    )


def _s_colorings(K: int, size: int):
    """Colorings of an ordered node list in the same mixed-radix order."""
    for combo in itertools.product(range(1, K + 1), repeat=size):
        yield combo[::-1]


def marginal_table(g: DecoratedGraph, S: Iterable[int], budget: int | None = None) -> MarginalTable:
    S = node_set(S, g.n)
    ws = _s_weights(g, S, budget)
    Z = sum(ws, Fraction(0))
    if Z == 0:
        raise GibbsUndefined("Gibbs measure undefined: Z(G) = 0")
    return MarginalTable(S, {c: w / Z for c, w in zip(_s_colorings(g.K, len(S)), ws)})


def marginal(g: DecoratedGraph, S, sigma=None, *, budget: int | None = None, check: bool = True) -> Fraction:
    """mu(G, S, sigma) as Z(G_{S,sigma}) / Z(G).

    With ``check`` the value is also obtained by directly summing the weights
    of colorings that agree with sigma, and the two must coincide.
    """
    assign = _assignment(S, sigma)
    assign.validate(g)
    Z = partition_exact(g, budget)
    if Z == 0:
        raise GibbsUndefined("Gibbs measure undefined: Z(G) = 0")
    value = partition_exact(reduce(g, assign), budget) / Z
    if check:
        dom = assign.domain
        ws = _s_weights(g, dom, budget)
        target = tuple(c for _, c in assign.items)
        direct = dict(zip(_s_colorings(g.K, len(dom)), ws))[target] / Z
        if direct != value:
            raise AssertionError(
                f"self-reducibility violated: direct {direct} != ratio {value} for {assign.items}"
            )
    return value


def conditional_marginal(g: DecoratedGraph, S, sigma, T, tau, *, budget: int | None = None) -> Fraction:
    """mu(G, S, sigma | T, tau) = Z(G_{S u T, sigma u tau}) / Z(G_{T, tau}).

    Returns 0 when sigma and tau disagree on S n T.
    """
    s_assign, t_assign = _assignment(S, sigma), _assignment(T, tau)
    s_assign.validate(g)
    t_assign.validate(g)
    if partition_exact(g, budget) == 0:
        raise GibbsUndefined("Gibbs measure undefined: Z(G) = 0")
    z_t = partition_exact(reduce(g, t_assign), budget)
    if z_t == 0:
        raise InfeasibleCondition("conditioning event has probability zero")
    td = t_assign.as_dict()
    if any(td.get(u, c) != c for u, c in s_assign.items):
        return Fraction(0)
    return partition_exact(reduce(g, s_assign.union(t_assign)), budget) / z_t


@dataclass(frozen=True)
class RhoResult:
    value: Fraction
    R: int
    boundary: NodeSet
    exact: bool          # False: sampled boundary conditions, value is a lower bound
    tau_total: int       # boundary conditions examined
    tau_feasible: int

    @property
    def label(self) -> str:
        return "exact" if self.exact else "lower_bound"


def boundary_conditions(
    K: int,
    T: NodeSet,
    *,
    tau_budget: int = DEFAULT_TAU_BUDGET,
    samples: int = DEFAULT_TAU_SAMPLES,
    seed: int | None = None,
) -> tuple[list[ColorAssignment], bool]:
    """All colorings of T when K^|T| <= tau_budget, else a seeded sample.

    Returns ``(assignments, exhaustive)``.
    """
    total = K ** len(T)
    if total <= tau_budget:
        return [ColorAssignment(tuple(zip(T, c))) for c in itertools.product(range(1, K + 1), repeat=len(T))], True
    if seed is None:
        raise ConfigError(
            f"{total} boundary conditions exceed tau budget {tau_budget}; a seed is required for sampling"
        )
    rng = random.Random(seed)
    out = [ColorAssignment(tuple((u, rng.randint(1, K)) for u in T)) for _ in range(samples)]
    return out, False


def rho_R(
    g: DecoratedGraph,
    S: Iterable[int],
    R: int,
    *,
    budget: int | None = None,
    tau_budget: int = DEFAULT_TAU_BUDGET,
    samples: int = DEFAULT_TAU_SAMPLES,
    seed: int | None = None,
) -> RhoResult:
    """Largest change of the marginal on S over pairs of boundary conditions at distance R.

    Boundary conditions of probability zero are skipped.  Computed per sigma
    as max - min over the feasible taus, then maximized over sigma.
    """
    S = node_set(S, g.n)
    if partition_exact(g, budget) == 0:
        raise GibbsUndefined("Gibbs measure undefined: Z(G) = 0")
    T = boundary(g, S, R)
    if not T:
        return RhoResult(Fraction(0), R, T, True, 0, 0)
    taus, exhaustive = boundary_conditions(g.K, T, tau_budget=tau_budget, samples=samples, seed=seed)
    hi: list[Fraction | None] = [None] * g.K ** len(S)
    lo: list[Fraction | None] = [None] * g.K ** len(S)
    feasible = 0
    for tau in taus:
        ws = _s_weights(reduce(g, tau), S, budget)
        z_t = sum(ws, Fraction(0))
        if z_t == 0:
            continue
        feasible += 1
        for i, w in enumerate(ws):
            mu = w / z_t
            hi[i] = mu if hi[i] is None or mu > hi[i] else hi[i]
            lo[i] = mu if lo[i] is None or mu < lo[i] else lo[i]
    if not feasible:
        raise InfeasibleCondition("all boundary conditions infeasible")
    value = max(h - l for h, l in zip(hi, lo))
    return RhoResult(value, R, T, exhaustive, len(taus), feasible)
