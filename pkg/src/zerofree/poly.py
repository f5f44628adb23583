"""Interpolation polynomials Z(G(z)) with exact rational coefficients.

Type I (hard-core only): the fugacity is scaled by z, so the coefficient of
z^k collects colorings with exactly k occupied nodes.

Type II (any decoration): every edge matrix becomes J + (A - J) z, with J the
all-ones matrix; node weights are untouched, so Z(G(0)) = prod_u sum_i a^u_i.
"""
from __future__ import annotations

import enum
import itertools
from math import comb
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, ConfigError
from .exact import check_budget, weighted_histogram, weighted_sum, weighted_sums
from .graph_core import DecoratedGraph

ZERO, ONE = Fraction(0), Fraction(1)


class InterpolationKind(enum.Enum):
    TYPE_I = "type1"
    TYPE_II = "type2"

    @classmethod
    def parse(cls, value) -> "InterpolationKind":
        if isinstance(value, cls):
            return value
        v = str(value).lower().replace("_", "").replace("-", "")
        aliases = {"type1": cls.TYPE_I, "typei": cls.TYPE_I, "i": cls.TYPE_I, "1": cls.TYPE_I,
                   "type2": cls.TYPE_II, "typeii": cls.TYPE_II, "ii": cls.TYPE_II, "2": cls.TYPE_II}
        try:
            return aliases[v]
        except KeyError:
            raise ConfigError(f"unknown interpolation kind {value!r}") from None


@dataclass(frozen=True)
class RationalPolynomial:
    """c_0 + c_1 z + ... + c_n z^n; trailing zeros trimmed, c_0 always kept."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs] or [ZERO]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def of(cls, *coeffs) -> "RationalPolynomial":
        return cls(tuple(Fraction(c) for c in coeffs))

    @property
    def degree(self) -> int:
        """Highest nonzero index; -1 for the zero polynomial."""
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    def is_zero(self) -> bool:
        return self.degree == -1

    def valuation(self) -> int:
        """Index of the lowest nonzero coefficient."""
        if self.is_zero():
            raise ValueError("zero polynomial has no valuation")
        return next(i for i, c in enumerate(self.coeffs) if c != 0)

    def shift_down(self, v: int) -> "RationalPolynomial":
        """p(z) / z^v; the low coefficients must vanish."""
        if any(c != 0 for c in self.coeffs[:v]):
            raise ValueError(f"polynomial not divisible by z^{v}")
        return RationalPolynomial(self.coeffs[v:])

    def __mul__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPolynomial(tuple(out))

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return RationalPolynomial(tuple(self[i] + other[i] for i in range(n)))

    def scale(self, c) -> "RationalPolynomial":
        return RationalPolynomial(tuple(Fraction(c) * x for x in self.coeffs))

    def __call__(self, z) -> Fraction:
        return evaluate(self, z)


def evaluate(p: RationalPolynomial, z) -> Fraction:
    """Horner evaluation, exact for rational z."""
    acc = ZERO
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def lagrange_interpolate(xs: Sequence, ys: Sequence) -> RationalPolynomial:
    """Unique polynomial of degree < len(xs) through the points, exactly."""
    xs = [Fraction(x) for x in xs]
    ys = [Fraction(y) for y in ys]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    # master product prod (z - x_j), then synthetic division per node
    master = [ONE]
    for x in xs:
        nxt = [ZERO] * (len(master) + 1)
        for i, c in enumerate(master):
            nxt[i + 1] += c
            nxt[i] -= c * x
        master = nxt
    total = [ZERO] * len(xs)
    for xi, yi in zip(xs, ys):
        if yi == 0:
            continue
        # quotient of master by (z - xi)
        q = [ZERO] * len(xs)
        carry = ZERO
        for i in range(len(master) - 1, 0, -1):
            carry = master[i] + carry * xi
            q[i - 1] = carry
        denom = ONE
        for xj in xs:
            if xj != xi:
                denom *= xi - xj
        scale = yi / denom
        for i, c in enumerate(q):
            total[i] += scale * c
    return RationalPolynomial(tuple(total))


def normalizer(g: DecoratedGraph) -> Fraction:
    """L(G) = prod_u sum_i a^u_i, the Type II value at z = 0."""
    out = ONE
    for a in g.node_weights:
        out *= sum(a, ZERO)
    return out


_HARDCORE = ((1, 1), (1, 0))
_MASKED_HARDCORE = {
    tuple(tuple(_HARDCORE[i][j] * r[i] * c[j] for j in range(2)) for i in range(2))
    for r in itertools.product((0, 1), repeat=2)
    for c in itertools.product((0, 1), repeat=2)
}


def is_hardcore_shaped(g: DecoratedGraph) -> bool:
    """K = 2 and every edge matrix is the hard-core matrix with some rows and
    columns zeroed, i.e. a hard-core decoration possibly pinned by ``reduce``."""
    if g.K != 2:
        return False
    return all(m in _MASKED_HARDCORE for m in g.edge_weights)


def type1_polynomial(g: DecoratedGraph, *, budget: int | None = None) -> RationalPolynomial:
    """sum_phi w(phi) z^{#occupied(phi)} for a hard-core decoration.

    For an unpinned hard-core graph with fugacity lambda this is
    sum_k i_k(G) lambda^k z^k.
    """
    if not is_hardcore_shaped(g):
        raise ConfigError("Type I interpolation needs a hard-core decoration")
    cs = weighted_histogram(
        g.n, 2, g.edges, g.node_weights, g.edge_weights,
        lambda phi: phi.sum(axis=1), g.n + 1, budget,
    )
    return RationalPolynomial(tuple(cs))


def _lin(x: Fraction, z: Fraction):
    # 1 + (x - 1) z, kept as a plain int when possible (hot path)
    if x.denominator == 1 and z.denominator == 1:
        return 1 + (x.numerator - 1) * z.numerator
    return ONE + (x - ONE) * z


def _type2_edges(g: DecoratedGraph, z: Fraction):
    return [tuple(tuple(_lin(x, z) for x in row) for row in m) for m in g.edge_weights]


def type2_value(g: DecoratedGraph, z, *, budget: int | None = None) -> Fraction:
    """Z(G(z)) for Type II at one rational point."""
    z = Fraction(z)
    return weighted_sum(g.n, g.K, g.edges, g.node_weights, _type2_edges(g, z), budget)


def type2_polynomial(g: DecoratedGraph, *, budget: int | None = None) -> RationalPolynomial:
    """Z(G(z)) for Type II, from |E| + 1 point evaluations and exact Lagrange."""
    check_budget(g.K, g.n, budget)
    xs = [Fraction(x) for x in range(len(g.edges) + 1)]
    ys = weighted_sums(g.n, g.K, g.edges, g.node_weights, [_type2_edges(g, x) for x in xs], budget)
    return lagrange_interpolate(xs, ys)


def type2_polynomial_subsets(g: DecoratedGraph, *, budget: int | None = None,
                             max_edges: int = 16) -> RationalPolynomial:
    """Type II polynomial by expanding prod_e (1 + z (A_e - 1)) over edge subsets.

    Exponential in |E|; meant as an independent check of ``type2_polynomial``.
    """
    m = len(g.edges)
    if m > max_edges:
        raise BudgetExceeded(f"edge-subset expansion over {m} edges exceeds limit {max_edges}")
    check_budget(g.K, g.n, budget)
    shifted = [tuple(tuple(x - ONE for x in row) for row in mat) for mat in g.edge_weights]
    coeffs = [ZERO] * (m + 1)
    for size in range(m + 1):
        for subset in itertools.combinations(range(m), size):
            coeffs[size] += _subset_sum(g, subset, shifted)
    return RationalPolynomial(tuple(coeffs))


def _subset_sum(g: DecoratedGraph, subset, shifted) -> Fraction:
    """sum_phi prod_u a^u prod_{e in subset} (A_e - 1); nodes off the subset factor out."""
    touched = sorted({u for i in subset for u in g.edges[i]})
    pos = {u: i for i, u in enumerate(touched)}
    free = ONE
    for u in range(g.n):
        if u not in pos:
            free *= sum(g.node_weights[u], ZERO)
    if not touched:
        return free
    edges = [(pos[g.edges[i][0]], pos[g.edges[i][1]]) for i in subset]
    inner = weighted_sum(
        len(touched), g.K, edges, [g.node_weights[u] for u in touched],
        [shifted[i] for i in subset],
    )
    return free * inner


def interpolation_polynomial(g: DecoratedGraph, kind, *, budget: int | None = None) -> RationalPolynomial:
    kind = InterpolationKind.parse(kind)
    if kind is InterpolationKind.TYPE_I:
        return type1_polynomial(g, budget=budget)
    return type2_polynomial(g, budget=budget)


# -- independent-set counts ----------------------------------------------

def _independent_subsets(graph, k: int) -> int:
    adj = graph.adjacency
    return sum(
        1
        for combo in itertools.combinations(range(graph.n), k)
        if all(w not in combo for u in combo for w in adj[u] if w > u)
    )


def i_k_counts(g, k_max: int | None = None, *, method: str = "subsets",
               budget: int | None = None) -> list[int]:
    """Number of independent sets of each size 0..k_max.

    ``method="subsets"`` filters every k-subset.  ``method="connected"``
    counts connected induced subgraphs only, converts them into power sums
    through the Type I cluster coefficients, then inverts the Newton
    recursion (k_max <= 4).
    """
    graph = g.graph if isinstance(g, DecoratedGraph) else g
    k_max = graph.n if k_max is None else k_max
    if method == "subsets":
        budget = (1 << 24) if budget is None else budget
        work = sum(comb(graph.n, k) for k in range(min(k_max, graph.n) + 1))
        if work > budget:
            raise BudgetExceeded(f"{work} subsets exceed budget {budget}")
        return [_independent_subsets(graph, k) if k <= graph.n else 0 for k in range(k_max + 1)]
    if method == "connected":
        from .subgraphs import independent_counts_from_connected

        return independent_counts_from_connected(graph, k_max)
    raise ConfigError(f"unknown method {method!r}")


def product_polynomial(polys: Iterable[RationalPolynomial]) -> RationalPolynomial:
    out = RationalPolynomial.of(1)
    for p in polys:
        out = out * p
    return out


def coefficients_as_array(p: RationalPolynomial) -> np.ndarray:
    """Float view of the coefficients (for root-finding cross-checks only)."""
    return np.array([float(c) for c in p.coeffs])
