"""A quick invariant suite (a few seconds) behind ``zerofree selftest``."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from .exact import marginal, marginal_table, partition_exact, weighted_sum, weighted_sum_enumerate
from .graph_core import disjoint_union
from .models import (
    build_hardcore,
    build_proper_coloring,
    complete,
    cycle,
    edgeless,
    erdos_renyi,
    path,
    regular_tree,
)
from .poly import normalizer, type1_polynomial, type2_polynomial, type2_polynomial_subsets
from .pseudo import conditional_pseudo_marginal, min_radius, pseudo_marginal, theorem1_check
from .subgraphs import beta_table_type1, connected_induced_subgraphs, connected_subsets_bruteforce
from .taylor import power_sums_girard, power_sums_newton
from .poly import RationalPolynomial


def _random_decorated(rng: random.Random):
    from .graph_core import DecoratedGraph

    n, K = rng.randint(1, 5), rng.randint(1, 3)
    g = erdos_renyi(n, 0.5, rng)
    rat = lambda: Fraction(rng.randint(0, 4), rng.randint(1, 3))  # noqa: E731
    return DecoratedGraph(
        g, K,
        tuple(tuple(rat() for _ in range(K)) for _ in range(n)),
        tuple(tuple(tuple(rat() for _ in range(K)) for _ in range(K)) for _ in g.edges),
    )


def _factorization() -> bool:
    rng = random.Random(7)
    for _ in range(20):
        g1, g2 = _random_decorated(rng), _random_decorated(rng)
        if g1.K != g2.K:
            continue
        if partition_exact(disjoint_union(g1, g2)) != partition_exact(g1) * partition_exact(g2):
            return False
    return True


def _evaluators_agree() -> bool:
    rng = random.Random(11)
    for _ in range(20):
        g = _random_decorated(rng)
        args = (g.n, g.K, g.edges, g.node_weights, g.edge_weights)
        if weighted_sum(*args) != weighted_sum_enumerate(*args):
            return False
    return True


def _marginals() -> bool:
    g = build_hardcore(cycle(5), Fraction(1, 2))
    table = marginal_table(g, [0, 2])
    return table.total() == 1 and marginal(g, [0], [2]) == table[(2, 1)] + table[(2, 2)]


def _known_values() -> bool:
    return (
        partition_exact(build_hardcore(cycle(4), 1)) == 7
        and partition_exact(build_hardcore(complete(3), 1)) == 4
        and type1_polynomial(build_hardcore(cycle(4), 1)) == RationalPolynomial.of(1, 4, 2)
        and type2_polynomial(build_proper_coloring(path(2), 2)) == RationalPolynomial.of(4, -2)
    )


def _endpoints() -> bool:
    for gr in (path(5), cycle(5), regular_tree(3, 1), edgeless(3)):
        for g in (build_hardcore(gr, Fraction(2, 3)), build_proper_coloring(gr, 3)):
            p = type2_polynomial(g)
            if p(1) != partition_exact(g) or p(0) != normalizer(g) or p != type2_polynomial_subsets(g):
                return False
        h = build_hardcore(gr, Fraction(2, 3))
        if type1_polynomial(h)(1) != partition_exact(h) or type1_polynomial(h)(0) != 1:
            return False
    return True


def _power_sums() -> bool:
    rng = random.Random(3)
    for _ in range(20):
        p = RationalPolynomial.of(1, *(Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(6)))
        if power_sums_newton(p, 6) != power_sums_girard(p, 6):
            return False
    return True


def _connected_enumeration() -> bool:
    rng = random.Random(5)
    for _ in range(5):
        h = erdos_renyi(8, 0.35, rng)
        fast = sorted(connected_induced_subgraphs(h, 4))
        if fast != sorted(connected_subsets_bruteforce(h, 4)) or len(set(fast)) != len(fast):
            return False
    return True


def _beta() -> bool:
    return all(not beta_table_type1(k, Fraction(1, 2)).disconnected_nonzero() for k in (1, 2, 3))


def _pseudo_identities() -> bool:
    g = build_hardcore(path(5), 1)
    one = pseudo_marginal(g, [], None, "type1", 1, 3)
    a = pseudo_marginal(g, [1], [2], "type1", 1, 3)
    b = conditional_pseudo_marginal(g, [1], [2], [], None, "type1", 1, 3)
    c = conditional_pseudo_marginal(g, [1], [2], [1, 3], [2, 1], "type1", 1, 3)
    return one.is_exactly_one() and a.same_data(b) and c.is_exactly_one()


def _locality() -> bool:
    ok = True
    for kind, g in (("type1", build_hardcore(path(8), 1)), ("type2", build_proper_coloring(path(7), 3))):
        for m in (1, 2):
            ok &= theorem1_check(g, [0], [1], min_radius(kind, m), kind, m).holds
    probe = theorem1_check(build_hardcore(path(5), 1), [0], [2], 1, "type1", 3)
    return ok and not probe.holds and probe.witness is not None


CHECKS: list[tuple[str, Callable[[], bool]]] = [
    ("partition_factorizes_over_unions", _factorization),
    ("elimination_matches_enumeration", _evaluators_agree),
    ("marginals_sum_to_one", _marginals),
    ("known_partition_values", _known_values),
    ("polynomial_endpoints", _endpoints),
    ("newton_equals_girard", _power_sums),
    ("connected_enumeration_exact", _connected_enumeration),
    ("disconnected_beta_vanish", _beta),
    ("pseudo_marginal_identities", _pseudo_identities),
    ("boundary_independence", _locality),
]


def run_selftest() -> list[tuple[str, bool]]:
    out = []
    for name, fn in CHECKS:
        try:
            ok = bool(fn())
        except Exception:  # a crash counts as a failed check
            ok = False
        out.append((name, ok))
    return out
