import itertools
import random
from fractions import Fraction

import pytest

from zerofree.graph_core import DecoratedGraph, Graph
from zerofree.models import erdos_renyi


def naive_Z(g: DecoratedGraph) -> Fraction:
    """Sum over all colorings with plain itertools; independent of the engine."""
    total = Fraction(0)
    for phi in itertools.product(range(g.K), repeat=g.n):
        w = Fraction(1)
        for u in range(g.n):
            w *= g.node_weights[u][phi[u]]
        for (u, v), m in zip(g.edges, g.edge_weights):
            w *= m[phi[u]][phi[v]]
        total += w
    return total


def naive_independent_sets(graph: Graph) -> list[int]:
    counts = [0] * (graph.n + 1)
    for mask in range(1 << graph.n):
        nodes = [u for u in range(graph.n) if mask >> u & 1]
        if all(not graph.has_edge(a, b) for a, b in itertools.combinations(nodes, 2)):
            counts[len(nodes)] += 1
    return counts


def random_rational(rng: random.Random, lo=0, hi=4, den=3) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_decorated(rng: random.Random, n_max=7, K_max=3, p=0.4, K=None) -> DecoratedGraph:
    n = rng.randint(1, n_max)
    K = K or rng.randint(1, K_max)
    g = erdos_renyi(n, p, rng)
    return DecoratedGraph(
        g, K,
        tuple(tuple(random_rational(rng) for _ in range(K)) for _ in range(n)),
        tuple(tuple(tuple(random_rational(rng) for _ in range(K)) for _ in range(K)) for _ in g.edges),
    )


@pytest.fixture
def rng():
    return random.Random(20240611)
