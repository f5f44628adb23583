import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from zerofree.errors import BudgetExceeded, ConfigError
from zerofree.exact import partition_exact
from zerofree.graph_core import DecoratedGraph, Graph, disjoint_union
from zerofree.models import (
    build_hardcore,
    build_ising,
    build_proper_coloring,
    complete,
    cycle,
    edgeless,
    erdos_renyi,
    path,
)
from zerofree.poly import (
    InterpolationKind,
    RationalPolynomial,
    evaluate,
    i_k_counts,
    interpolation_polynomial,
    lagrange_interpolate,
    normalizer,
    type1_polynomial,
    type2_polynomial,
    type2_polynomial_subsets,
)

from conftest import naive_independent_sets, random_decorated

P = RationalPolynomial.of


def test_polynomial_trims_and_keeps_c0():
    assert P(1, 2, 0, 0).coeffs == (1, 2)
    assert P(0, 0).coeffs == (0,) and P(0).degree == -1
    assert P(0, 3).valuation() == 1


def test_evaluate_examples():
    assert evaluate(P(1, 2), 1) == 3
    assert evaluate(P(1, 2), 0) == 1
    assert evaluate(type1_polynomial(build_hardcore(cycle(4), 1)), 1) == 7


def test_type1_examples():
    assert type1_polynomial(build_hardcore(Graph(1), 2)) == P(1, 2)
    assert type1_polynomial(build_hardcore(cycle(4), 1)) == P(1, 4, 2)
    assert type1_polynomial(build_hardcore(complete(3), Fraction(1, 2))) == P(1, Fraction(3, 2))


def test_type1_rejects_other_models():
    with pytest.raises(ConfigError):
        type1_polynomial(build_proper_coloring(path(2), 2))
    with pytest.raises(ConfigError):
        type1_polynomial(build_ising(path(2), 1, 2))


def test_type2_examples():
    g = build_proper_coloring(edgeless(3), 2)
    assert type2_polynomial(g) == P(8)
    e = build_proper_coloring(path(2), 2)
    assert type2_polynomial(e) == P(4, -2)
    k3 = type2_polynomial(build_proper_coloring(complete(3), 3))
    assert k3(1) == 6 and k3(0) == 27


def test_kind_parsing():
    assert InterpolationKind.parse("TypeII") is InterpolationKind.TYPE_II
    assert InterpolationKind.parse("type1") is InterpolationKind.TYPE_I
    with pytest.raises(ConfigError):
        InterpolationKind.parse("type3")


def test_lagrange_recovers_polynomial():
    p = P(3, Fraction(-1, 2), 0, 7)
    xs = [Fraction(x, 3) for x in range(4)]
    assert lagrange_interpolate(xs, [p(x) for x in xs]) == p
    with pytest.raises(ValueError):
        lagrange_interpolate([1, 1], [2, 3])


def test_i_k_examples():
    assert i_k_counts(complete(3), 3) == [1, 3, 0, 0]
    assert i_k_counts(cycle(4), 4) == [1, 4, 2, 0, 0]
    assert i_k_counts(path(2), 2) == [1, 2, 0]
    with pytest.raises(BudgetExceeded):
        i_k_counts(path(30), budget=100)


def test_i_k_paths_agree():
    rng = random.Random(12)
    for _ in range(20):
        g = erdos_renyi(rng.randint(1, 10), 0.3, rng)
        oracle = naive_independent_sets(g)[:5] + [0] * max(0, 5 - g.n - 1)
        assert i_k_counts(g, 4) == oracle
        assert i_k_counts(g, 4, method="connected") == oracle


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_endpoints_both_kinds(seed):
    rng = random.Random(seed)
    g = random_decorated(rng, n_max=6)
    p2 = type2_polynomial(g)
    assert p2(1) == partition_exact(g)
    assert p2(0) == normalizer(g)
    assert p2.degree <= len(g.edges)
    h = build_hardcore(g.graph, Fraction(rng.randint(0, 5), rng.randint(1, 3)))
    p1 = type1_polynomial(h)
    assert p1(1) == partition_exact(h) and p1(0) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_type2_lagrange_matches_edge_subsets(seed):
    g = random_decorated(random.Random(seed), n_max=6, p=0.5)
    assert type2_polynomial(g) == type2_polynomial_subsets(g)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["type1", "type2"]))
def test_union_polynomial_is_product(seed, kind):
    rng = random.Random(seed)
    if kind == "type1":
        lam = Fraction(rng.randint(1, 4), rng.randint(1, 3))
        g1 = build_hardcore(erdos_renyi(rng.randint(1, 4), 0.5, rng), lam)
        g2 = build_hardcore(erdos_renyi(rng.randint(1, 4), 0.5, rng), lam)
    else:
        g1 = random_decorated(rng, n_max=4, K=2)
        g2 = random_decorated(rng, n_max=4, K=2)
    pu = interpolation_polynomial(disjoint_union(g1, g2), kind)
    assert pu == interpolation_polynomial(g1, kind) * interpolation_polynomial(g2, kind)


def test_type1_coefficients_are_weighted_counts():
    lam = Fraction(2, 3)
    g = erdos_renyi(8, 0.3, random.Random(1))
    p = type1_polynomial(build_hardcore(g, lam))
    counts = naive_independent_sets(g)
    assert all(p[k] == counts[k] * lam ** k for k in range(g.n + 1))


def test_subset_oracle_limit():
    with pytest.raises(BudgetExceeded):
        type2_polynomial_subsets(build_proper_coloring(complete(7), 2))
