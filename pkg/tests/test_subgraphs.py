import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from zerofree.errors import BudgetExceeded, ConfigError
from zerofree.graph_core import Graph
from zerofree.models import build_hardcore, complete, cycle, erdos_renyi, path, regular_tree
from zerofree.poly import type1_polynomial
from zerofree.subgraphs import (
    PatternGraph,
    all_graphs,
    beta_table_type1,
    canonical_form,
    connected_induced_subgraphs,
    connected_subsets_bruteforce,
    graph_union,
    ind_count,
    ind_product_decompose,
    ind_sum_additivity_check,
    independent_pattern,
)
from zerofree.taylor import power_sums_newton

DOT = PatternGraph(1)
K2 = PatternGraph(2, ((0, 1),))
P3 = PatternGraph(3, ((0, 1), (1, 2)))
TWO_DOTS = PatternGraph(2)


def _relabel(g: Graph, perm) -> Graph:
    return Graph(g.n, tuple((perm[u], perm[v]) for u, v in g.edges))


def test_ind_examples():
    assert ind_count(K2, complete(3)) == 3
    assert ind_count(P3, complete(3)) == 0
    assert ind_count(TWO_DOTS, cycle(4)) == 2


def test_pattern_size_limit():
    with pytest.raises(BudgetExceeded):
        ind_count(PatternGraph(9), path(10))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_canonical_form_is_isomorphism_invariant(seed):
    rng = random.Random(seed)
    g = erdos_renyi(rng.randint(1, 7), 0.5, rng)
    perm = list(range(g.n))
    rng.shuffle(perm)
    assert canonical_form(g.n, g.edges) == canonical_form(g.n, _relabel(g, perm).edges)


def test_canonical_forms_separate_classes():
    # graph counts on 1..6 nodes up to isomorphism
    assert [len(all_graphs(n)) for n in range(1, 7)] == [1, 2, 4, 11, 34, 156]
    seen = set()
    for n in range(1, 6):
        for g in all_graphs(n):
            assert g.canonical not in seen
            seen.add(g.canonical)


def test_all_five_node_graphs_by_brute_force():
    pairs = list(itertools.combinations(range(5), 2))
    keys = {canonical_form(5, tuple(e for e, b in zip(pairs, bits) if b))
            for bits in itertools.product((0, 1), repeat=len(pairs))}
    assert keys == {g.canonical for g in all_graphs(5)}


def test_connected_enumeration_examples():
    assert len(list(connected_induced_subgraphs(path(3), 2))) == 5
    assert len(list(connected_induced_subgraphs(complete(3), 3))) == 7
    assert len(list(connected_induced_subgraphs(cycle(4), 3))) == 12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_connected_enumeration_matches_filter(seed, size_max):
    rng = random.Random(seed)
    h = erdos_renyi(rng.randint(1, 10), rng.choice((0.2, 0.35, 0.5)), rng)
    fast = list(connected_induced_subgraphs(h, size_max))
    assert len(fast) == len(set(fast))
    assert sorted(fast) == sorted(connected_subsets_bruteforce(h, size_max))


def test_additivity_examples():
    assert ind_sum_additivity_check(DOT, path(3), cycle(5))
    big = PatternGraph.from_graph(complete(5))
    assert ind_sum_additivity_check(big, path(3), cycle(4))
    with pytest.raises(ConfigError):
        ind_sum_additivity_check(TWO_DOTS, path(3), path(3))


def test_additivity_random_four_node_patterns():
    rng = random.Random(31)
    connected = [f for f in all_graphs(4) if f.is_connected()]
    for _ in range(20):
        f = rng.choice(connected)
        h1, h2 = erdos_renyi(5, 0.5, rng), erdos_renyi(5, 0.5, rng)
        assert ind_sum_additivity_check(f, h1, h2)


def test_disconnected_pattern_is_not_additive_in_general():
    h = path(1)
    assert ind_count(TWO_DOTS, graph_union(h, h)) != ind_count(TWO_DOTS, h) * 2


def test_dot_squared_decomposition():
    alpha = ind_product_decompose([DOT, DOT], cycle(5))
    assert {(F.n, len(F.edges)): a for F, a in alpha.items()} == {(1, 0): 1, (2, 0): 2, (2, 1): 2}


def test_single_pattern_decomposes_to_itself():
    assert ind_product_decompose([P3], path(5)) == {P3: 1} or \
        {F.canonical: a for F, a in ind_product_decompose([P3], path(5)).items()} == {P3.canonical: 1}


def test_edge_count_squared_on_two_hosts():
    a1 = ind_product_decompose([K2, K2], cycle(4))
    a2 = ind_product_decompose([K2, K2], complete(4))
    assert a1 == a2
    by_shape = {(F.n, len(F.edges)): a for F, a in a1.items() if F.n < 4}
    assert by_shape == {(2, 1): 1, (3, 2): 2, (3, 3): 6}


def test_decomposition_independent_of_host():
    for fl in ([K2, DOT], [P3, DOT], [TWO_DOTS, K2]):
        assert ind_product_decompose(fl, cycle(6)) == ind_product_decompose(fl, regular_tree(3, 1))


def test_decomposition_budget():
    with pytest.raises(BudgetExceeded):
        ind_product_decompose([P3, P3, P3], p_max=8)


def test_beta_k1_and_k2():
    lam = Fraction(2, 5)
    t1 = beta_table_type1(1, lam)
    assert t1.entries == {DOT: -lam}
    t2 = beta_table_type1(2, lam)
    got = {(H.n, len(H.edges)): b for H, b in t2.entries.items()}
    assert got == {(1, 0): lam ** 2, (2, 0): 0, (2, 1): 2 * lam ** 2}


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_beta_disconnected_vanish_and_reproduce_newton(k):
    lam = Fraction(3, 4)
    table = beta_table_type1(k, lam, verify=False)
    assert table.disconnected_nonzero() == []
    assert any(b != 0 for H, b in table.entries.items() if not H.is_connected()) is False
    for h in (path(3), cycle(4), complete(4), regular_tree(3, 1), erdos_renyi(7, 0.4, random.Random(k))):
        want = power_sums_newton(type1_polynomial(build_hardcore(h, lam)), k)[k]
        assert table.evaluate(h) == want


def test_beta_order_limit():
    with pytest.raises(BudgetExceeded):
        beta_table_type1(5, 1)


def test_independent_pattern():
    assert independent_pattern(3) == PatternGraph(3)
