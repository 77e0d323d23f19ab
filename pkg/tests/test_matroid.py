import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdpp.bruteforce import constrained_mass_bruteforce, enumerate_graph_structures
from cdpp.counting import BudgetConstraint, total_mass
from cdpp.errors import Disconnected, NullMass, OddVertexCount, ParseError
from cdpp.genpoly import matroid_oracle
from cdpp.matroid import (Graph, check_totally_unimodular, count_bases_budgeted, count_pm_via_reduction,
                          graphic_representation, parse_edge_list, pm_to_st_instance,
                          reduce_to_basis_columns, sample_basis_budgeted)
from cdpp.sampling import Sampler


def complete(n):
    return Graph(n, tuple(itertools.combinations(range(n), 2)))


def cycle(n):
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


K3 = Graph(3, ((0, 1), (1, 2), (0, 2)))


def test_parse_edge_list():
    g = parse_edge_list("# triangle\n1 2 5\n2 3 7\n\n1 3 1\n")
    assert g.n == 3 and g.edges == ((0, 1), (1, 2), (0, 2)) and g.costs == (5, 7, 1)
    assert parse_edge_list("1 2\n1 2\n").m == 2
    for bad in ("1 1\n", "0 2\n", "1 2 3 4\n", "a b\n", "1 2 3\n2 3\n"):
        with pytest.raises(ParseError):
            parse_edge_list(bad)


def test_graphic_representation_examples():
    a = graphic_representation(K3)
    assert a.tolist() == [[1, -1], [0, 1], [1, 0]]
    assert total_mass(matroid_oracle(a), "exact").value == 3
    assert np.abs(graphic_representation(Graph(2, ((0, 1),)))).tolist() == [[1]]
    assert total_mass(matroid_oracle(graphic_representation(complete(4))), "exact").value == 16


def test_disconnected():
    with pytest.raises(Disconnected):
        graphic_representation(Graph(4, ((0, 1), (2, 3))))


def test_reduce_to_basis_columns():
    a = graphic_representation(complete(4))
    assert np.array_equal(reduce_to_basis_columns(a), a)
    padded = np.c_[a, np.zeros(6, dtype=int)]
    assert np.array_equal(reduce_to_basis_columns(padded), a)
    dup = np.c_[a[:, :1], a]
    red = reduce_to_basis_columns(dup)
    assert red.shape == a.shape
    assert total_mass(matroid_oracle(red), "exact").value == 16


def test_totally_unimodular_spot_check():
    assert check_totally_unimodular(graphic_representation(complete(5)))
    assert not check_totally_unimodular([[1, 1], [-1, 1]], trials=200)
    assert not check_totally_unimodular([[2, 0], [0, 1]])


@pytest.mark.parametrize("backend", ["float", "exact"])
def test_budgeted_count_examples(backend):
    a = graphic_representation(K3)
    assert count_bases_budgeted(a, (1, 2, 3), 4, backend) == 2
    assert count_bases_budgeted(a, (1, 2, 3), 2, backend) == 0
    k4 = graphic_representation(complete(4))
    assert count_bases_budgeted(k4, range(1, 7), 21, backend) == 16


def test_cayley(rng):
    for n in range(3, 8):
        a = graphic_representation(complete(n))
        assert count_bases_budgeted(a, [1] * a.shape[0], n, "float") == n ** (n - 2)


def test_kirchhoff_and_cauchy_binet(rng):
    for _ in range(6):
        n = int(rng.integers(3, 9))
        edges = list(itertools.combinations(range(n), 2))
        keep = [e for e in edges if rng.random() < 0.6] + [(i, i + 1) for i in range(n - 1)]
        g = Graph(n, tuple(keep))
        a = graphic_representation(g)
        lap = a.T @ a  # reduced Laplacian
        want = round(np.linalg.det(lap))
        assert total_mass(matroid_oracle(a), "exact").value == want


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_budgeted_counts_match_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 6))
    edges = [(i, i + 1) for i in range(n - 1)]
    extra = [e for e in itertools.combinations(range(n), 2) if e not in edges]
    edges += [extra[i] for i in rng.permutation(len(extra))[: int(rng.integers(0, min(len(extra), 12 - len(edges)) + 1))]]
    costs = tuple(int(c) for c in rng.integers(-2, 5, size=len(edges)))
    g = Graph(n, tuple(edges), costs)
    a = graphic_representation(g)
    C = int(rng.integers(-2, 3 * n))
    want, _ = enumerate_graph_structures(g, "spanning_trees", ("le", C))
    assert count_bases_budgeted(a, costs, C, "exact") == want
    assert count_bases_budgeted(a, costs, C, "float") == want
    assert constrained_mass_bruteforce(a, BudgetConstraint(costs, C), kind="matroid") == want


def test_sampling_uniform_over_trees():
    a = graphic_representation(K3)
    assert sample_basis_budgeted(a, (1, 2, 3), 4, 0) in ({0, 1}, {0, 2})
    sampler = Sampler(matroid_oracle(a), BudgetConstraint((0, 0, 0), 0))
    counts = Counter(sampler.draw_masks(20000, 0).tolist())
    assert set(counts) == {0b011, 0b101, 0b110}
    sigma = np.sqrt(20000 / 3 * 2 / 3)
    assert all(abs(c - 20000 / 3) <= 3 * sigma for c in counts.values())
    feasible = Counter(Sampler(matroid_oracle(a), BudgetConstraint((1, 2, 3), 4)).draw_masks(20000, 1).tolist())
    assert set(feasible) == {0b011, 0b101}
    assert all(abs(c - 10000) <= 3 * np.sqrt(5000) for c in feasible.values())
    with pytest.raises(NullMass):
        sample_basis_budgeted(a, (1, 2, 3), 2, 0)


def test_pm_instance_examples():
    inst = pm_to_st_instance(Graph(2, ((0, 1),)))
    assert (inst.base, inst.target, inst.alpha_inv) == (3, 12, 1)
    inst = pm_to_st_instance(cycle(4))
    assert (inst.base, inst.target) == (11, 16104)
    assert inst.alpha_inv == 4
    assert all(c == 0 for c in inst.costs[4:])
    with pytest.raises(OddVertexCount):
        pm_to_st_instance(K3)


@pytest.mark.parametrize("g, pm", [(Graph(2, ((0, 1),)), 1), (cycle(4), 2), (complete(4), 3)])
def test_count_pm_via_reduction(g, pm):
    assert count_pm_via_reduction(g) == pm


@pytest.mark.parametrize("g", [Graph(2, ((0, 1),)), cycle(4), complete(4), cycle(6), complete(6),
                               Graph(6, ((0, 1), (2, 3), (4, 5), (1, 2), (3, 4))),
                               Graph(4, ((0, 1), (0, 2), (0, 3)))])
def test_reduction_identity_bruteforce(g):
    inst = pm_to_st_instance(g)
    trees, _ = enumerate_graph_structures(inst.graph, "spanning_trees", ("eq", inst.target))
    matchings, _ = enumerate_graph_structures(g, "perfect_matchings")
    assert Fraction(trees) == inst.alpha_inv * matchings
