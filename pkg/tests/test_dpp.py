from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from cdpp.bruteforce import constrained_mass_bruteforce
from cdpp.counting import BudgetConstraint, LinearFamily, PartitionFamily
from cdpp.dpp import ConstrainedDPP, budget_dpp, dpp_count, dpp_sample, validate_psd
from cdpp.errors import ArityMismatch, NotPSD, NullMass
from cdpp.sampling import Sampler

from conftest import random_psd


def test_validate_examples():
    assert validate_psd(np.eye(3)).ok
    assert validate_psd([[2, 1], [1, 1]]).ok
    with pytest.raises(NotPSD):
        validate_psd([[1, 2], [2, 1]])


@pytest.mark.parametrize("backend", ["float", "exact"])
def test_count_examples(backend):
    I4 = np.eye(4, dtype=int).tolist()
    part = ConstrainedDPP(kernel=I4, family=PartitionFamily(((0, 1), (2, 3)), (1, 1)), backend=backend)
    assert float(dpp_count(part).value) == pytest.approx(4)
    I3 = np.eye(3, dtype=int).tolist()
    assert float(budget_dpp(I3, (1, 1, 1), 2, backend).count().value) == pytest.approx(7)


def test_exact_backend_keeps_rationals():
    L = [[Fraction(1, 2), Fraction(1, 4)], [Fraction(1, 4), Fraction(1, 2)]]
    assert ConstrainedDPP(kernel=L, backend="exact").count().value == Fraction(35, 16)


def test_random_budget_matches_bruteforce(rng):
    L = random_psd(rng, 5)
    fam = BudgetConstraint(tuple(rng.integers(0, 4, size=5)), 4)
    got = ConstrainedDPP(kernel=L, family=fam).count().value
    assert got == pytest.approx(constrained_mass_bruteforce(L, fam, exact=False), rel=1e-8)


def test_unconstrained_is_sylvester(rng):
    for m in (1, 4, 9):
        L = random_psd(rng, m)
        assert ConstrainedDPP(kernel=L).count().value == pytest.approx(np.linalg.det(L + np.eye(m)), rel=1e-9)


def test_features_input(rng):
    V = rng.normal(size=(6, 2))
    a = ConstrainedDPP(features=V).count().value
    b = ConstrainedDPP(kernel=V @ V.T).count().value
    assert a == pytest.approx(b, rel=1e-10)


def test_family_arity_checked():
    with pytest.raises(ArityMismatch):
        ConstrainedDPP(kernel=np.eye(3), family=BudgetConstraint((1, 1), 1))
    with pytest.raises(ValueError):
        ConstrainedDPP()


def test_sample_uniform_identity():
    dpp = ConstrainedDPP(kernel=np.eye(2))
    draws = dpp_sample(dpp, seed=0, n_samples=20000)
    counts = Counter(d.subset for d in draws)
    sigma = np.sqrt(20000 * 0.25 * 0.75)
    assert len(counts) == 4
    assert all(abs(c - 5000) <= 3 * sigma for c in counts.values())


def test_sample_singleton_family():
    fam = LinearFamily((((1, 1, 1), {3}),))
    draws = ConstrainedDPP(kernel=np.eye(3), family=fam).sample(4, 10)
    assert all(d.subset == frozenset({0, 1, 2}) for d in draws)


def test_sample_diag_chain():
    dpp = ConstrainedDPP(kernel=[[2, 0], [0, 1]], backend="exact")
    s = Sampler(dpp.oracle, dpp.family, "exact")
    assert [s.chain_probability(x) for x in ({}, {0}, {1}, {0, 1})] == [
        Fraction(1, 6), Fraction(1, 3), Fraction(1, 6), Fraction(1, 3)]


def test_samples_satisfy_family(rng):
    L = random_psd(rng, 6)
    fam = LinearFamily((((1, 2, 0, 1, 3, 1), frozenset({2, 3})), ((1, 1, 1, 0, 0, 0), frozenset({1}))))
    for d in ConstrainedDPP(kernel=L, family=fam).sample(5, 200):
        assert fam.contains(d.subset)


def test_null_family_raises():
    with pytest.raises(NullMass):
        budget_dpp(np.eye(2), (1, 1), -1).sample(0)


def test_scaling_invariance_fixed_size():
    L = [[2, 1, 0], [1, 2, 1], [0, 1, 2]]
    fam = PartitionFamily(((0, 1, 2),), (2,))
    base = ConstrainedDPP(kernel=L, family=fam, backend="exact")
    scaled = ConstrainedDPP(kernel=[[3 * x for x in row] for row in L], family=fam, backend="exact")
    assert scaled.count().value == 9 * base.count().value
    s1 = Sampler(base.oracle, fam, "exact")
    s2 = Sampler(scaled.oracle, fam, "exact")
    for pair in ({0, 1}, {0, 2}, {1, 2}):
        assert s1.chain_probability(pair) == s2.chain_probability(pair)
