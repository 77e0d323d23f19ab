import itertools
from fractions import Fraction

import numpy as np
import pytest


def random_psd(rng, m, rank=None, scale=1.0):
    rank = m if rank is None else rank
    g = rng.normal(size=(m, rank)) * scale
    return g @ g.T


def integer_features(rng, m, r, lo=-2, hi=2):
    """Integer V (m x r); ``V V^T`` is an exact integer kernel."""
    return rng.integers(lo, hi + 1, size=(m, r)).tolist()


def exact_gram(v):
    return [[sum(Fraction(a) * b for a, b in zip(r1, r2)) for r2 in v] for r1 in v]


def subsets(m):
    for k in range(m + 1):
        yield from itertools.combinations(range(m), k)


def close(a, b, rel=1e-9, floor=1e-12):
    return abs(float(a) - float(b)) <= rel * max(abs(float(b)), floor)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
