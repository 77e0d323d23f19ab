"""Exhaustive-enumeration reference values.

Nothing here imports the evaluation, counting or sampling engine; the
determinant code is a deliberate duplicate.  Families are read duck-typed:
anything with ``constraints`` (pairs of costs and an allowed set or an
interval with ``lo``/``hi``), ``parts``/``quotas``, ``c``/``C``, or a plain
predicate on frozensets.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

import numpy as np

from .errors import NullMass, TooLarge

MAX_M = 20
MAX_DIST_M = 16
MAX_PM_VERTICES = 12
MAX_TREE_CANDIDATES = 2_000_000


def _det(rows) -> Fraction | int:
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                v = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = v // prev if isinstance(v, int) and isinstance(prev, int) else Fraction(v) / prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _exact(x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    f = Fraction(x)
    return f.numerator if f.denominator == 1 else f


def _in_allowed(value, k) -> bool:
    if hasattr(k, "lo") and hasattr(k, "hi"):
        return (k.lo is None or value >= k.lo) and (k.hi is None or value <= k.hi)
    return value in k


def membership(fam):
    """Predicate ``frozenset -> bool`` for a family description (``None`` = all sets)."""
    if fam is None:
        return lambda s: True
    if callable(fam) and not hasattr(fam, "constraints"):
        return fam
    if hasattr(fam, "parts"):
        parts = [set(p) for p in fam.parts]
        quotas = list(fam.quotas)
        return lambda s: all(len(s & p) == b for p, b in zip(parts, quotas))
    if hasattr(fam, "constraints"):
        cons = [(list(c), k) for c, k in fam.constraints]
        return lambda s: all(_in_allowed(sum(c[i] for i in s), k) for c, k in cons)
    if hasattr(fam, "c") and hasattr(fam, "C"):
        c, C = list(fam.c), fam.C
        return lambda s: sum(c[i] for i in s) <= C
    raise TypeError(f"cannot interpret family {fam!r}")


class _Measure:
    """Exact or float mass function for a kernel, explicit table or TU matrix."""

    def __init__(self, measure, kind: str, exact: bool):
        self.kind = kind
        self.exact = exact
        if kind == "kernel":
            arr = np.asarray(measure, dtype=float)
            self.m = arr.shape[0]
            self.float_kernel = arr
            self.exact_kernel = [[_exact(x) for x in row] for row in measure] if exact else None
        elif kind == "explicit":
            self.m = measure.m
            self.table = [Fraction(v) if exact else float(v) for v in measure.table]
        elif kind == "matroid":
            arr = np.asarray(measure, dtype=np.int64)
            self.m, self.r = arr.shape
            self.rows = arr.tolist()
        else:
            raise ValueError(kind)

    def __call__(self, s: tuple):
        if self.kind == "explicit":
            return self.table[sum(1 << i for i in s)]
        if self.kind == "matroid":
            if len(s) != self.r:
                return 0
            d = _det([self.rows[i] for i in s])
            return 1 if d != 0 else 0
        if not s:
            return Fraction(1) if self.exact else 1.0
        if self.exact:
            L = self.exact_kernel
            return _det([[L[i][j] for j in s] for i in s])
        idx = np.array(s)
        return float(np.linalg.det(self.float_kernel[np.ix_(idx, idx)]))


def _guess_kind(measure) -> str:
    if hasattr(measure, "table"):
        return "explicit"
    arr = np.asarray(measure, dtype=float)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1] and np.allclose(arr, arr.T):
        return "kernel"
    return "matroid"


def masses(measure, fam=None, kind: str | None = None, exact: bool = True) -> dict:
    """Map each feasible subset (frozenset) to its mass."""
    kind = kind or _guess_kind(measure)
    mu = _Measure(measure, kind, exact)
    if mu.m > MAX_M:
        raise TooLarge(f"enumeration supports m <= {MAX_M}")
    member = membership(fam)
    out = {}
    for size in range(mu.m + 1):
        for s in itertools.combinations(range(mu.m), size):
            fs = frozenset(s)
            if member(fs):
                out[fs] = mu(s)
    return out


def constrained_mass_bruteforce(measure, fam=None, kind: str | None = None, exact: bool = True):
    """Sum of masses over all feasible subsets, by enumerating ``2^m`` sets."""
    vals = masses(measure, fam, kind, exact).values()
    return sum(vals, Fraction(0) if exact else 0.0)


def exact_distribution(measure, fam=None, kind: str | None = None, exact: bool = True) -> dict:
    """Normalized distribution over the feasible subsets with positive mass."""
    kind = kind or _guess_kind(measure)
    if _Measure(measure, kind, exact).m > MAX_DIST_M:
        raise TooLarge(f"distribution tables support m <= {MAX_DIST_M}")
    table = masses(measure, fam, kind, exact)
    total = sum(table.values(), Fraction(0) if exact else 0.0)
    if total <= 0:
        raise NullMass("family has zero total mass")
    return {s: v / total for s, v in table.items() if v != 0}


def _is_spanning_tree(n: int, edges) -> bool:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return len(edges) == n - 1


def _cost_ok(cost, cost_filter) -> bool:
    if cost_filter is None:
        return True
    if callable(cost_filter):
        return cost_filter(cost)
    op, bound = cost_filter
    return cost == bound if op == "eq" else cost <= bound


def enumerate_graph_structures(graph, kind: str, cost_filter=None):
    """Count and list spanning trees or perfect matchings by exhaustion.

    ``graph`` needs ``n``, ``edges`` (0-indexed pairs) and optionally
    ``costs``.  ``cost_filter`` is ``None``, ``("eq", C)``, ``("le", C)`` or a
    callable on the total cost.  Structures are returned as tuples of edge
    indices.
    """
    n = graph.n
    edges = list(graph.edges)
    costs = list(getattr(graph, "costs", None) or [0] * len(edges))
    found = []
    if kind == "spanning_trees":
        if comb(len(edges), max(n - 1, 0)) > MAX_TREE_CANDIDATES:
            raise TooLarge("too many candidate edge subsets to enumerate")
        for combo in itertools.combinations(range(len(edges)), n - 1):
            if _is_spanning_tree(n, [edges[i] for i in combo]) and \
                    _cost_ok(sum(costs[i] for i in combo), cost_filter):
                found.append(combo)
    elif kind == "perfect_matchings":
        if n > MAX_PM_VERTICES:
            raise TooLarge(f"perfect matching enumeration supports n <= {MAX_PM_VERTICES}")
        if n % 2:
            return 0, []

        def extend(covered, chosen):
            if len(covered) == n:
                if _cost_ok(sum(costs[i] for i in chosen), cost_filter):
                    found.append(tuple(sorted(chosen)))
                return
            v = min(set(range(n)) - covered)
            for i, (a, b) in enumerate(edges):
                if v in (a, b) and a != b and a not in covered and b not in covered:
                    extend(covered | {a, b}, chosen + [i])

        extend(frozenset(), [])
    else:
        raise ValueError(f"unknown structure kind {kind!r}")
    return len(found), found
