"""Budgeted bases of regular matroids, spanning trees and the matching reduction.

A regular matroid is given by a totally unimodular matrix ``A`` (m x r, full
column rank).  Every nonzero r x r minor is +-1, so ``det(A^T X A)`` is the
basis generating polynomial and the counting/sampling machinery applies
unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .counting import BudgetConstraint, bcount, ecount
from .errors import CostBudgetExceeded, Disconnected, OddVertexCount, ParseError
from .genpoly import matroid_oracle
from .interp import GRID_BUDGET, check_backend, round_to_integer
from .linalg import bareiss_det, exact_rank
from .sampling import Sampler

__all__ = [
    "Graph", "parse_edge_list", "graphic_representation", "reduce_to_basis_columns",
    "check_totally_unimodular", "count_bases_budgeted", "sample_basis_budgeted",
    "PMReductionInstance", "pm_to_st_instance", "count_pm_via_reduction",
]


@dataclass(frozen=True)
class Graph:
    """Undirected multigraph on vertices ``0..n-1``; ``costs`` is optional."""

    n: int
    edges: tuple
    costs: tuple | None = None

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
        object.__setattr__(self, "edges", edges)
        if self.costs is not None:
            costs = tuple(int(c) for c in self.costs)
            if len(costs) != len(edges):
                raise ValueError("need one cost per edge")
            object.__setattr__(self, "costs", costs)

    @property
    def m(self) -> int:
        return len(self.edges)

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n


def parse_edge_list(text: str, n: int | None = None) -> Graph:
    """Parse ``u v [cost]`` lines with 1-indexed vertices; ``#`` starts a comment.

    The vertex count defaults to the largest endpoint seen.  Costs must be
    given on every line or on none.
    """
    edges, costs = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"line {lineno}: expected 'u v [cost]', got {raw!r}")
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer field in {raw!r}") from None
        u, v = nums[0], nums[1]
        if u < 1 or v < 1:
            raise ParseError(f"line {lineno}: vertices are 1-indexed")
        if u == v:
            raise ParseError(f"line {lineno}: self-loop at vertex {u}")
        edges.append((u - 1, v - 1))
        if len(nums) == 3:
            costs.append(nums[2])
    if costs and len(costs) != len(edges):
        raise ParseError("costs must be given for every edge or for none")
    top = max((max(e) + 1 for e in edges), default=0)
    if n is None:
        n = top
    elif n < top:
        raise ParseError(f"edge endpoint {top} exceeds the declared {n} vertices")
    return Graph(n, tuple(edges), tuple(costs) if costs else None)


def graphic_representation(g: Graph) -> np.ndarray:
    """Signed incidence matrix (edges x vertices) without the last vertex column.

    Edge ``(u, v)`` gets ``+1`` at ``u`` and ``-1`` at ``v``.  Bases of the
    rows are exactly the spanning trees.
    """
    if not g.is_connected():
        raise Disconnected("graph is not connected")
    a = np.zeros((g.m, g.n), dtype=np.int64)
    for i, (u, v) in enumerate(g.edges):
        a[i, u] += 1
        a[i, v] -= 1
    return a[:, : g.n - 1]


def reduce_to_basis_columns(a) -> np.ndarray:
    """Keep a maximal linearly independent set of columns, scanning left to right."""
    a = np.asarray(a, dtype=np.int64)
    keep = []
    rank = 0
    for j in range(a.shape[1]):
        trial = keep + [j]
        r = exact_rank(a[:, trial].tolist())
        if r > rank:
            keep, rank = trial, r
    return a[:, keep]


def check_totally_unimodular(a, trials: int = 500, max_size: int = 6, seed=0) -> bool:
    """Spot-check: random square submatrices up to ``max_size`` have minors in {-1, 0, 1}."""
    a = np.asarray(a, dtype=np.int64)
    if a.size and not np.isin(a, (-1, 0, 1)).all():
        return False
    rng = np.random.default_rng(seed)
    m, r = a.shape
    top = min(m, r, max_size)
    for _ in range(trials if top else 0):
        k = int(rng.integers(1, top + 1))
        rows = rng.choice(m, k, replace=False)
        cols = rng.choice(r, k, replace=False)
        if bareiss_det(a[np.ix_(rows, cols)].tolist()) not in (-1, 0, 1):
            return False
    return True


def _as_int(value, backend: str) -> int:
    if backend == "exact":
        return int(value)
    return round_to_integer(value)


def count_bases_budgeted(a, c: Sequence[int], C: int, backend: str = "float") -> int:
    """Number of bases ``B`` with ``c(B) <= C``."""
    backend = check_backend(backend)
    return _as_int(bcount(matroid_oracle(a), c, C, backend).value, backend)


def sample_basis_budgeted(a, c: Sequence[int], C: int, seed=None, backend: str = "float") -> frozenset:
    """A uniformly random basis among those with ``c(B) <= C`` (row indices)."""
    oracle = matroid_oracle(a)
    return Sampler(oracle, BudgetConstraint(tuple(c), C), backend).draw(seed).subset


@dataclass(frozen=True)
class PMReductionInstance:
    """Spanning-tree instance whose exact-cost count is ``alpha_inv * PM(G)``.

    ``graph`` holds the original edges first, then one cost-0 edge for every
    vertex pair.
    """

    graph: Graph
    base: int
    target: int
    alpha_inv: Fraction

    @property
    def costs(self) -> tuple:
        return self.graph.costs


def _contracted_tree_count(half: int) -> Fraction:
    # spanning trees of the complete graph on n/2 super-vertices with 4 parallel edges per pair
    if half == 1:
        return Fraction(1)
    return Fraction(4) ** (half - 1) * Fraction(half) ** (half - 2)


def pm_to_st_instance(g: Graph) -> PMReductionInstance:
    """Encode perfect matchings of ``g`` as exact-cost spanning trees.

    Original edge ``{i, j}`` costs ``b^i + b^j`` (vertices numbered from 1)
    and the target is ``sum_i b^i``: a tree hits the target exactly when its
    original edges form a perfect matching, the zero-cost clique edges
    completing it.
    """
    if g.n % 2:
        raise OddVertexCount(f"graph has {g.n} vertices")
    clique = [(i, j) for i in range(g.n) for j in range(i + 1, g.n)]
    m_prime = g.m + len(clique)
    b = m_prime + 1
    costs = [b ** (u + 1) + b ** (v + 1) for u, v in g.edges] + [0] * len(clique)
    target = sum(b**i for i in range(1, g.n + 1))
    big = Graph(g.n, tuple(g.edges) + tuple(clique), tuple(costs))
    return PMReductionInstance(big, b, target, _contracted_tree_count(g.n // 2))


def count_pm_via_reduction(g: Graph, grid_budget: int = GRID_BUDGET) -> int:
    """Perfect matchings of ``g`` through the exact-cost spanning-tree count."""
    inst = pm_to_st_instance(g)
    degree = sum(inst.costs)
    if degree + 1 > grid_budget:
        raise CostBudgetExceeded(f"cost total {degree} needs more than {grid_budget} interpolation nodes")
    a = graphic_representation(inst.graph)
    trees = round_to_integer(ecount(matroid_oracle(a), inst.costs, inst.target, "float").value)
    count = Fraction(trees) / inst.alpha_inv
    if count.denominator != 1:
        raise ArithmeticError(f"tree count {trees} is not a multiple of {inst.alpha_inv}")
    return int(count)
