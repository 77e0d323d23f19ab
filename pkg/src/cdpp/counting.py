"""Constrained counting over any generating-polynomial oracle.

A family ``{S : c_j(S) in K_j for all j}`` is counted by substituting
``x_i -> prod_j z_j ** c_j[i]``: the coefficient of ``prod_j z_j ** d_j`` of the
resulting polynomial is the mass of sets with ``c_j(S) = d_j``.  Negative
costs are handled by multiplying axis ``j`` by ``z_j ** off_j`` where
``off_j`` is the total negative cost, so coefficient index ``d`` stands for
cost ``d - off_j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .genpoly import GenPolyOracle, TransformProgram, transform
from .errors import ArityMismatch
from .interp import GRID_BUDGET, check_backend, clean_nonnegative, recover_multivariate


@dataclass(frozen=True)
class Interval:
    """Closed integer interval; ``None`` bounds are open-ended."""

    lo: int | None = None
    hi: int | None = None

    def __contains__(self, v) -> bool:
        return (self.lo is None or v >= self.lo) and (self.hi is None or v <= self.hi)


Allowed = Union[frozenset, Interval]


def _as_allowed(k) -> Allowed:
    if isinstance(k, Interval):
        return k
    return frozenset(int(v) for v in k)


@dataclass(frozen=True)
class LinearFamily:
    """``{S : c_j(S) in K_j for every j}`` with integer cost vectors ``c_j``."""

    constraints: tuple

    def __post_init__(self):
        cons = tuple((tuple(int(c) for c in costs), _as_allowed(k)) for costs, k in self.constraints)
        if not cons:
            raise ValueError("a linear family needs at least one constraint")
        if len({len(c) for c, _ in cons}) != 1:
            raise ArityMismatch("all cost vectors must have the same length")
        object.__setattr__(self, "constraints", cons)

    @property
    def m(self) -> int:
        return len(self.constraints[0][0])

    @property
    def cost_vectors(self) -> list[tuple]:
        return [c for c, _ in self.constraints]

    def contains(self, subset: Iterable[int]) -> bool:
        s = list(subset)
        return all(sum(c[i] for i in s) in k for c, k in self.constraints)

    @classmethod
    def unconstrained(cls, m: int) -> "LinearFamily":
        return cls((((0,) * m, frozenset({0})),))

    def as_linear(self) -> "LinearFamily":
        return self


@dataclass(frozen=True)
class BudgetConstraint:
    """``{S : c(S) <= C}``."""

    c: tuple
    C: int

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(int(v) for v in self.c))
        object.__setattr__(self, "C", int(self.C))

    @property
    def m(self) -> int:
        return len(self.c)

    def as_linear(self) -> LinearFamily:
        return LinearFamily(((self.c, Interval(None, self.C)),))

    def contains(self, subset) -> bool:
        return sum(self.c[i] for i in subset) <= self.C


@dataclass(frozen=True)
class PartitionFamily:
    """Sets meeting quota ``quotas[j]`` exactly on block ``parts[j]``."""

    parts: tuple
    quotas: tuple

    def __post_init__(self):
        parts = tuple(tuple(sorted(int(e) for e in p)) for p in self.parts)
        quotas = tuple(int(b) for b in self.quotas)
        if len(parts) != len(quotas) or not parts:
            raise ValueError("need one quota per part and at least one part")
        seen = [e for p in parts for e in p]
        if any(not p for p in parts) or len(seen) != len(set(seen)):
            raise ValueError("parts must be nonempty and disjoint")
        if sorted(seen) != list(range(len(seen))):
            raise ValueError("parts must cover 0..m-1")
        for p, b in zip(parts, quotas):
            if not 0 <= b <= len(p):
                raise ValueError(f"quota {b} out of range for a part of size {len(p)}")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "quotas", quotas)

    @property
    def m(self) -> int:
        return sum(len(p) for p in self.parts)

    def as_linear(self) -> LinearFamily:
        m = self.m
        cons = []
        for p, b in zip(self.parts, self.quotas):
            members = set(p)
            cons.append((tuple(1 if i in members else 0 for i in range(m)), frozenset({b})))
        return LinearFamily(tuple(cons))

    def contains(self, subset) -> bool:
        s = set(subset)
        return all(len(s.intersection(p)) == b for p, b in zip(self.parts, self.quotas))


Family = Union[LinearFamily, BudgetConstraint, PartitionFamily]


@dataclass(frozen=True)
class Mass:
    """A constrained mass; ``error_bound`` is an a-priori float round-off estimate."""

    value: float | Fraction
    backend: str
    error_bound: float = 0.0

    def __float__(self) -> float:
        return float(self.value)


def _cost_axes(costs: Sequence[Sequence[int]], zeroed=frozenset()):
    """Per-axis (offset, degree) over the coordinates that are not zeroed."""
    axes = []
    for c in costs:
        live = [v for i, v in enumerate(c) if i not in zeroed]
        neg = -sum(v for v in live if v < 0)
        pos = sum(v for v in live if v > 0)
        axes.append((neg, pos + neg))
    return axes


def coefficient_tensor(oracle: GenPolyOracle, costs: Sequence[Sequence[int]], backend: str = "float",
                       *, forced_out: Iterable[int] = (), tagged: Iterable[int] = (),
                       grid_budget: int = GRID_BUDGET):
    """Joint cost distribution of the (possibly conditioned) measure.

    Returns ``(tensor, offsets)``.  Axis ``j < p`` indexes ``c_j(S) + offsets[j]``;
    when ``tagged`` is nonempty a last axis indexes ``|S & tagged|``.  Elements
    of ``forced_out`` are removed from the ground set.
    """
    backend = check_backend(backend)
    forced_out = frozenset(forced_out)
    tagged = frozenset(tagged)
    costs = [tuple(int(v) for v in c) for c in costs]
    for c in costs:
        if len(c) != oracle.arity:
            raise ArityMismatch(f"cost vector of length {len(c)} for an oracle of arity {oracle.arity}")
    axes = _cost_axes(costs, forced_out)
    offsets = [off for off, _ in axes]
    bounds = [deg for _, deg in axes]
    if tagged:
        bounds.append(len(tagged))
    prog = TransformProgram(zeroed=forced_out, inclusion_tagged=tagged, cost_substitutions=costs)
    sub = transform(oracle, prog)
    p = len(costs)
    has_tag = bool(tagged)
    has_neg = any(offsets)

    if backend == "float":
        off = np.array(offsets, dtype=float)

        def fn(pts):
            # transformed oracle takes (y, z_1..z_p); our grid is (z_1..z_p, y)
            order = np.concatenate([pts[:, p:], pts[:, :p]], axis=1) if has_tag else pts
            vals = sub.evaluate_batch(order)
            if has_neg:
                vals = vals * np.prod(pts[:, :p] ** off[None, :], axis=1)
            return vals

        tensor = recover_multivariate(fn, bounds, "float", grid_budget=grid_budget)
    else:

        def fn(point):
            order = point[p:] + point[:p] if has_tag else point
            val = sub.evaluate_exact(list(order))
            for z, o in zip(point[:p], offsets):
                if o:
                    val *= z**o
            return val

        first = [1 if has_neg else 0] * p + ([0] if has_tag else [])
        tensor = recover_multivariate(fn, bounds, "exact", grid_budget=grid_budget, first_nodes=first)
    return tensor, offsets


def _selectors(allowed: Sequence[Allowed], offsets: Sequence[int], shape: Sequence[int]) -> list:
    sel = []
    for k, off, size in zip(allowed, offsets, shape):
        idx = [d for d in range(size) if (d - off) in k]
        sel.append(idx)
    return sel


def _sum_selected(tensor, allowed, offsets, backend, tag_index: int | None = None) -> Mass:
    shape = tensor.shape
    p = len(allowed)
    if backend == "float":
        cleaned = clean_nonnegative(tensor)
        err = float(np.finfo(float).eps * max(1, cleaned.size) * (np.abs(tensor).max() if tensor.size else 0))
    else:
        cleaned = tensor
    sub = cleaned
    if tag_index is not None:
        sub = sub[..., tag_index]
    for axis, idx in enumerate(_selectors(allowed, offsets, shape[:p])):
        sub = np.take(sub, idx, axis=axis) if idx else np.take(sub, [], axis=axis)
    if backend == "float":
        return Mass(float(np.sum(sub)), "float", err)
    total = sum(sub.ravel().tolist(), Fraction(0))
    return Mass(total.numerator if total.denominator == 1 else total, "exact", 0.0)


def conditioned_mass(oracle: GenPolyOracle, fam: Family, backend: str = "float",
                     forced_in: Iterable[int] = (), forced_out: Iterable[int] = (),
                     grid_budget: int = GRID_BUDGET) -> Mass:
    """Mass of ``{S in fam : forced_in <= S, S & forced_out = {}}``.

    ``forced_in`` elements are tagged with an auxiliary variable whose top
    coefficient selects the sets containing all of them.
    """
    lin = fam.as_linear()
    forced_in = frozenset(forced_in)
    tensor, offsets = coefficient_tensor(oracle, lin.cost_vectors, backend, forced_out=forced_out,
                                         tagged=forced_in, grid_budget=grid_budget)
    allowed = [k for _, k in lin.constraints]
    tag = len(forced_in) if forced_in else None
    return _sum_selected(tensor, allowed, offsets, check_backend(backend), tag)


def linear_family_count(oracle: GenPolyOracle, fam: Family, backend: str = "float",
                        grid_budget: int = GRID_BUDGET) -> Mass:
    return conditioned_mass(oracle, fam, backend, grid_budget=grid_budget)


def partition_count(oracle: GenPolyOracle, fam: PartitionFamily, backend: str = "float",
                    grid_budget: int = GRID_BUDGET) -> Mass:
    return conditioned_mass(oracle, fam, backend, grid_budget=grid_budget)


def set_count(oracle: GenPolyOracle, c: Sequence[int], K, backend: str = "float") -> Mass:
    """Mass of sets whose cost lies in ``K`` (finite set or :class:`Interval`)."""
    return conditioned_mass(oracle, LinearFamily(((tuple(c), K),)), backend)


def bcount(oracle: GenPolyOracle, c: Sequence[int], C: int, backend: str = "float") -> Mass:
    return conditioned_mass(oracle, BudgetConstraint(tuple(c), C), backend)


def ecount(oracle: GenPolyOracle, c: Sequence[int], C: int, backend: str = "float") -> Mass:
    return set_count(oracle, c, {int(C)}, backend)


def cost_distribution(oracle: GenPolyOracle, c: Sequence[int], backend: str = "float") -> dict:
    """Map cost value -> mass of sets with that cost, for every reachable cost."""
    backend = check_backend(backend)
    tensor, (off,) = coefficient_tensor(oracle, [tuple(c)], backend)
    vals = clean_nonnegative(tensor) if backend == "float" else tensor
    return {d - off: v for d, v in enumerate(vals.tolist())}


def total_mass(oracle: GenPolyOracle, backend: str = "float") -> Mass:
    backend = check_backend(backend)
    if backend == "exact":
        v = oracle.evaluate_exact([1] * oracle.arity)
        return Mass(v, "exact")
    v = oracle.evaluate_batch(np.ones((1, oracle.arity)))[0]
    return Mass(float(v.real), "float", np.finfo(float).eps * abs(v) * max(1, oracle.cost_hint))


def grid_size(fam: Family) -> int:
    return math.prod(deg + 1 for _, deg in _cost_axes(fam.as_linear().cost_vectors))
