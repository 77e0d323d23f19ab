"""Set-function measures and evaluation oracles for their generating polynomials.

For a measure ``mu`` on subsets of ``{0, ..., m-1}`` the generating polynomial
is ``g(x) = sum_S mu(S) prod_{i in S} x_i``.  Every counting and sampling
routine in this package touches ``mu`` only through an oracle evaluating ``g``.

Two arithmetic modes are supported.  Float mode evaluates batches of complex
points with numpy (``evaluate_batch``); exact mode evaluates a single point of
``int``/``Fraction`` coordinates with fraction-free elimination
(``evaluate_exact``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ArityMismatch, RankDeficient, TooLarge, VariableClash
from .linalg import (
    bareiss_det,
    exact_rank,
    is_exact_scalar,
    pivoted_cholesky,
    to_exact_matrix,
    to_fraction,
    validate_psd,
)

EXPLICIT_MAX_M = 20
_CHUNK = 1024


def cholesky_factor(kernel, tol: float | None = None) -> np.ndarray:
    """Feature matrix ``V`` (m x rank) with ``V V^T = L``.

    Columns for numerically zero pivots are dropped, so ``V`` has as many
    columns as the numerical rank of ``L``.
    """
    kw = {} if tol is None else {"tol": tol}
    validate_psd(kernel, **kw)
    return pivoted_cholesky(kernel, **kw)


class GenPolyOracle:
    """Evaluator of a generating polynomial in ``arity`` variables.

    Subclasses implement ``_batch`` (complex numpy) and ``_exact`` (rational).
    Instances are immutable; wrap them with :func:`transform` to change
    variables.
    """

    arity: int
    cost_hint: int = 1

    def evaluate_batch(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=complex)
        if pts.ndim != 2 or pts.shape[1] != self.arity:
            raise ArityMismatch(f"expected points of shape (K, {self.arity}), got {pts.shape}")
        if pts.shape[0] <= _CHUNK:
            return self._batch(pts)
        return np.concatenate([self._batch(pts[i:i + _CHUNK]) for i in range(0, len(pts), _CHUNK)])

    def evaluate_exact(self, point: Sequence) -> Fraction | int:
        if len(point) != self.arity:
            raise ArityMismatch(f"expected {self.arity} coordinates, got {len(point)}")
        return self._exact([x if isinstance(x, int) else to_fraction(x) for x in point])

    def __call__(self, point):
        return evaluate(self, point)

    def _batch(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _exact(self, point: list) -> Fraction | int:
        raise NotImplementedError


def evaluate(oracle: GenPolyOracle, point: Sequence):
    """Evaluate ``oracle`` at one point.

    Points made only of ints/Fractions are evaluated exactly; anything else
    goes through the complex float path.
    """
    point = list(point)
    if len(point) != oracle.arity:
        raise ArityMismatch(f"expected {oracle.arity} coordinates, got {len(point)}")
    if all(is_exact_scalar(x) for x in point):
        return oracle.evaluate_exact(point)
    val = oracle.evaluate_batch(np.asarray(point, dtype=complex)[None, :])[0]
    return val.real if abs(val.imag) <= 1e-12 * max(1.0, abs(val.real)) and all(
        np.isreal(x) for x in point) else val


def _exact_det(matrix) -> Fraction | int:
    d = bareiss_det(matrix)
    if isinstance(d, Fraction) and d.denominator == 1:
        return int(d)
    return d


class DPPOracle(GenPolyOracle):
    """``x -> det(V^T diag(x) V + I_n)`` for a feature matrix ``V`` (m x n)."""

    def __init__(self, v):
        exact_input = isinstance(v, (list, tuple)) and all(
            is_exact_scalar(x) for row in v for x in row)
        self.v = np.array(v, dtype=float)
        if self.v.ndim != 2:
            raise ArityMismatch("feature matrix must be two-dimensional")
        self.arity, self.n = self.v.shape
        self._v_exact = to_exact_matrix(v if exact_input else self.v)
        self.cost_hint = max(1, self.n) ** 3 + self.arity * self.n**2

    def _batch(self, pts):
        n = self.n
        if n == 0:
            return np.ones(len(pts), dtype=complex)
        vt = self.v.T.astype(complex)
        mats = (vt[None, :, :] * pts[:, None, :]) @ self.v
        mats += np.eye(n)
        return np.linalg.det(mats)

    def _exact(self, point):
        v = self._v_exact
        n = self.n
        rows = [(x, v[i]) for i, x in enumerate(point) if x != 0]
        mat = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
        for x, vi in rows:
            for a in range(n):
                xa = x * vi[a]
                if xa == 0:
                    continue
                ra = mat[a]
                for b in range(n):
                    ra[b] += xa * vi[b]
        return _exact_det(mat)


class KernelOracle(GenPolyOracle):
    """``x -> det(I_m + diag(x) L)``; needs no factorization, so exact kernels stay exact."""

    def __init__(self, kernel):
        exact_input = isinstance(kernel, (list, tuple)) and all(
            is_exact_scalar(x) for row in kernel for x in row)
        self.kernel = np.array(kernel, dtype=float)
        self.arity = self.kernel.shape[0]
        self._l_exact = to_exact_matrix(kernel if exact_input else self.kernel)
        self.cost_hint = self.arity**3

    def _batch(self, pts):
        mats = pts[:, :, None] * self.kernel[None, :, :]
        mats += np.eye(self.arity)
        return np.linalg.det(mats)

    def _exact(self, point):
        L = self._l_exact
        m = self.arity
        mat = [[(1 if i == j else 0) + point[i] * L[i][j] for j in range(m)] for i in range(m)]
        return _exact_det(mat)


class MatroidOracle(GenPolyOracle):
    """``x -> det(A^T diag(x) A)`` for an integer matrix ``A`` of full column rank."""

    def __init__(self, a):
        arr = np.array(a, dtype=np.int64)
        if arr.ndim != 2:
            raise RankDeficient("representation must be a 2-D matrix")
        self.a = arr
        self.arity, self.r = arr.shape
        if exact_rank(arr.tolist()) != self.r:
            raise RankDeficient(f"matrix does not have full column rank {self.r}")
        self._a_list = arr.tolist()
        self.cost_hint = max(1, self.r) ** 3 + self.arity * self.r**2

    def _batch(self, pts):
        af = self.a.astype(complex)
        mats = (af.T[None, :, :] * pts[:, None, :]) @ af
        if self.r == 0:
            return np.ones(len(pts), dtype=complex)
        return np.linalg.det(mats)

    def _exact(self, point):
        a = self._a_list
        r = self.r
        mat = [[0] * r for _ in range(r)]
        for i, x in enumerate(point):
            if x == 0:
                continue
            ai = a[i]
            for p in range(r):
                if ai[p] == 0:
                    continue
                xp = x * ai[p]
                row = mat[p]
                for q in range(r):
                    if ai[q]:
                        row[q] += xp * ai[q]
        return _exact_det(mat)


@dataclass(frozen=True)
class ExplicitSetFunction:
    """Table of masses indexed by bitmask (bit ``i`` set <=> element ``i`` in S)."""

    m: int
    table: tuple

    def __post_init__(self):
        if self.m > EXPLICIT_MAX_M:
            raise TooLarge(f"explicit set functions support m <= {EXPLICIT_MAX_M}")
        if len(self.table) != 1 << self.m:
            raise ValueError("table must cover all 2^m subsets")
        if any(to_fraction(v) < 0 for v in self.table):
            raise ValueError("masses must be nonnegative")

    @classmethod
    def from_function(cls, m: int, fn) -> "ExplicitSetFunction":
        if m > EXPLICIT_MAX_M:
            raise TooLarge(f"explicit set functions support m <= {EXPLICIT_MAX_M}")
        table = []
        for mask in range(1 << m):
            table.append(fn(frozenset(i for i in range(m) if mask >> i & 1)))
        return cls(m, tuple(table))


class ExplicitOracle(GenPolyOracle):
    def __init__(self, f: ExplicitSetFunction):
        if f.m > EXPLICIT_MAX_M:
            raise TooLarge(f"explicit oracles support m <= {EXPLICIT_MAX_M}")
        self.f = f
        self.arity = f.m
        self._table_exact = [to_fraction(v) for v in f.table]
        self._table = np.array([float(v) for v in self._table_exact])
        self.cost_hint = 1 << f.m

    def _monomials(self, pts, one):
        mono = one
        for i in range(self.arity):
            mono = np.concatenate([mono, mono * pts[:, i:i + 1]], axis=1)
        return mono

    def _batch(self, pts):
        mono = self._monomials(pts, np.ones((len(pts), 1), dtype=complex))
        return mono @ self._table

    def _exact(self, point):
        mono = [Fraction(1)]
        for x in point:
            mono = mono + [t * x for t in mono]
        return sum((t * w for t, w in zip(mono, self._table_exact) if w), Fraction(0))


def dpp_oracle(v) -> DPPOracle:
    return DPPOracle(v)


def kernel_oracle(kernel) -> KernelOracle:
    return KernelOracle(kernel)


def matroid_oracle(a) -> MatroidOracle:
    return MatroidOracle(a)


def explicit_oracle(f: ExplicitSetFunction) -> ExplicitOracle:
    return ExplicitOracle(f)


@dataclass(frozen=True)
class TransformProgram:
    """Change of variables applied to a generating polynomial.

    ``zeroed`` coordinates are fixed to 0.  ``inclusion_tagged`` coordinates
    are multiplied by an auxiliary variable ``y``.  ``cost_substitutions``
    holds ``p`` integer exponent vectors; when present every coordinate ``i``
    becomes ``prod_j z_j ** costs[j][i]``.

    Variables of the transformed oracle, in order: ``y`` (if anything is
    tagged), then ``z_1..z_p`` (if costs are given), otherwise the untouched
    ``x_i`` for ``i`` not zeroed.
    """

    zeroed: frozenset = field(default_factory=frozenset)
    inclusion_tagged: frozenset = field(default_factory=frozenset)
    cost_substitutions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "zeroed", frozenset(self.zeroed))
        object.__setattr__(self, "inclusion_tagged", frozenset(self.inclusion_tagged))
        object.__setattr__(self, "cost_substitutions",
                           tuple(tuple(int(c) for c in row) for row in self.cost_substitutions))
        clash = self.zeroed & self.inclusion_tagged
        if clash:
            raise VariableClash(f"coordinates both zeroed and tagged: {sorted(clash)}")


class TransformedOracle(GenPolyOracle):
    def __init__(self, base: GenPolyOracle, prog: TransformProgram):
        m = base.arity
        for i in prog.zeroed | prog.inclusion_tagged:
            if not 0 <= i < m:
                raise ArityMismatch(f"coordinate {i} outside 0..{m - 1}")
        for row in prog.cost_substitutions:
            if len(row) != m:
                raise ArityMismatch(f"cost vector of length {len(row)} for arity {m}")
        self.base = base
        self.prog = prog
        self._tag = bool(prog.inclusion_tagged)
        self._p = len(prog.cost_substitutions)
        self._free = [] if self._p else [i for i in range(m) if i not in prog.zeroed]
        self.arity = int(self._tag) + self._p + len(self._free)
        self.cost_hint = base.cost_hint
        self._costs = np.array(prog.cost_substitutions, dtype=np.int64).reshape(self._p, m)
        self._live = np.array([i not in prog.zeroed for i in range(m)])
        self._tagged = np.array([i in prog.inclusion_tagged for i in range(m)])

    def _base_points_batch(self, pts):
        k = len(pts)
        m = self.base.arity
        col = 0
        x = np.ones((k, m), dtype=complex)
        if self._tag:
            y = pts[:, 0]
            col = 1
            x[:, self._tagged] *= y[:, None]
        if self._p:
            for j in range(self._p):
                z = pts[:, col + j]
                x *= z[:, None] ** self._costs[j][None, :]
        else:
            x[:, self._free] *= pts[:, col:]
        x[:, ~self._live] = 0
        return x

    def _batch(self, pts):
        return self.base.evaluate_batch(self._base_points_batch(pts))

    def _exact(self, point):
        m = self.base.arity
        col = 0
        x = [1] * m
        if self._tag:
            y = point[0]
            col = 1
            for i in self.prog.inclusion_tagged:
                x[i] = x[i] * y
        if self._p:
            for j, row in enumerate(self.prog.cost_substitutions):
                z = point[col + j]
                for i, c in enumerate(row):
                    if c and i not in self.prog.zeroed:
                        x[i] = x[i] * (z**c if c > 0 else Fraction(1) / z**(-c))
        else:
            for i, v in zip(self._free, point[col:]):
                x[i] = x[i] * v
        for i in self.prog.zeroed:
            x[i] = 0
        return self.base.evaluate_exact(x)


def transform(oracle: GenPolyOracle, prog: TransformProgram) -> TransformedOracle:
    return TransformedOracle(oracle, prog)
