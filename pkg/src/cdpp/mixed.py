"""Mixed discriminants and mixed characteristic polynomials.

Convention: ``D(A_1..A_d) = (1/d!) d^d/dz_1..dz_d det(sum z_i A_i)``, so that
``D(A, ..., A) = det(A)`` and ``d! D(v_1 v_1^T, ...) = det(sum v_i v_i^T)``.

The mixed characteristic polynomial is
``prod_i (1 - d/dz_i) det(x I + sum z_i A_i) |_{z=0}``; its coefficient of
``x^(d-k)`` is ``(-1)^k sum_{|S|=k} Dk(A_S)`` where the restricted
discriminant ``Dk(A_1..A_k) = d!/(d-k)! * D(A_1..A_k, I, ..., I)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .counting import PartitionFamily, ecount, partition_count
from .errors import CostBudgetExceeded, DimensionBudgetExceeded, DimensionMismatch, TooLarge
from .genpoly import dpp_oracle
from .interp import GRID_BUDGET
from .linalg import pivoted_cholesky, validate_psd

__all__ = [
    "MixedCharCoeffs", "mixed_discriminant_bruteforce", "mixed_disc_via_ecount",
    "restricted_mixed_disc", "mixed_char_top_coeffs", "block_reduction_sum",
    "mixed_char_bruteforce",
]

MAX_BRUTE_DIM = 8
MAX_CHAR_M = 4
MAX_CHAR_D = 4


def _matrix_tuple(mats, d: int | None = None) -> list[np.ndarray]:
    out = [np.asarray(a, dtype=float) for a in mats]
    for a in out:
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch("every matrix must be square")
    dims = {a.shape[0] for a in out}
    if d is not None:
        dims.add(d)
    if len(dims) > 1:
        raise DimensionMismatch(f"matrices of differing dimensions {sorted(dims)}")
    for a in out:
        validate_psd(a)
    return out


def _rank_one_vectors(a: np.ndarray) -> np.ndarray:
    """Rows ``v`` with ``a = sum v v^T``."""
    return pivoted_cholesky(a).T


def mixed_discriminant_bruteforce(mats: Sequence) -> float:
    """``D(A_1..A_d)`` by polarization: ``(1/d!) sum_S (-1)^(d-|S|) det(sum_{i in S} A_i)``."""
    As = [np.asarray(a, dtype=float) for a in mats]
    d = len(As)
    if any(a.shape != (d, d) for a in As):
        raise DimensionMismatch("need exactly d matrices of size d x d")
    if d > MAX_BRUTE_DIM:
        raise DimensionBudgetExceeded(f"polarization supports d <= {MAX_BRUTE_DIM}")
    if d == 0:
        return 1.0
    stack = np.stack(As)
    masks = np.array(list(itertools.product((0, 1), repeat=d)), dtype=float)
    sums = np.einsum("si,ijk->sjk", masks, stack)
    signs = (-1.0) ** (d - masks.sum(axis=1))
    return float(signs @ np.linalg.det(sums)) / math.factorial(d)


def mixed_disc_via_ecount(mats: Sequence, grid_budget: int = GRID_BUDGET) -> float:
    """``D(A_1..A_n)`` as an exact-cost count over rank-one pieces.

    Each ``A_i`` is split into rank-one terms forming block ``i`` of the ground
    set.  Block ``i`` costs ``B^i`` per element with ``B`` larger than any block,
    so cost exactly ``sum_i B^i`` means one element per block; the determinantal
    mass of those sets is ``n! D``.
    """
    As = _matrix_tuple(mats)
    n = len(As)
    if any(a.shape[0] != n for a in As):
        raise DimensionMismatch("need exactly n matrices of size n x n")
    if n == 0:
        return 1.0
    blocks = [_rank_one_vectors(a) for a in As]
    if any(len(b) == 0 for b in blocks):
        return 0.0
    base = n * n + 1
    costs = [base**i for i, b in enumerate(blocks) for _ in range(len(b))]
    if sum(costs) + 1 > grid_budget:
        raise CostBudgetExceeded(f"cost total {sum(costs)} exceeds the interpolation budget")
    target = sum(base**i for i in range(n))
    mass = ecount(dpp_oracle(np.vstack(blocks)), costs, target, "float").value
    return float(mass) / math.factorial(n)


def restricted_mixed_disc(mats: Sequence, d: int | None = None) -> float:
    """``Dk(A_1..A_k) = d!/(d-k)! D(A_1..A_k, I, ..., I)`` via a partition count.

    Ground set: the rank-one pieces of every ``A_i`` (one block each) plus the
    ``d`` unit vectors.  Taking one piece per block and ``d-k`` unit vectors,
    the determinantal mass adds up to ``Dk`` exactly.
    """
    As = _matrix_tuple(mats, d)
    if d is None:
        if not As:
            raise ValueError("dimension d is required for an empty tuple")
        d = As[0].shape[0]
    k = len(As)
    if k > d:
        raise DimensionMismatch(f"{k} matrices exceed dimension {d}")
    if k == 0:
        return 1.0
    blocks = [_rank_one_vectors(a) for a in As]
    if any(len(b) == 0 for b in blocks):
        return 0.0
    blocks.append(np.eye(d))
    feats = np.vstack(blocks)
    parts, start = [], 0
    for b in blocks:
        parts.append(range(start, start + len(b)))
        start += len(b)
    fam = PartitionFamily(tuple(parts), (1,) * k + (d - k,))
    return float(partition_count(dpp_oracle(feats), fam, "float").value)


@dataclass(frozen=True)
class MixedCharCoeffs:
    """``coeffs[k]`` is the coefficient of ``x^(d-k)``."""

    d: int
    coeffs: tuple

    def polynomial(self) -> np.ndarray:
        """Descending-power coefficient array (``np.polyval`` order), zero-padded to degree d."""
        out = np.zeros(self.d + 1)
        out[: len(self.coeffs)] = self.coeffs
        return out


def mixed_char_top_coeffs(mats: Sequence, k_max: int | None = None, d: int | None = None) -> MixedCharCoeffs:
    """Coefficients of ``x^d .. x^(d-k_max)`` of the mixed characteristic polynomial.

    Subsets larger than ``m`` contribute nothing (equivalently, the tuple is
    padded with zero matrices up to ``d``).
    """
    As = _matrix_tuple(mats, d)
    if d is None:
        if not As:
            raise ValueError("dimension d is required for an empty tuple")
        d = As[0].shape[0]
    k_max = d if k_max is None else int(k_max)
    if not 0 <= k_max <= d:
        raise ValueError(f"k_max must lie in 0..{d}")
    coeffs = [1.0]
    for k in range(1, k_max + 1):
        total = sum(restricted_mixed_disc([As[i] for i in S], d)
                    for S in itertools.combinations(range(len(As)), k))
        coeffs.append((-1) ** k * float(total))
    return MixedCharCoeffs(d, tuple(coeffs))


def block_reduction_sum(mats: Sequence, k: int) -> float:
    """``sum_{|S|=k} Dk(A_S)`` from one mixed discriminant of dimension ``m+d-k``.

    ``B_i = A_i (+) I_{m-k}`` for every ``i <= m`` and ``I_d (+) 0`` for the
    remaining ``d-k`` slots.
    """
    As = _matrix_tuple(mats)
    m = len(As)
    if m == 0:
        raise ValueError("need at least one matrix")
    d = As[0].shape[0]
    if not 0 <= k <= d:
        raise ValueError(f"k must lie in 0..{d}")
    if k > m:
        return 0.0
    size = m + d - k
    if size > MAX_BRUTE_DIM:
        raise DimensionBudgetExceeded(f"block dimension {size} exceeds {MAX_BRUTE_DIM}")
    pad = m - k

    def block(top, bottom):
        out = np.zeros((size, size))
        out[:d, :d] = top
        out[d:, d:] = bottom
        return out

    Bs = [block(a, np.eye(pad)) for a in As] + [block(np.eye(d), np.zeros((pad, pad)))] * (d - k)
    unnormalized = math.factorial(size) * mixed_discriminant_bruteforce(Bs)
    return unnormalized / (math.factorial(pad) * math.factorial(d - k))


def mixed_char_bruteforce(mats: Sequence, d: int | None = None) -> MixedCharCoeffs:
    """Full mixed characteristic polynomial straight from its differential definition.

    ``det(x I + sum z_i A_i)`` has degree <= d in each variable, so all its
    coefficients come from one FFT over a ``(d+1)^(m+1)`` grid of roots of
    unity; ``prod (1 - d/dz_i)`` at ``z = 0`` keeps the multilinear
    ``z``-coefficients with sign ``(-1)^|S|``.
    """
    As = _matrix_tuple(mats, d)
    if d is None:
        if not As:
            raise ValueError("dimension d is required for an empty tuple")
        d = As[0].shape[0]
    m = len(As)
    if m > MAX_CHAR_M or d > MAX_CHAR_D:
        raise TooLarge(f"brute-force expansion supports m <= {MAX_CHAR_M}, d <= {MAX_CHAR_D}")
    n = d + 1
    roots = np.exp(2j * np.pi * np.arange(n) / n)
    grid = np.stack(np.meshgrid(*([roots] * (m + 1)), indexing="ij"), axis=-1).reshape(-1, m + 1)
    mats_ = grid[:, 0, None, None] * np.eye(d)
    for i, a in enumerate(As):
        mats_ = mats_ + grid[:, i + 1, None, None] * a
    vals = np.linalg.det(mats_).reshape((n,) * (m + 1))
    coef = np.fft.fftn(vals) / n ** (m + 1)
    out = np.zeros(d + 1)
    for S in itertools.product((0, 1), repeat=m):
        out += (-1) ** sum(S) * coef[(slice(None),) + S].real
    # out[j] is the coefficient of x^j; report by descending power
    return MixedCharCoeffs(d, tuple(float(v) for v in out[::-1]))
