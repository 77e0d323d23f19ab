"""Small dense linear-algebra kernels shared by the engine.

Exact routines work on nested lists of ``int`` or ``Fraction``; float routines
on numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import NotPSD, NotSymmetric

# pivot threshold relative to max |L_ij|
PSD_TOL = 1e-10
SYMMETRY_TOL = 1e-9


def is_exact_scalar(x) -> bool:
    return isinstance(x, (int, Rational)) and not isinstance(x, bool)


def to_fraction(x) -> Fraction:
    """Exact rational value of ``x`` (floats convert to their dyadic value)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(float(x))


def to_exact_matrix(a) -> list[list]:
    """Nested-list copy of ``a`` with int entries kept as int, others as Fraction."""
    out = []
    for row in a:
        r = []
        for x in row:
            if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
                r.append(int(x))
            else:
                f = to_fraction(x)
                r.append(int(f) if f.denominator == 1 else f)
        out.append(r)
    return out


def bareiss_det(a) -> int | Fraction:
    """Fraction-free Gaussian elimination (Bareiss) on a square matrix.

    Integer inputs stay in integers throughout; every intermediate is a
    minor of the input, so there is no denominator growth.
    """
    m = [list(row) for row in a]
    n = len(m)
    if n == 0:
        return 1
    integral = all(isinstance(x, int) for row in m for x in row)
    if not integral:
        m = [[to_fraction(x) for x in row] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            lead = ri[k]
            for j in range(k + 1, n):
                num = ri[j] * pivot - lead * rk[j]
                ri[j] = num // prev if integral else num / prev
            ri[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def exact_rank(a) -> int:
    """Rank over the rationals by plain Gaussian elimination."""
    m = [[to_fraction(x) for x in row] for row in a]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rows):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


@dataclass(frozen=True)
class PSDReport:
    ok: bool
    min_eigenvalue: float
    symmetry_defect: float
    tolerance: float


def validate_psd(kernel, tol: float = PSD_TOL) -> PSDReport:
    """Check symmetry and positive semidefiniteness of a kernel matrix.

    Raises NotSymmetric or NotPSD; otherwise returns the diagnostics.
    """
    L = np.asarray(kernel, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1] or L.shape[0] < 1:
        raise NotSymmetric(f"kernel must be a non-empty square matrix, got shape {L.shape}")
    scale = max(float(np.abs(L).max()), 1e-300)
    defect = float(np.abs(L - L.T).max())
    if defect > SYMMETRY_TOL * scale:
        raise NotSymmetric(f"symmetry defect {defect:.3g} exceeds tolerance")
    lam = float(np.linalg.eigvalsh((L + L.T) / 2).min())
    threshold = tol * scale
    if lam < -threshold:
        raise NotPSD(f"minimum eigenvalue {lam:.6g} below -{threshold:.3g}")
    return PSDReport(True, lam, defect, threshold)


def pivoted_cholesky(kernel, tol: float = PSD_TOL) -> np.ndarray:
    """Factor a PSD matrix as ``L = V V^T`` with diagonal pivoting.

    Returns ``V`` of shape (m, rank); rows stay in the original order.
    Elimination stops once the largest remaining diagonal entry falls below
    ``tol * max|L|``.
    """
    L = np.array(kernel, dtype=float)
    m = L.shape[0]
    scale = float(np.abs(L).max()) if L.size else 0.0
    threshold = tol * scale
    residual_diag = L.diagonal().copy()
    pivoted = np.zeros(m, dtype=bool)
    cols = []
    for _ in range(m):
        p = int(np.argmax(residual_diag))
        piv = residual_diag[p]
        if residual_diag.min() < -threshold:
            raise NotPSD(f"negative pivot {residual_diag.min():.6g} during factorization")
        if piv <= threshold:
            break
        col = L[:, p].copy()
        for c in cols:
            col -= c * c[p]
        col /= np.sqrt(piv)
        col[pivoted] = 0.0
        pivoted[p] = True
        cols.append(col)
        residual_diag = residual_diag - col**2
        residual_diag[pivoted] = 0.0
    if not cols:
        return np.zeros((m, 0))
    return np.stack(cols, axis=1)
