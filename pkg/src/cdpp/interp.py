"""Coefficient recovery for black-box polynomials.

``float_dft`` evaluates on a grid of roots of unity and inverts with an FFT;
``exact_lagrange`` evaluates at consecutive integer nodes and inverts with
Newton divided differences over the rationals.  Both check one held-out
point so that a violated degree bound is reported instead of silently
aliased.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.fft import next_fast_len

from .errors import DegreeExceeded, GridTooLarge, NegativeMass, NumericalResolutionExceeded

BACKENDS = ("float", "exact")
GRID_BUDGET = 10**8
NEG_TOL = 1e-6
RESIDUAL_TOL = 1e-6


def check_backend(backend: str) -> str:
    aliases = {"float_dft": "float", "exact_lagrange": "exact"}
    backend = aliases.get(backend, backend)
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    return backend


def _newton_to_monomial(nodes: Sequence[int], values: Sequence) -> list:
    """Monomial coefficients of the interpolant through (nodes, values)."""
    n = len(nodes)
    dd = list(values)
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            dd[i] = Fraction(dd[i] - dd[i - 1], nodes[i] - nodes[i - level])
    # Horner-style expansion of the Newton form
    coeffs = [Fraction(0)] * n
    coeffs[0] = dd[n - 1]
    deg = 0
    for i in range(n - 2, -1, -1):
        # coeffs <- coeffs * (x - nodes[i]) + dd[i]
        new = [Fraction(0)] * n
        for k in range(deg + 1):
            new[k + 1] += coeffs[k]
            new[k] -= coeffs[k] * nodes[i]
        new[0] += dd[i]
        coeffs = new
        deg += 1
    return [c.numerator if c.denominator == 1 else c for c in coeffs]


def _horner(coeffs, z):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _fft_size(degree: int) -> int:
    return int(next_fast_len(degree + 1))


def recover_univariate(fn: Callable, degree_bound: int, backend: str = "float",
                       *, first_node: int = 0):
    """Coefficients ``c_0..c_D`` of a polynomial of degree at most ``D``.

    ``fn`` receives a 1-D complex array of nodes (float backend) or a single
    int node (exact backend).  Returns a complex ndarray or a list of
    rationals.
    """
    backend = check_backend(backend)
    D = int(degree_bound)
    if D < 0:
        raise ValueError("degree bound must be nonnegative")
    if backend == "exact":
        nodes = list(range(first_node, first_node + D + 1))
        coeffs = _newton_to_monomial(nodes, [fn(t) for t in nodes])
        probe = first_node + D + 1
        if fn(probe) != _horner(coeffs, probe):
            raise DegreeExceeded(f"polynomial has degree above {D}")
        return coeffs
    N = _fft_size(D)
    nodes = np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.asarray(fn(nodes), dtype=complex)
    coeffs = np.fft.fft(vals) / N
    probe = np.exp(1j * np.pi / N)
    _check_residual(np.asarray(fn(np.array([probe])), dtype=complex)[0],
                    np.polynomial.polynomial.polyval(probe, coeffs), coeffs, D)
    return coeffs[:D + 1]


def _check_residual(actual, predicted, coeffs, D):
    scale = max(float(np.abs(coeffs).sum()), 1e-300)
    if abs(actual - predicted) > RESIDUAL_TOL * scale:
        raise DegreeExceeded(f"held-out residual {abs(actual - predicted):.3g} "
                             f"suggests degree above {D}")


def recover_multivariate(fn: Callable, degree_bounds: Sequence[int], backend: str = "float",
                         *, grid_budget: int = GRID_BUDGET, first_nodes: Sequence[int] | None = None):
    """Coefficient tensor of a polynomial with per-variable degree bounds.

    Entry ``[d_1, ..., d_p]`` is the coefficient of ``prod_j y_j ** d_j``.
    ``fn`` receives a (K, p) complex array (float backend) or a tuple of
    ints (exact backend).  Total work is ``prod(D_j + 1)`` evaluations.
    """
    backend = check_backend(backend)
    bounds = [int(d) for d in degree_bounds]
    if any(d < 0 for d in bounds):
        raise ValueError("degree bounds must be nonnegative")
    p = len(bounds)
    size = math.prod(d + 1 for d in bounds)
    if size > grid_budget:
        raise GridTooLarge(f"interpolation grid of {size} points exceeds budget {grid_budget}")
    if backend == "exact":
        starts = list(first_nodes) if first_nodes is not None else [0] * p
        axes = [list(range(s, s + d + 1)) for s, d in zip(starts, bounds)]
        tensor = np.empty([d + 1 for d in bounds], dtype=object)
        for idx in itertools.product(*(range(d + 1) for d in bounds)):
            tensor[idx] = fn(tuple(axes[j][i] for j, i in enumerate(idx)))
        for j in range(p):
            tensor = np.apply_along_axis(lambda v, nodes=axes[j]: np.array(
                _newton_to_monomial(nodes, list(v)), dtype=object), j, tensor)
        probe = tuple(a[-1] + 1 for a in axes)
        if p and fn(probe) != _eval_tensor_exact(tensor, probe):
            raise DegreeExceeded(f"polynomial exceeds degree bounds {bounds}")
        return tensor
    sizes = [_fft_size(d) for d in bounds]
    grids = [np.exp(2j * np.pi * np.arange(n) / n) for n in sizes]
    mesh = np.meshgrid(*grids, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=-1) if p else np.zeros((1, 0), dtype=complex)
    vals = np.asarray(fn(pts), dtype=complex).reshape(sizes)
    full = np.fft.fftn(vals) / math.prod(sizes) if p else vals
    probe = np.array([np.exp(1j * np.pi / n) for n in sizes], dtype=complex)
    if p:
        actual = np.asarray(fn(probe[None, :]), dtype=complex)[0]
        _check_residual(actual, _eval_tensor_float(full, probe), full, bounds)
    return full[tuple(slice(0, d + 1) for d in bounds)]


def _eval_tensor_float(tensor, point):
    out = tensor
    for z in reversed(point):
        out = np.polynomial.polynomial.polyval(z, np.moveaxis(out, -1, 0))
    return complex(out)


def _eval_tensor_exact(tensor, point):
    total = 0
    for idx in itertools.product(*(range(s) for s in tensor.shape)):
        c = tensor[idx]
        if c:
            term = c
            for z, d in zip(point, idx):
                term *= z**d
            total += term
    return total


def clean_nonnegative(coeffs, tol: float = NEG_TOL) -> np.ndarray:
    """Real parts of float coefficients of a nonnegative measure.

    Values in ``(-tol * max|c|, 0)`` are clamped to zero; anything more
    negative raises NegativeMass.
    """
    c = np.asarray(coeffs)
    real = c.real.astype(float)
    if real.size == 0:
        return real
    slack = tol * float(np.abs(c).max())
    if real.min() < -slack:
        raise NegativeMass(f"coefficient {real.min():.6g} is below the cleanup slack {-slack:.3g}")
    return np.where(real < 0, 0.0, real)


def round_to_integer(value: float, limit: float = 0.25) -> int:
    """Nearest integer, refusing when the float result is not clearly integral."""
    r = round(float(value))
    if abs(float(value) - r) > limit:
        raise NumericalResolutionExceeded(f"value {value!r} is not within {limit} of an integer")
    return int(r)
