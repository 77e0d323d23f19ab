"""Constrained determinantal point processes.

``mu(S) = det(L[S, S])`` restricted to a linear family.  Kernels can be given
as ``L`` or as a feature matrix ``V`` with ``L = V V^T``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .counting import BudgetConstraint, Family, LinearFamily, Mass, conditioned_mass
from .errors import ArityMismatch
from .genpoly import GenPolyOracle, cholesky_factor, dpp_oracle, kernel_oracle
from .interp import check_backend
from .linalg import is_exact_scalar, validate_psd
from .sampling import SampleOutcome, Sampler

__all__ = ["ConstrainedDPP", "dpp_count", "dpp_sample", "validate_psd"]


def _is_exact(matrix) -> bool:
    return isinstance(matrix, (list, tuple)) and all(is_exact_scalar(x) for row in matrix for x in row)


@dataclass(frozen=True)
class ConstrainedDPP:
    """A DPP together with the constraint family its samples must satisfy.

    The oracle is chosen from the arithmetic mode: float mode factors ``L``
    (pivoted Cholesky) and evaluates ``det(I + V^T X V)``; exact mode
    evaluates ``det(I + X L)`` directly so rational kernels stay rational.
    """

    kernel: object = None
    features: object = None
    family: Family | None = None
    backend: str = "float"
    oracle: GenPolyOracle = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "backend", check_backend(self.backend))
        if (self.kernel is None) == (self.features is None):
            raise ValueError("give exactly one of kernel or features")
        if self.kernel is not None:
            validate_psd(self.kernel)
            if self.backend == "exact" and _is_exact(self.kernel):
                oracle = kernel_oracle(self.kernel)
            else:
                oracle = dpp_oracle(cholesky_factor(self.kernel))
        else:
            feats = self.features if _is_exact(self.features) else np.asarray(self.features, dtype=float)
            oracle = dpp_oracle(feats)
        object.__setattr__(self, "oracle", oracle)
        fam = self.family if self.family is not None else LinearFamily.unconstrained(oracle.arity)
        if fam.m != oracle.arity:
            raise ArityMismatch(f"family over {fam.m} elements for a kernel of size {oracle.arity}")
        object.__setattr__(self, "family", fam)

    @property
    def m(self) -> int:
        return self.oracle.arity

    @property
    def factor(self) -> np.ndarray:
        if self.features is not None:
            return np.asarray(self.features, dtype=float)
        return cholesky_factor(self.kernel)

    def count(self) -> Mass:
        return dpp_count(self)

    def sample(self, seed=None, n_samples: int = 1) -> list[SampleOutcome]:
        return dpp_sample(self, seed, n_samples)


def dpp_count(dpp: ConstrainedDPP) -> Mass:
    """``sum_{T in family} det(L[T, T])``."""
    return conditioned_mass(dpp.oracle, dpp.family, dpp.backend)


def dpp_sample(dpp: ConstrainedDPP, seed=None, n_samples: int = 1) -> list[SampleOutcome]:
    """``n_samples`` i.i.d. draws, each from its own seed derived from ``seed``."""
    draws = Sampler(dpp.oracle, dpp.family, dpp.backend).draw_many(n_samples, seed)
    for d in draws:
        if not dpp.family.contains(d.subset):
            raise RuntimeError(f"sampled set {sorted(d.subset)} violates the constraints")
    return draws


def budget_dpp(kernel, c, C, backend: str = "float") -> ConstrainedDPP:
    return ConstrainedDPP(kernel=kernel, family=BudgetConstraint(tuple(c), C), backend=backend)
