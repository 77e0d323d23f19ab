"""Exact sampling by sequential conditioning, and the reverse estimator.

The sampler walks elements ``0..m-1`` in order.  At element ``e`` with
decisions ``Y`` (taken) and ``N`` (rejected) so far, it includes ``e`` with
probability ``mass(Y + e, N) / mass(Y, N)`` where ``mass(Y, N)`` is the
family mass of sets containing ``Y`` and avoiding ``N``
(:func:`cdpp.counting.conditioned_mass`).
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .counting import Family, conditioned_mass
from .errors import NonConvergence, NullMass, NumericalResolutionExceeded
from .genpoly import GenPolyOracle
from .interp import check_backend

PROB_SLACK = 1e-9
SNAP = 1e-12


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _clamp_probability(p, backend):
    if backend == "exact":
        return p
    if p < -PROB_SLACK or p > 1 + PROB_SLACK:
        raise NumericalResolutionExceeded(f"conditional probability {p!r} outside [0, 1]")
    if p < SNAP:
        return 0.0
    if p > 1 - SNAP:
        return 1.0
    return float(p)


def _ratio(num, den, backend):
    if den <= 0:
        raise NullMass("conditioning on an event of zero mass")
    if backend == "exact":
        return Fraction(num) / Fraction(den)
    return _clamp_probability(num / den, backend)


def conditional_inclusion_prob(oracle: GenPolyOracle, fam: Family, Y: Iterable[int],
                               N: Iterable[int], e: int, backend: str = "float"):
    """``P(e in S | Y <= S, S & N = {})`` for ``S`` drawn from the family-restricted measure."""
    backend = check_backend(backend)
    Y, N = frozenset(Y), frozenset(N)
    if Y & N:
        raise ValueError("Y and N must be disjoint")
    if e in Y:
        return Fraction(1) if backend == "exact" else 1.0
    if e in N:
        return Fraction(0) if backend == "exact" else 0.0
    den = conditioned_mass(oracle, fam, backend, forced_in=Y, forced_out=N).value
    num = conditioned_mass(oracle, fam, backend, forced_in=Y | {e}, forced_out=N).value
    return _ratio(num, den, backend)


@dataclass(frozen=True)
class SampleOutcome:
    """A drawn set with the inclusion probability used at every decision."""

    subset: frozenset
    probabilities: tuple
    seed: int | None = None

    def chain_probability(self):
        prob = 1
        for e, p in enumerate(self.probabilities):
            prob *= p if e in self.subset else 1 - p
        return prob


def _mask_to_set(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


class Sampler:
    """Exact sampler for one (oracle, family) pair.

    Conditional masses are memoized per decision prefix, so repeated draws
    only pay for prefixes not seen before.  The memo is guarded by a lock.
    ``forced_out`` restricts every draw to subsets of the complement.
    ``memo`` may be shared between samplers of the same oracle, family and
    backend: its keys are (forced-in, forced-out) bitmasks.
    """

    def __init__(self, oracle: GenPolyOracle, fam: Family, backend: str = "float",
                 forced_out: Iterable[int] = (), memo: dict | None = None):
        self.oracle = oracle
        self.family = fam
        self.backend = check_backend(backend)
        self.m = oracle.arity
        self.forced_out = frozenset(forced_out)
        self._out_mask = sum(1 << i for i in self.forced_out)
        self._masses: dict = {} if memo is None else memo
        self._probs: dict = {}
        self._lock = threading.Lock()
        self.total = self._mass(0, self._out_mask)
        if self.total <= 0:
            raise NullMass("the constrained family has zero total mass")

    def _mass(self, ymask: int, nmask: int):
        key = (ymask, nmask)
        with self._lock:
            if key in self._masses:
                return self._masses[key]
        val = conditioned_mass(self.oracle, self.family, self.backend,
                               forced_in=_mask_to_set(ymask), forced_out=_mask_to_set(nmask)).value
        with self._lock:
            self._masses[key] = val
        return val

    def probability(self, e: int, ymask: int):
        """Inclusion probability of ``e`` after deciding elements ``0..e-1`` as ``ymask``."""
        key = (e, ymask)
        with self._lock:
            if key in self._probs:
                return self._probs[key]
        if e in self.forced_out:
            p = Fraction(0) if self.backend == "exact" else 0.0
        else:
            nmask = (((1 << e) - 1) & ~ymask) | self._out_mask
            den = self._mass(ymask, nmask)
            num = self._mass(ymask | 1 << e, nmask)
            p = _ratio(num, den, self.backend)
            if self.backend == "exact":
                # exact arithmetic: the exclusion branch needs no new interpolation
                with self._lock:
                    self._masses.setdefault((ymask, nmask | 1 << e), den - num)
        with self._lock:
            self._probs[key] = p
        return p

    def draw(self, seed=None) -> SampleOutcome:
        rng = _rng(seed)
        ymask = 0
        probs = []
        for e in range(self.m):
            p = self.probability(e, ymask)
            probs.append(p)
            if rng.random() < p:
                ymask |= 1 << e
        return SampleOutcome(_mask_to_set(ymask), tuple(probs),
                             seed if isinstance(seed, (int, np.integer)) else None)

    def draw_many(self, n: int, seed=None) -> list[SampleOutcome]:
        """``n`` independent draws, each from its own seed derived from ``seed``."""
        children = np.random.SeedSequence(seed).spawn(n)
        out = []
        for child in children:
            s = int(child.generate_state(1, np.uint64)[0])
            out.append(self.draw(s))
        return out

    def draw_masks(self, n: int, seed=None) -> np.ndarray:
        """``n`` draws as int64 bitmasks, vectorized level by level."""
        rng = _rng(seed)
        masks = np.zeros(n, dtype=np.int64)
        for e in range(self.m):
            if e in self.forced_out:
                continue
            nodes, inverse = np.unique(masks, return_inverse=True)
            probs = np.array([float(self.probability(e, int(y))) for y in nodes])
            take = rng.random(n) < probs[inverse]
            masks[take] |= 1 << e
        return masks

    def chain_probability(self, subset: Iterable[int]):
        """Probability that a draw returns exactly ``subset``."""
        s = frozenset(subset)
        ymask = 0
        prob = Fraction(1) if self.backend == "exact" else 1.0
        for e in range(self.m):
            p = self.probability(e, ymask)
            if e in s:
                prob *= p
                ymask |= 1 << e
            else:
                prob *= 1 - p
            if prob == 0:
                break
        return prob


def sample(oracle: GenPolyOracle, fam: Family, rng_seed=None, backend: str = "float") -> SampleOutcome:
    return Sampler(oracle, fam, backend).draw(rng_seed)


@dataclass(frozen=True)
class MassEstimate:
    value: float
    removed: tuple
    final_set: frozenset
    samples_used: int


def estimate_mass_via_sampler(oracle: GenPolyOracle, fam: Family, eps: float, seed=None,
                              backend: str = "float", samples_per_step: int | None = None,
                              memo: dict | None = None) -> MassEstimate:
    """Approximate the family mass using only conditioned samples.

    Shrinks ``U`` one element at a time, always removing the element with the
    largest estimated ``P(e not in S | S <= U)`` (re-estimated on a fresh
    batch), until ``S = U`` dominates the conditioned distribution.  The mass
    is then ``mu(U) / (q_U * prod rho_e)``, with ``q_U`` the estimate of
    ``P(S = U | S <= U)``.  Pass the same ``memo`` dict to repeated calls on
    one instance to reuse conditioned counts.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    rng = _rng(seed)
    m = oracle.arity
    n_batch = samples_per_step or math.ceil(16 * max(m, 1) / eps**2)
    U = set(range(m))
    product = 1.0
    removed = []
    used = 0
    memo = {} if memo is None else memo
    for _ in range(m + 1):
        sampler = Sampler(oracle, fam, backend, forced_out=set(range(m)) - U, memo=memo)
        u_mask = sum(1 << i for i in U)
        batch = sampler.draw_masks(n_batch, rng)
        used += n_batch
        q_hat = float(np.mean(batch == u_mask))
        if q_hat > 1 - 1 / (2 * max(m, 1)):
            mu_u = conditioned_mass(oracle, fam, backend, forced_in=U,
                                    forced_out=set(range(m)) - U).value
            return MassEstimate(float(mu_u) / (q_hat * product), tuple(removed), frozenset(U), used)
        absent = {e: float(np.mean((batch >> e) & 1 == 0)) for e in U}
        e = max(absent, key=lambda k: (absent[k], -k))
        if absent[e] < 1 / (2 * m * m):
            raise NonConvergence(f"no removable element found (best estimate {absent[e]:.3g})")
        fresh = sampler.draw_masks(n_batch, rng)
        used += n_batch
        rho = float(np.mean((fresh >> e) & 1 == 0))
        if rho == 0:
            raise NonConvergence(f"estimate for element {e} collapsed to zero")
        product *= rho
        removed.append(e)
        U.discard(e)
    raise NonConvergence("estimator did not terminate within m iterations")
