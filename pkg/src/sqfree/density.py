"""Certified enclosures for the density constant of an offset pattern.

The density of n with every n + offset squarefree is the product over all
primes p of (1 - u(p)/p^2), where u(p) counts the distinct offset residues
modulo p^2.  We bracket it rigorously: the partial product up to a prime
cutoff from above, and the same product damped by a proven tail bound from
below.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .arith import as_offsets, primes_up_to, residue_class_count
from .errors import DegenerateTupleError

DEFAULT_PRIME_CUTOFF = 10_000_000

# Log-space widening applied per retained factor to absorb float rounding.
FLOAT_SLOP_PER_FACTOR = 10.0 * sys.float_info.epsilon


@dataclass(frozen=True)
class EulerEstimate:
    """Rigorous bracket [lower, upper] for the density of a tuple pattern.

    ``tail_log_bound`` is the total log-space width: the proven bound on the
    omitted prime tail plus the accumulated rounding slop, so that
    upper/lower <= exp(tail_log_bound) whenever the density is nonzero.
    """

    lower: float
    upper: float
    prime_cutoff: int
    tail_log_bound: float
    degenerate_zero: bool = False

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def density_constant(offsets, prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> EulerEstimate:
    """Bracket the infinite product of local densities (1 - u(p)/p^2).

    Factors are accumulated in log space with exactly rounded summation.
    The omitted tail over primes beyond the cutoff is covered by
    2r/(prime_cutoff - 1): each omitted factor satisfies
    -log(1 - u(p)/p^2) <= 2r/p^2 (valid since p > cutoff >= 2r forces
    u(p)/p^2 < 1/2), and the sum of 1/p^2 over p > cutoff is below
    1/(cutoff - 1).
    """
    l = as_offsets(offsets)
    r = l.r
    cutoff = int(prime_cutoff)
    if cutoff < 2 * r:
        raise ValueError("prime_cutoff must be at least twice the tuple size")
    ps = primes_up_to(cutoff).primes
    # u(p) can fall short of r (offset collisions) only when p^2 <= span, and
    # can reach the degenerate value p^2 only when p^2 <= r.
    explicit_bound = math.isqrt(max(l.span, r))
    split = int(np.searchsorted(ps, explicit_bound, side="right"))
    logs = []
    for p in ps[:split].tolist():
        u = residue_class_count(p, l)
        if u == p * p:
            return EulerEstimate(0.0, 0.0, cutoff, 0.0, True)
        logs.append(math.log1p(-u / (p * p)))
    bulk = ps[split:].astype(np.float64)
    if bulk.size:
        logs.extend(np.log1p(-r / (bulk * bulk)).tolist())
    total = math.fsum(logs)
    slop = FLOAT_SLOP_PER_FACTOR * len(logs)
    tail = 2.0 * r / (cutoff - 1.0)
    upper = min(1.0, math.exp(total + slop))
    lower = math.exp(total - tail - 2.0 * slop)
    return EulerEstimate(lower, upper, cutoff, tail + 3.0 * slop, False)


@dataclass(frozen=True)
class InverseDensityBound:
    """Numeric check that the inverse density stays below exp(9 sqrt(r))."""

    inverse_upper: float
    cap: float
    holds: bool
    estimate: EulerEstimate


def inverse_density_cap(r: int) -> float:
    """The uniform cap exp(9 sqrt(r)) on the inverse density of an r-pattern."""
    return math.exp(9.0 * math.sqrt(r))


def certify_inverse_bound(offsets, prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> InverseDensityBound:
    l = as_offsets(offsets)
    est = density_constant(l, prime_cutoff)
    if est.degenerate_zero:
        raise DegenerateTupleError(
            "density is exactly zero; the inverse bound is not applicable"
        )
    inverse_upper = 1.0 / est.lower
    cap = inverse_density_cap(l.r)
    return InverseDensityBound(inverse_upper, cap, inverse_upper <= cap, est)
