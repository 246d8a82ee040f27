"""Exact elementary arithmetic underpinning the interval sieves.

Everything here is a pure function of its inputs.  Prime tables are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import MemoryBudgetError

# Inclusive cap on any sieved integer (window end plus largest offset).
MAX_SUPPORTED = 1 << 62
# Largest bound primes_up_to will sieve (~128 MiB of flags).
PRIME_SIEVE_CAP = 1 << 27
# Largest Mobius table (value array dominates memory).
MOBIUS_SIEVE_CAP = 1 << 26

# Witnesses making Miller-Rabin deterministic for n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test, exact far beyond the supported range."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class OffsetTuple:
    """Strictly increasing non-negative offsets defining a tuple pattern."""

    offsets: tuple[int, ...]

    def __post_init__(self):
        offs = tuple(int(o) for o in self.offsets)
        object.__setattr__(self, "offsets", offs)
        if not offs:
            raise ValueError("offset tuple must contain at least one offset")
        if offs[0] < 0:
            raise ValueError("offsets must be non-negative")
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise ValueError("offsets must be strictly increasing")
        if offs[-1] > MAX_SUPPORTED:
            raise ValueError("offsets exceed the supported range 2^62")

    @property
    def r(self) -> int:
        return len(self.offsets)

    @property
    def span(self) -> int:
        return self.offsets[-1] - self.offsets[0]

    def shifted(self, c: int) -> "OffsetTuple":
        return OffsetTuple(tuple(o + c for o in self.offsets))

    def __iter__(self):
        return iter(self.offsets)

    def __str__(self):
        return ";".join(str(o) for o in self.offsets)


def as_offsets(value) -> OffsetTuple:
    """Coerce an int or iterable of ints into an OffsetTuple."""
    if isinstance(value, OffsetTuple):
        return value
    if isinstance(value, int):
        return OffsetTuple((value,))
    return OffsetTuple(tuple(value))


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``bound``, ascending, as a read-only int64 array."""

    bound: int
    primes: np.ndarray

    def upto(self, limit) -> np.ndarray:
        """Read-only slice of the primes that are <= limit."""
        idx = int(np.searchsorted(self.primes, limit, side="right"))
        return self.primes[:idx]

    def __len__(self):
        return int(self.primes.size)


@lru_cache(maxsize=16)
def _sieve_primes(bound: int) -> np.ndarray:
    flags = np.ones(bound + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(bound) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    primes = np.flatnonzero(flags).astype(np.int64)
    primes.setflags(write=False)
    return primes


def primes_up_to(bound: int, *, cap: int = PRIME_SIEVE_CAP) -> PrimeTable:
    """Exact table of the primes in [2, bound]."""
    bound = int(bound)
    if bound < 1:
        raise ValueError("bound must be at least 1")
    if bound > cap:
        raise MemoryBudgetError(
            f"prime sieve bound {bound} exceeds the configured cap {cap}"
        )
    # Sieve to the next power of two so nearby requests share one cached array.
    bucket = 1 << (bound - 1).bit_length() if bound > 1 else 2
    if bucket > cap:
        bucket = bound
    primes = _sieve_primes(bucket)
    idx = int(np.searchsorted(primes, bound, side="right"))
    view = primes[:idx]
    view.setflags(write=False)
    return PrimeTable(bound=bound, primes=view)


@lru_cache(maxsize=8)
def _prime_list(bucket: int) -> tuple[int, ...]:
    return tuple(int(p) for p in primes_up_to(bucket).primes)


def _small_primes(bound: int) -> tuple[int, ...]:
    if bound < 2:
        return ()
    bucket = 1 << max(6, bound.bit_length())
    return _prime_list(bucket)


def _icbrt(n: int) -> int:
    c = round(n ** (1.0 / 3.0))
    while c > 0 and c * c * c > n:
        c -= 1
    while (c + 1) ** 3 <= n:
        c += 1
    return c


def squarefull_radical(k: int) -> int:
    """Product of the distinct primes whose square divides k; 1 iff k squarefree.

    Trial division stops at the cube root; whatever remains can contain a
    square factor only by being a perfect square itself.
    """
    k = int(k)
    if k < 1:
        raise ValueError("k must be a positive integer")
    result = 1
    m = k
    if k >= 8:
        for p in _small_primes(_icbrt(k)):
            if p * p * p > m:
                break
            if m % p == 0:
                m //= p
                if m % p == 0:
                    result *= p
                    m //= p
                    while m % p == 0:
                        m //= p
    s = math.isqrt(m)
    if s > 1 and s * s == m:
        result *= s
    return result


def is_squarefree(k: int) -> bool:
    return squarefull_radical(k) == 1


def squarefull_product(n: int, offsets) -> int:
    """Product of squarefull_radical(n + offset) over the pattern; 1 iff every
    shifted value is squarefree."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    l = as_offsets(offsets)
    result = 1
    for off in l.offsets:
        result *= squarefull_radical(n + off)
    return result


def is_tuple_squarefree(n: int, offsets) -> bool:
    """True iff n + offset is squarefree for every offset (early exit)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    l = as_offsets(offsets)
    return all(squarefull_radical(n + off) == 1 for off in l.offsets)


def residue_class_count(p: int, offsets) -> int:
    """Number of distinct residues of the offsets modulo p**2."""
    l = as_offsets(offsets)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    p2 = p * p
    return len({off % p2 for off in l.offsets})


def squarefree_prime_factors(d: int) -> list[int]:
    """Ascending prime factors of a squarefree d; rejects non-squarefree input."""
    d = int(d)
    if d < 1:
        raise ValueError("d must be a positive integer")
    factors = []
    m = d
    for p in _small_primes(math.isqrt(d)):
        if p * p > m:
            break
        if m % p == 0:
            m //= p
            if m % p == 0:
                raise ValueError(f"{d} is not squarefree")
            factors.append(p)
    if m > 1:
        s = math.isqrt(m)
        if s * s == m:
            raise ValueError(f"{d} is not squarefree")
        factors.append(m)
    return factors


def residue_class_count_squarefree(d: int, offsets) -> int:
    """Multiplicative extension of residue_class_count over squarefree d."""
    l = as_offsets(offsets)
    result = 1
    for p in squarefree_prime_factors(d):
        result *= residue_class_count(p, l)
    return result


def mobius_up_to(n: int, *, cap: int = MOBIUS_SIEVE_CAP) -> np.ndarray:
    """Mobius function on [0, n] as an int8 array (index 0 is 0)."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > cap:
        raise MemoryBudgetError(
            f"Mobius sieve bound {n} exceeds the configured cap {cap}"
        )
    mu = np.ones(n + 1, dtype=np.int8)
    mu[0] = 0
    dtype = np.int32 if n < 2**31 else np.int64
    val = np.arange(n + 1, dtype=dtype)
    for p in primes_up_to(math.isqrt(n)).primes.tolist() if n >= 4 else []:
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
        val[p::p] //= p
    # entries keeping a cofactor > 1 carry exactly one extra large prime
    mu[val > 1] *= -1
    return mu
