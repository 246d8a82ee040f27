"""Exact removal-ledger decomposition of window counts.

Repeatedly trading the full squarefree condition on one coordinate for a
low-level condition plus removal rows gives the exact identity

    full count = base count - sum of ledger rows,

where the base count constrains every coordinate only below the chosen
cutoff and row (coord, q) counts the n whose coordinate is divisible by q^2
with q the smallest obstructing prime there, earlier coordinates already
reduced and later ones still fully squarefree.  Everything here is exact at
desk scale; the module also hosts the square-multiple scan used to study
how many moduli obstruct a short window.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arith import (
    MAX_SUPPORTED,
    as_offsets,
    primes_up_to,
    residue_class_count,
    squarefull_radical,
)
from .sieve import Window, as_window, count_tuples

# Total candidate scans allowed per decomposition.
LEDGER_WORK_CAP = 2_000_000


def _library_top(window: Window, offsets) -> float:
    """Safe full-squarefree level: 2 sqrt(window end + largest offset)."""
    return 2.0 * math.sqrt(window.end + offsets.offsets[-1])


@dataclass(frozen=True)
class MainTermEstimate:
    """Main-term data for the base count of a decomposition.

    ``density_product`` multiplies the window length for the expected base
    count; ``divisor_cap`` (the exact product of 1 + u(p) over p below the
    cutoff) bounds the absolute error; ``crude_cap`` is the weaker closed
    form (1 + r)^cutoff, reported alongside.
    """

    density_product: float
    divisor_cap: int
    crude_cap: float


def base_main_term(offsets, cutoff: float) -> MainTermEstimate:
    l = as_offsets(offsets)
    if cutoff < 2:
        raise ValueError("cutoff must be at least 2")
    bound = math.ceil(cutoff) - 1  # primes strictly below the cutoff
    ps = primes_up_to(bound).primes.tolist() if bound >= 2 else []
    product = 1.0
    cap = 1
    for p in ps:
        u = residue_class_count(p, l)
        product *= 1.0 - u / (p * p)  # a degenerate factor reports as 0
        cap *= 1 + u
    try:
        crude = math.exp(cutoff * math.log1p(l.r))
    except OverflowError:
        crude = math.inf
    return MainTermEstimate(product, cap, crude)


def _progression_count(window: Window, shift: int, modulus_sq: int) -> int:
    """#{n in (x, x+h] : modulus_sq | n + shift}."""
    lo = window.x + shift
    return (lo + window.h) // modulus_sq - lo // modulus_sq


def count_square_hits(window, offsets, coord: int, q_lo: float, q_hi: float) -> int:
    """Sum over primes q in [q_lo, q_hi) of #{n in window : q^2 | n + offset}.

    ``coord`` is 1-based.  Primes whose square exceeds every shifted window
    element contribute nothing and are skipped.
    """
    w = as_window(window)
    l = as_offsets(offsets)
    if not 1 <= coord <= l.r:
        raise ValueError("coordinate index out of range")
    off = l.offsets[coord - 1]
    bound = math.isqrt(w.end + off)
    if bound < 2 or q_lo >= q_hi:
        return 0
    ps = primes_up_to(bound).primes
    qs = ps[(ps >= q_lo) & (ps < q_hi)]
    if qs.size == 0:
        return 0
    q2 = qs * qs
    lo = w.x + off
    return int(np.sum((lo + w.h) // q2 - lo // q2))


def count_square_hits_split(window, offsets, coord: int, cutoff: float,
                            split_at: float) -> tuple[int, int]:
    """Split the square-hit sum at a threshold: primes in [cutoff, split_at)
    versus [split_at, top), where top is the library-safe full level."""
    w = as_window(window)
    l = as_offsets(offsets)
    top = _library_top(w, l)
    if not cutoff <= split_at <= top:
        raise ValueError("need cutoff <= split threshold <= 2*sqrt(window end + largest offset)")
    below = count_square_hits(w, l, coord, cutoff, split_at)
    above = count_square_hits(w, l, coord, split_at, top)
    return below, above


@dataclass(frozen=True)
class BuchstabReport:
    """Exact decomposition ledger for one window and offset pattern."""

    window: Window
    offsets: object
    cutoff: float
    base_count: int                      # count with every coordinate below the cutoff
    base_main: float                     # window length * density product
    base_error: float                    # |base_count - base_main|
    divisor_cap: int                     # proven cap on base_error
    ledger: tuple                        # rows (coord, q, removed) with removed-count > 0 range
    removed_total: int                   # sum of ledger rows
    per_coord_hits: tuple                # plain square-hit sums per coordinate
    removed_cap: int                     # r * max per-coordinate hit sum
    exact_count: int                     # fully squarefree count
    reconciliation: int                  # base_count - removed_total - exact_count


def _row_passes(n: int, offs: tuple, coord_idx: int, primes: list, prime_sqs: list,
                n_below_q: int, n_below_cutoff: int) -> bool:
    # coordinate under removal: no prime below q may contribute a square
    m = n + offs[coord_idx]
    for t in range(n_below_q):
        p2 = prime_sqs[t]
        if p2 > m:
            break
        if m % p2 == 0:
            return False
    # earlier coordinates: already reduced to the cutoff
    for j in range(coord_idx):
        m = n + offs[j]
        for t in range(n_below_cutoff):
            p2 = prime_sqs[t]
            if p2 > m:
                break
            if m % p2 == 0:
                return False
    # later coordinates: still fully squarefree
    for j in range(coord_idx + 1, len(offs)):
        if squarefull_radical(n + offs[j]) != 1:
            return False
    return True


def buchstab_decompose(window, offsets, cutoff: float, *,
                       work_cap: int = LEDGER_WORK_CAP) -> BuchstabReport:
    """Build the exact removal ledger; reconciliation must come out zero.

    Rows (coord, q) run over primes q from the cutoff up to the library-safe
    full level; rows whose q^2 exceeds every window element are identically
    zero and omitted from the ledger.
    """
    w = as_window(window)
    l = as_offsets(offsets)
    top = _library_top(w, l)
    if not 2.0 <= cutoff <= top:
        raise ValueError("cutoff must lie in [2, 2*sqrt(window end + largest offset)]")
    base_count = count_tuples(w, l, z=cutoff)
    exact = count_tuples(w, l)
    main = base_main_term(l, cutoff)

    table = primes_up_to(max(math.isqrt(w.end + l.offsets[-1]), 2))
    primes = table.primes.tolist()
    prime_sqs = [p * p for p in primes]
    n_below_cutoff = bisect_left(primes, cutoff)
    q_lo = math.ceil(cutoff)

    # candidate-work estimate before scanning
    work = 0
    for off in l.offsets:
        for q in primes:
            if q < q_lo:
                continue
            if q * q > w.end + off:
                break
            work += w.h // (q * q) + 1
    if work > work_cap:
        raise ValueError(
            f"window too large for an exact ledger ({work} candidate scans > cap {work_cap})"
        )

    rows = []
    removed_total = 0
    offs = l.offsets
    for coord_idx in range(l.r):
        off = offs[coord_idx]
        q_cap = math.isqrt(w.end + off)
        start_idx = bisect_left(primes, q_lo)
        for qi in range(start_idx, len(primes)):
            q = primes[qi]
            if q > q_cap:
                break
            q2 = prime_sqs[qi]
            n = w.x + 1 + ((-off - (w.x + 1)) % q2)
            removed = 0
            while n <= w.end:
                if _row_passes(n, offs, coord_idx, primes, prime_sqs, qi, n_below_cutoff):
                    removed += 1
                n += q2
            rows.append((coord_idx + 1, q, removed))
            removed_total += removed

    per_coord = tuple(
        count_square_hits(w, l, coord, cutoff, top) for coord in range(1, l.r + 1)
    )
    removed_cap = l.r * max(per_coord) if per_coord else 0
    return BuchstabReport(
        window=w,
        offsets=l,
        cutoff=float(cutoff),
        base_count=base_count,
        base_main=w.h * main.density_product,
        base_error=abs(base_count - w.h * main.density_product),
        divisor_cap=main.divisor_cap,
        ledger=tuple(rows),
        removed_total=removed_total,
        per_coord_hits=per_coord,
        removed_cap=removed_cap,
        exact_count=exact,
        reconciliation=base_count - removed_total - exact,
    )


@dataclass(frozen=True)
class SquareMultipleQuery:
    """Which moduli d in [d_lo, d_hi] have a multiple of d^2 inside (x, x+h]?"""

    x: int
    h: int
    d_lo: float
    d_hi: float

    def __post_init__(self):
        if self.x < 0:
            raise ValueError("window start must be non-negative")
        if self.h < 1:
            raise ValueError("window length must be positive")
        if self.x + self.h > MAX_SUPPORTED:
            raise ValueError("window exceeds the supported range 2^62")
        if self.d_lo < 1:
            raise ValueError("d_lo must be at least 1")
        if self.d_lo > self.d_hi:
            raise ValueError("d_lo must not exceed d_hi")


def count_square_multiples(query: SquareMultipleQuery, *, chunk: int = 1 << 22) -> int:
    """Exact count of integers d in [d_lo, d_hi] with floor((x+h)/d^2) > floor(x/d^2).

    Moduli with d^2 > x + h can never qualify, so the scan stops there.
    """
    lo = math.ceil(query.d_lo)
    hi = min(math.floor(query.d_hi), math.isqrt(query.x + query.h))
    total = 0
    top = query.x + query.h
    a = lo
    while a <= hi:
        b = min(a + chunk - 1, hi)
        d = np.arange(a, b + 1, dtype=np.int64)
        d2 = d * d
        total += int(np.count_nonzero(top // d2 > query.x // d2))
        a = b + 1
    return total


def _parse_growth(choice):
    if isinstance(choice, tuple):
        kind, c = choice
        return str(kind), float(c)
    text = str(choice)
    if text.startswith("const:"):
        return "const", float(text.split(":", 1)[1])
    if text in ("loglog", "pow23"):
        return text, None
    raise ValueError(f"unknown growth kind {text!r}; use loglog, pow23 or const:C")


@dataclass(frozen=True)
class AsymptoticParameters:
    """Cutoff and minimal window length for the asymptotic counting regime."""

    growth_value: float            # the chosen slowly growing function at x
    cutoff: float                  # exp(10 sqrt(r)) * growth value
    min_window: float              # cutoff * x^(1/5) * log x
    growth_ok: bool                # 2 <= growth <= e^-10 (log x)^(2/3)
    scale_ok: bool                 # exp(10 sqrt(r)) <= (log x)^(2/3) / growth

    @property
    def hypotheses_ok(self) -> bool:
        return self.growth_ok and self.scale_ok


def asymptotic_parameters(x: float, r: int, growth="loglog") -> AsymptoticParameters:
    """Evaluate the asymptotic-regime parameters and report whether its
    hypotheses hold at this x (they fail for every desk-scale x)."""
    if x < math.e ** math.e:
        raise ValueError("x must be at least e^e")
    if r < 1:
        raise ValueError("tuple size must be at least 1")
    kind, c = _parse_growth(growth)
    lx = math.log(x)
    if kind == "loglog":
        psi = math.log(lx)
    elif kind == "pow23":
        psi = math.exp(-10.0) * lx ** (2.0 / 3.0)
    else:
        psi = c
    scale = math.exp(10.0 * math.sqrt(r))
    cutoff = scale * psi
    min_window = cutoff * x ** 0.2 * lx
    growth_ok = 2.0 <= psi <= math.exp(-10.0) * lx ** (2.0 / 3.0)
    scale_ok = scale <= lx ** (2.0 / 3.0) / psi
    return AsymptoticParameters(psi, cutoff, min_window, growth_ok, scale_ok)
