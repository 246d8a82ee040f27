"""Optimal square-detecting sieve weights and certified upper bounds.

A weight system at level z assigns a real weight to every squarefree d <= z
with weight(1) = 1, chosen to minimize the quadratic form

    V = sum over d1, d2 of weight(d1) weight(d2) u(lcm) / lcm^2

whose value governs the main term of the resulting upper bound on window
counts.  The minimizer has a closed form built from the normalizing sums
below, and the minimal V equals the reciprocal of the normalizing sum at the
level itself.  Levels up to EXACT_LEVEL_CAP run in exact rational
arithmetic; larger levels fall back to floats with exactly rounded sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .arith import as_offsets, primes_up_to, residue_class_count
from .density import DEFAULT_PRIME_CUTOFF, EulerEstimate, density_constant
from .errors import DegenerateTupleError
from .sieve import Window, as_window, count_congruent, count_tuples

Number = Union[Fraction, float]

LEVEL_CAP = 10_000.0
EXACT_LEVEL_CAP = 100.0


def _floor_ratio(level: float, d: int) -> int:
    # float division can round across an integer; Fractions cannot
    return int(Fraction(level) / d)


class _LocalData:
    """Per-(offsets, level) tables: residue counts, smallest prime factors,
    and the multiplicative local factors u(p) / (p^2 - u(p))."""

    def __init__(self, offsets, zi: int, exact: bool):
        self.offsets = as_offsets(offsets)
        self.zi = zi
        self.exact = exact
        one = Fraction(1) if exact else 1.0
        spf = list(range(zi + 1))
        p = 2
        while p * p <= zi:
            if spf[p] == p:
                for m in range(p * p, zi + 1, p):
                    if spf[m] == m:
                        spf[m] = p
            p += 1
        self.spf = spf
        self.u_prime: dict[int, int] = {}
        local = [None] * (zi + 1)
        inv_local = [None] * (zi + 1)
        for q in primes_up_to(max(zi, 1)).primes.tolist() if zi >= 2 else []:
            u = residue_class_count(q, self.offsets)
            if u == q * q:
                raise DegenerateTupleError(
                    f"offsets cover all residues modulo {q}^2; system not constructible"
                )
            self.u_prime[q] = u
            if exact:
                local[q] = Fraction(u, q * q - u)
                inv_local[q] = Fraction(q * q, q * q - u)
            else:
                local[q] = u / (q * q - u)
                inv_local[q] = q * q / (q * q - u)
        # multiplicative tables over squarefree k <= zi (None = not squarefree)
        g = [None] * (zi + 1)
        inv_prod = [None] * (zi + 1)
        u_val = [None] * (zi + 1)
        mob = [0] * (zi + 1)
        if zi >= 1:
            g[1] = one
            inv_prod[1] = one
            u_val[1] = 1
            mob[1] = 1
        for k in range(2, zi + 1):
            q = spf[k]
            m = k // q
            if m % q == 0 or g[m] is None:
                continue
            g[k] = g[m] * local[q]
            inv_prod[k] = inv_prod[m] * inv_local[q]
            u_val[k] = u_val[m] * self.u_prime[q]
            mob[k] = -mob[m]
        self.g = g
        self.inv_prod = inv_prod
        self.u_val = u_val
        self.mobius = mob
        self._memo: dict[tuple[int, int], Number] = {}

    def squarefree_values(self) -> list[int]:
        return [k for k in range(1, self.zi + 1) if self.g[k] is not None]

    def normalizing_sum(self, yi: int, m: int) -> Number:
        key = (yi, m)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        terms = [self.g[k] for k in range(1, min(yi, self.zi) + 1)
                 if self.g[k] is not None and math.gcd(k, m) == 1]
        value = sum(terms) if self.exact else math.fsum(terms)
        self._memo[key] = value
        return value


def normalizing_sum(y: float, coprime_to: int, offsets, *, exact: bool = True) -> Number:
    """Sum of the local density ratios u(k)/(k^2 - ...) products over
    squarefree k <= y coprime to the given modulus; equals 1 at y = 1."""
    l = as_offsets(offsets)
    yi = math.floor(y)
    if yi < 1:
        raise ValueError("y must be at least 1")
    data = _LocalData(l, yi, exact)
    return data.normalizing_sum(yi, int(coprime_to))


@dataclass(frozen=True)
class SelbergSystem:
    """Closed-form optimal weight system at a given sieve level."""

    level: float
    offsets: object
    weights: dict                  # squarefree d <= level -> weight; weight[1] = 1
    sum_table: dict                # (floor(y), m) -> normalizing sum value
    normalizer: Number             # normalizing sum at the level itself
    form_minimum: Number           # minimal quadratic-form value = 1/normalizer
    weight_mass: float             # sum over d of |weight(d)| * u(d)
    inv_density_upper: float       # certified upper bound on 1/density
    tail_defect: float             # inv_density_upper - normalizer (>= 0 up to bracket width)
    density: EulerEstimate
    exact: bool

    @property
    def r(self) -> int:
        return self.offsets.r


def optimal_weights(level: float, offsets, *, exact: Optional[bool] = None,
                    prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> SelbergSystem:
    """Construct the variance-minimizing weight system at the given level."""
    l = as_offsets(offsets)
    level = float(level)
    if not level > 2.0:
        raise ValueError("sieve level must exceed 2")
    if level > LEVEL_CAP:
        raise ValueError(f"sieve level above the weight-table cap {LEVEL_CAP:g}")
    if exact is None:
        exact = level <= EXACT_LEVEL_CAP
    est = density_constant(l, prime_cutoff)
    if est.degenerate_zero:
        raise DegenerateTupleError(
            "offsets cover all residues modulo some prime square; system not constructible"
        )
    zi = math.floor(level)
    data = _LocalData(l, zi, exact)
    norm = data.normalizing_sum(zi, 1)
    weights = {}
    for d in data.squarefree_values():
        part = data.normalizing_sum(_floor_ratio(level, d), d)
        weights[d] = data.mobius[d] * data.inv_prod[d] * part / norm
    form_min = (Fraction(1) if exact else 1.0) / norm
    mass = math.fsum(abs(float(w)) * data.u_val[d] for d, w in weights.items())
    inv_upper = 1.0 / est.lower
    return SelbergSystem(
        level=level,
        offsets=l,
        weights=weights,
        sum_table=dict(data._memo),
        normalizer=norm,
        form_minimum=form_min,
        weight_mass=mass,
        inv_density_upper=inv_upper,
        tail_defect=inv_upper - float(norm),
        density=est,
        exact=exact,
    )


def excess_exponent(h: float) -> float:
    """The exponent drift 2 log log log h / log log h used in upper-bound
    excess reporting."""
    llh = math.log(math.log(h))
    if llh <= 0:
        raise ValueError("h is too small for the excess exponent")
    return 2.0 * math.log(llh) / llh


def sieve_level(h: float, r: int) -> float:
    """Canonical level h^(1/3) * (log(h)/r)^(-r/3) for a window of length h."""
    return h ** (1.0 / 3.0) * (math.log(h) / r) ** (-r / 3.0)


@dataclass(frozen=True)
class UpperBoundParameters:
    """Canonical level and excess exponent, with side-condition report."""

    level: float
    excess_exponent: float
    nu: float
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def upper_bound_parameters(h: float, r: int, x: Optional[float] = None) -> UpperBoundParameters:
    """Evaluate the canonical sieve level and excess exponent for (h, r).

    Requires h >= 10^3 and 1 <= r <= log h / log log h; the side conditions
    (level in (2, 2 sqrt(x)) and nu = 1 + r/log(level) <= 2) are reported,
    not enforced.  When x is omitted it defaults to h, the smallest window
    position the regime allows.
    """
    if h < 1000:
        raise ValueError("window length must be at least 10^3")
    if r < 1:
        raise ValueError("tuple size must be at least 1")
    r_max = math.log(h) / math.log(math.log(h))
    if r > r_max:
        raise ValueError(
            f"tuple size {r} exceeds log h / log log h = {r_max:.6g}"
        )
    level = sieve_level(h, r)
    rho = excess_exponent(h)
    nu = 1.0 + r / math.log(level) if level > 1.0 else math.inf
    x_ref = float(x) if x is not None else float(h)
    violations = []
    if not level > 2.0:
        violations.append("level <= 2")
    if not level < 2.0 * math.sqrt(x_ref):
        violations.append("level >= 2*sqrt(x)")
    if not nu <= 2.0:
        violations.append("nu > 2")
    return UpperBoundParameters(level, rho, nu, tuple(violations))


@dataclass(frozen=True)
class UpperBoundCertificate:
    """Quadratic-form upper bound for a window, with optional exact count."""

    window: Window
    offsets: object
    level: float
    form_value: Number             # sum of weight(d1) weight(d2) N(lcm), N exact
    exact_count: Optional[int]
    reference_rhs: float           # density * h * (1 + h^(-1/3 + excess exponent))

    @property
    def certified(self) -> Optional[bool]:
        if self.exact_count is None:
            return None
        return self.exact_count <= float(self.form_value) + 1e-6


def quadratic_form_bound(window, offsets, system: SelbergSystem, *,
                         include_exact: bool = True, threads: int = 1) -> UpperBoundCertificate:
    """Evaluate the weight quadratic form with exact congruent counts.

    Every n in the window contributes the square of its total weight, which
    is >= 1 whenever all shifted values are squarefree and >= 0 otherwise,
    so the form value is an upper bound on the exact tuple count.
    """
    w = as_window(window)
    l = as_offsets(offsets)
    if l.offsets != system.offsets.offsets:
        raise ValueError("system was built for different offsets")
    ds = sorted(system.weights)
    counts: dict[int, int] = {}
    form = Fraction(0) if system.exact else 0.0
    for i, d1 in enumerate(ds):
        w1 = system.weights[d1]
        for d2 in ds[i:]:
            m = d1 * d2 // math.gcd(d1, d2)
            n_m = counts.get(m)
            if n_m is None:
                n_m = count_congruent(m, w, l)
                counts[m] = n_m
            contrib = w1 * system.weights[d2] * n_m
            form += contrib if d1 == d2 else 2 * contrib
    exact = count_tuples(w, l, threads=threads) if include_exact else None
    if system.density is not None and w.h >= 16:
        rho = excess_exponent(w.h)
        rhs = system.density.midpoint * w.h * (1.0 + w.h ** (-1.0 / 3.0 + rho))
    else:
        rhs = math.nan
    return UpperBoundCertificate(w, l, system.level, form, exact, rhs)


def squarefree_moment(r: int, level: float) -> int:
    """Exact sum of r^(number of prime factors) over squarefree d <= level."""
    if r < 1:
        raise ValueError("r must be at least 1")
    zi = math.floor(level)
    if zi < 1:
        raise ValueError("level must be at least 1")
    spf = list(range(zi + 1))
    p = 2
    while p * p <= zi:
        if spf[p] == p:
            for m in range(p * p, zi + 1, p):
                if spf[m] == m:
                    spf[m] = p
        p += 1
    vals = [0] * (zi + 1)
    vals[1] = 1
    total = 1
    for k in range(2, zi + 1):
        q = spf[k]
        m = k // q
        if m % q == 0 or vals[m] == 0:
            continue
        vals[k] = vals[m] * r
        total += vals[k]
    return total


def moment_cap(r: int, level: float) -> float:
    """The closed-form cap level * (2 e log(level) / r)^r on the moment sum."""
    return level * (2.0 * math.e * math.log(level) / r) ** r


@dataclass(frozen=True)
class MomentBounds:
    """Moment sum and weight mass against their closed-form caps."""

    moment: int
    moment_cap: float
    weight_mass: float
    weight_mass_cap: float
    nu: float
    applicable: bool               # caps proven only for nu <= 2


def weight_moment_bounds(system: SelbergSystem, r: Optional[int] = None,
                         level: Optional[float] = None) -> MomentBounds:
    if r is None:
        r = system.r
    if level is None:
        level = system.level
    moment = squarefree_moment(r, level)
    cap = moment_cap(r, level)
    nu = 1.0 + r / math.log(level)
    return MomentBounds(
        moment=moment,
        moment_cap=cap,
        weight_mass=system.weight_mass,
        weight_mass_cap=system.inv_density_upper * moment,
        nu=nu,
        applicable=nu <= 2.0,
    )
