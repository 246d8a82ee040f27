import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqfree.density import (
    EulerEstimate,
    certify_inverse_bound,
    density_constant,
    inverse_density_cap,
)
from sqfree.errors import DegenerateTupleError
from sqfree.sieve import count_tuples

# Independently derived reference values.  The single-offset density is
# 6/pi^2; the pair value was frozen from a partial product over primes up to
# 1e8 with a proven tail bound (enclosure [0.322634078, 0.322634104]) and
# agrees with the published digits of the corresponding prime product.
SINGLE_DENSITY = 6.0 / math.pi**2
PAIR_DENSITY = 0.3226340989392447


def zeta2_bracket(terms: int = 500_000) -> tuple[float, float]:
    """Independent series bracket for zeta(2): partial sum plus integral tail."""
    partial = math.fsum(1.0 / (n * n) for n in range(1, terms + 1))
    return partial + 1.0 / (terms + 1), partial + 1.0 / terms


def test_single_offset_encloses_inverse_zeta2():
    est = density_constant([0], 10**6)
    z_lo, z_hi = zeta2_bracket()
    assert est.lower <= 1.0 / z_hi and 1.0 / z_lo <= est.upper
    assert est.contains(SINGLE_DENSITY)


def test_pair_encloses_frozen_constant():
    est = density_constant([0, 1], 10**6)
    assert est.contains(PAIR_DENSITY)


def test_enclosure_width_small_at_default_cutoff():
    est = density_constant([0], 10**7)
    assert est.width < 1e-5
    assert est.contains(SINGLE_DENSITY)


def test_larger_local_count_means_smaller_density():
    # u(2) is 1 for offsets (0,4) but 2 for (0,1); all other factors agree
    wide = density_constant([0, 4], 10**5)
    tight = density_constant([0, 1], 10**5)
    assert wide.lower > tight.upper


def test_enclosure_invariants():
    for offs in ([0], [0, 1], [0, 2, 6], [0, 4, 10, 12]):
        est = density_constant(offs, 10**5)
        assert 0.0 <= est.lower <= est.upper <= 1.0
        assert est.upper / est.lower <= math.exp(est.tail_log_bound) * (1 + 1e-13)


def test_monotone_nesting_in_cutoff():
    previous = density_constant([0, 1], 10**3)
    for cutoff in (10**4, 10**5, 10**6):
        est = density_constant([0, 1], cutoff)
        assert est.lower >= previous.lower
        assert est.upper <= previous.upper
        previous = est


def test_shift_invariance_is_exact():
    base = density_constant([0, 1, 5], 10**5)
    shifted = density_constant([7, 8, 12], 10**5)
    assert (base.lower, base.upper) == (shifted.lower, shifted.upper)


def test_degenerate_pattern_is_exactly_zero():
    est = density_constant([0, 1, 2, 3], 10**5)
    assert est.degenerate_zero
    assert est.lower == est.upper == 0.0
    # cross-check: every window count vanishes since some coordinate always
    # lands on a multiple of 4
    for x in (0, 17, 10**4):
        assert count_tuples((x, 50), [0, 1, 2, 3]) == 0


def test_cutoff_precondition():
    with pytest.raises(ValueError):
        density_constant([0, 1, 2, 5], 7)  # below 2*r


def test_certify_inverse_bound_single():
    cert = certify_inverse_bound([0], 10**6)
    assert math.isclose(cert.inverse_upper, 1.6449, rel_tol=1e-3)
    assert math.isclose(cert.cap, math.exp(9.0), rel_tol=1e-12)
    assert cert.holds


def test_certify_inverse_bound_pair():
    cert = certify_inverse_bound([0, 1], 10**6)
    assert math.isclose(cert.inverse_upper, 3.0995, rel_tol=1e-3)
    assert math.isclose(cert.cap, math.exp(9.0 * math.sqrt(2.0)), rel_tol=1e-12)
    assert cert.holds


def test_certify_degenerate_not_applicable():
    with pytest.raises(DegenerateTupleError):
        certify_inverse_bound([0, 1, 2, 3], 10**5)


@given(st.integers(min_value=1, max_value=200))
@settings(max_examples=60, deadline=None)
def test_single_pattern_bound_always_holds(shift):
    # any r=1 pattern has density 6/pi^2, far above exp(-9)
    cert = certify_inverse_bound([shift], 10**4)
    assert cert.holds


@given(
    st.lists(st.integers(min_value=0, max_value=300), min_size=1, max_size=4, unique=True)
)
@settings(max_examples=40, deadline=None)
def test_enclosure_sane_for_random_patterns(offs):
    offs = sorted(offs)
    est = density_constant(offs, 10**4)
    if est.degenerate_zero:
        assert est.lower == est.upper == 0.0
    else:
        assert 0.0 < est.lower <= est.upper <= 1.0


def test_split_product_and_tail_caps():
    # small-prime block: the squared primorial below sqrt(2r) stays under
    # 4^(2 sqrt(2r)); prime tail: 2r * sum_{n > sqrt(2r)} 1/n^2 <= 2 sqrt(2r);
    # checked for every r up to 10^4
    from bisect import bisect_right

    from sqfree.arith import primes_up_to

    primes = primes_up_to(200).primes.tolist()
    log_prefix = [0.0]
    for p in primes:
        log_prefix.append(log_prefix[-1] + math.log(p))
    m_max = math.isqrt(2 * 10**4) + 1
    recip_prefix = [0.0]
    for n in range(1, m_max + 1):
        recip_prefix.append(recip_prefix[-1] + 1.0 / (n * n))
    zeta2 = math.pi**2 / 6.0
    for r in range(1, 10**4 + 1):
        w = math.sqrt(2 * r)
        log_block = 2.0 * log_prefix[bisect_right(primes, w)]
        assert log_block <= 2.0 * w * math.log(4.0) + 1e-12
        m = math.isqrt(2 * r)
        tail = zeta2 - recip_prefix[m]
        assert 2 * r * tail <= 2.0 * w + 1e-9
