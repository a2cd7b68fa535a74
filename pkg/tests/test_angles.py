"""Certified angle arithmetic: exactness, enclosures, undecidability."""

from __future__ import annotations

import threading
from fractions import Fraction
from math import gcd, isqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symjump import (Enclosure, UndecidableComparison, complement_angle,
                     decimal_angle, quadratic_angle, rational_angle, same_angle)


def quad_floor_oracle(a: int, b: int, c: int, d: int, m: int) -> int:
    """floor(m * (a + b*sqrt(d)) / c) by scaled integer square roots."""
    scale = 10**40
    s = isqrt(b * b * m * m * d * scale * scale)  # floor(scale * |b| * m * sqrt(d))
    sign = 1 if b > 0 else -1
    lo = (m * a * scale + sign * (s + (0 if sign > 0 else 1))) // (c * scale)
    hi = (m * a * scale + sign * (s + (1 if sign > 0 else 0))) // (c * scale)
    assert lo == hi, "oracle scale too coarse"
    return lo


rationals = st.tuples(st.integers(2, 97), st.integers(1, 96)).filter(
    lambda t: t[1] < t[0] and gcd(t[0], t[1]) > 0)


class TestRational:
    def test_floor_examples(self):
        assert rational_angle(2, 3).floor_mul(4) == 2
        assert rational_angle(1, 2).floor_mul(2) == 1

    def test_ceil_examples(self):
        assert rational_angle(2, 3).ceil_mul(3) == 2
        assert rational_angle(2, 3).ceil_mul(1) == 1

    def test_varphi_examples(self):
        assert rational_angle(1, 3).varphi_mul(3) == 0
        assert rational_angle(1, 3).varphi_mul(2) == 1

    def test_frac_examples(self):
        assert rational_angle(2, 3).frac_mul(5) == Fraction(1, 3)
        assert rational_angle(1, 4).frac_mul(4) == 0

    def test_rejects_endpoints(self):
        for p, q in ((0, 1), (1, 1), (3, 3), (-1, 4), (5, 4)):
            with pytest.raises(ValueError):
                rational_angle(p, q)

    @given(pq=rationals, m=st.integers(1, 10**6))
    def test_ceil_minus_floor_is_varphi(self, pq, m):
        x = rational_angle(pq[1], pq[0])
        assert x.ceil_mul(m) - x.floor_mul(m) == x.varphi_mul(m)

    @given(pq=rationals, m=st.integers(1, 10**6))
    def test_varphi_zero_iff_denominator_divides(self, pq, m):
        x = rational_angle(pq[1], pq[0])
        q = x.value.denominator
        assert (x.varphi_mul(m) == 0) == (m % q == 0)

    @given(pq=rationals, m=st.integers(1, 10**6))
    def test_frac_plus_floor_reconstructs(self, pq, m):
        x = rational_angle(pq[1], pq[0])
        assert x.frac_mul(m) + x.floor_mul(m) == m * x.value


GOLDEN = (-1, 1, 2, 5)


class TestQuadratic:
    def test_floor_matches_oracle_golden_conjugate(self):
        g = quadratic_angle(*GOLDEN)
        assert g.floor_mul(10) == 6 == quad_floor_oracle(*GOLDEN, 10)

    def test_ceil_golden_conjugate(self):
        assert quadratic_angle(*GOLDEN).ceil_mul(2) == 2

    @settings(max_examples=40, deadline=None)
    @given(coeffs=st.sampled_from([
        (-1, 1, 1, 2), (-1, 1, 2, 5), (-1, 1, 1, 3), (-2, 1, 1, 7),
        (0, 1, 3, 3), (5, -1, 4, 5), (3, -1, 2, 3)]),
        m=st.integers(1, 10**9))
    def test_floor_matches_oracle(self, coeffs, m):
        x = quadratic_angle(*coeffs)
        assert x.floor_mul(m) == quad_floor_oracle(*coeffs, m)

    @settings(max_examples=40, deadline=None)
    @given(coeffs=st.sampled_from([(-1, 1, 1, 2), (-1, 1, 2, 5), (0, 1, 3, 3)]),
           m=st.integers(1, 10**6))
    def test_ceil_floor_varphi_relation(self, coeffs, m):
        x = quadratic_angle(*coeffs)
        assert x.ceil_mul(m) - x.floor_mul(m) == x.varphi_mul(m) == 1

    def test_frac_enclosure_certifies(self):
        g = quadratic_angle(*GOLDEN)
        tol = Fraction(1, 10**9)
        enc = g.frac_mul(3, tol=tol)
        assert isinstance(enc, Enclosure)
        assert enc.width <= tol
        # {3 * (sqrt5-1)/2} = (3*sqrt5 - 5)/2: certify lo <= value <= hi by
        # squaring: p/q <= (3*sqrt5-5)/2  <=>  (2p + 5q)^2 <= 45 q^2.
        lo, hi = enc.lo, enc.hi
        assert (2 * lo.numerator + 5 * lo.denominator) ** 2 <= 45 * lo.denominator**2
        assert (2 * hi.numerator + 5 * hi.denominator) ** 2 >= 45 * hi.denominator**2

    def test_frac_enclosure_deterministic_under_cache_warming(self):
        g = quadratic_angle(*GOLDEN)
        first = g.frac_mul(7, tol=Fraction(1, 10**6))
        g.floor_mul(10**15)  # force deep refinement elsewhere
        assert g.frac_mul(7, tol=Fraction(1, 10**6)) == first

    def test_frac_plus_floor_encloses_product(self):
        g = quadratic_angle(*GOLDEN)
        m = 97
        enc = g.frac_mul(m, tol=Fraction(1, 10**12))
        f = g.floor_mul(m)
        lo, hi = g.enclosure()
        assert enc.lo + f <= m * hi and m * lo <= enc.hi + f

    def test_normalization_reduces_square_factors(self):
        assert same_angle(quadratic_angle(0, 1, 4, 8), quadratic_angle(0, 1, 2, 2))

    def test_rejects_rational_disguises(self):
        with pytest.raises(ValueError):
            quadratic_angle(1, 1, 4, 4)   # sqrt(4) = 2
        with pytest.raises(ValueError):
            quadratic_angle(1, 0, 2, 5)   # b = 0
        with pytest.raises(ValueError):
            quadratic_angle(5, 1, 2, 2)   # value > 1

    def test_sides(self):
        g = quadratic_angle(*GOLDEN)
        # {2*g} = 0.2360679... -> mid at delta=1/10, low at delta=1/4
        assert g.frac_side(2, Fraction(1, 10)) == "mid"
        assert g.frac_side(2, Fraction(1, 4)) == "low"
        # {13*g} = {8.034}: low side at 1/25
        assert g.frac_side(13, Fraction(1, 25)) == "low"


class TestDecimal:
    def test_works_within_declared_precision(self):
        d = decimal_angle("0.6180339887", "1e-10")
        assert d.floor_mul(10) == 6

    def test_undecidable_beyond_declared_precision(self):
        d = decimal_angle("0.6180339887", "1e-6")
        with pytest.raises(UndecidableComparison):
            d.floor_mul(10**8)

    def test_varphi_always_one(self):
        assert decimal_angle("0.6180339887", "1e-6").varphi_mul(10**30) == 1

    def test_rejects_enclosure_outside_unit_interval(self):
        with pytest.raises(ValueError):
            decimal_angle("1.5", "0.1")
        with pytest.raises(ValueError):
            decimal_angle("0.5", "0")


class TestIdentity:
    def test_complement(self):
        assert complement_angle(rational_angle(1, 3)).value == Fraction(2, 3)
        g = quadratic_angle(*GOLDEN)
        c = complement_angle(g)
        assert same_angle(c, quadratic_angle(3, -1, 2, 5))
        assert not same_angle(c, g)

    def test_same_angle_undecidable_for_refinerless_overlap(self):
        a = decimal_angle("0.33333333", "1e-4")
        with pytest.raises(UndecidableComparison):
            same_angle(a, rational_angle(1, 3))

    def test_budget_zero_raises_fast(self):
        g = quadratic_angle(*GOLDEN)
        with pytest.raises(UndecidableComparison):
            # budget 0 forbids refinement beyond the cached enclosure
            quadratic_angle(-2, 1, 1, 7).floor_mul(10**60, budget=0)
        assert g.floor_mul(3, budget=0) == 1  # already decidable


def test_concurrent_refinement_stays_consistent():
    g = quadratic_angle(-2, 1, 1, 7)
    results = []

    def worker(m):
        results.append((m, g.floor_mul(m)))

    threads = [threading.Thread(target=worker, args=(10**k,)) for k in range(1, 9)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for m, value in results:
        assert value == quad_floor_oracle(-2, 1, 1, 7, m)
