"""Index and nullity iteration for symplectic paths.

A path is summarized by a :class:`PathSeed`: its initial index i1 and
nullity nu1 together with the normal-form decomposition of its endpoint
matrix.  The m-th iterate's index grows linearly in m with a ceiling
correction per rotation angle, a parity term from the -1-eigenvalue
blocks and an integrality correction per nontrivial 4x4 rotation block;
the nullity picks up the kernel of each block's m-th power.  All angle
arithmetic is certified, so every returned integer is exact or the call
raises ``UndecidableComparison``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .angles import IrrationalAngle, _resolve_budget
from .errors import UndecidableComparison
from .normal_forms import Decomposition


@dataclass(frozen=True)
class PathSeed:
    """Initial data of a symplectic path: dimension, index, nullity, endpoint."""

    n: int
    i1: int
    nu1: int
    decomp: Decomposition

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"manifold dimension must be >= 2, got {self.n}")
        if self.decomp.n != self.n:
            raise ValueError(
                f"decomposition fills {self.decomp.n - 1} units but n - 1 = {self.n - 1}")
        expected = self.decomp.p_minus + 2 * self.decomp.p_zero + self.decomp.p_plus
        if self.nu1 != expected:
            raise ValueError(
                f"initial nullity must equal the 1-eigenvalue kernel of the endpoint: "
                f"expected {expected}, got {self.nu1}")


@dataclass(frozen=True)
class IterationRow:
    m: int
    index: int
    nullity: int


def index_iterate(seed: PathSeed, m: int, budget: Optional[int] = None) -> int:
    """Index of the m-th iterate."""
    if m < 1:
        raise ValueError("iterate must be positive")
    d = seed.decomp
    even = 1 if m % 2 == 0 else 0
    try:
        total = m * (seed.i1 + d.p_minus + d.p_zero - d.r)
        total += 2 * sum(x.ceil_mul(m, budget) for x in d.theta_angles)
        total -= d.r + d.p_minus + d.p_zero + even * (d.q_zero + d.q_plus)
        total += 2 * sum(x.varphi_mul(m, budget) for x in d.alpha_angles)
        total -= 2 * d.r_star
    except UndecidableComparison as exc:
        raise UndecidableComparison(f"index of iterate m={m}: {exc}") from exc
    return total


def nullity_iterate(seed: PathSeed, m: int, budget: Optional[int] = None) -> int:
    """Nullity of the m-th iterate."""
    if m < 1:
        raise ValueError("iterate must be positive")
    d = seed.decomp
    even = 1 if m % 2 == 0 else 0
    sigma = d.r + d.r_star + d.r_zero
    try:
        for x in d.theta_angles:
            sigma -= x.varphi_mul(m, budget)
        for x in d.alpha_angles:
            sigma -= x.varphi_mul(m, budget)
        for x in d.beta_angles:
            sigma -= x.varphi_mul(m, budget)
    except UndecidableComparison as exc:
        raise UndecidableComparison(f"nullity of iterate m={m}: {exc}") from exc
    nullity = seed.nu1 + even * (d.q_minus + 2 * d.q_zero + d.q_plus) + 2 * sigma
    assert 0 <= nullity <= 2 * (seed.n - 1)
    return nullity


def iteration_rows(seed: PathSeed, m_max: int,
                   budget: Optional[int] = None) -> Iterator[IterationRow]:
    """Lazy table of (m, index, nullity) for m = 1 .. m_max."""
    for m in range(1, m_max + 1):
        yield IterationRow(m, index_iterate(seed, m, budget),
                           nullity_iterate(seed, m, budget))


def bott_gap(seed: PathSeed, m: int, budget: Optional[int] = None) -> int:
    """i(m+1) - i(m) - nu(m); bounded below by i1 - e/2 for every m."""
    return (index_iterate(seed, m + 1, budget)
            - index_iterate(seed, m, budget)
            - nullity_iterate(seed, m, budget))


class MeanIndex:
    """The linear growth rate lim i(m)/m: an exact rational plus twice each
    irrational rotation angle."""

    __slots__ = ("base", "angles")

    def __init__(self, base: Fraction, angles: tuple[IrrationalAngle, ...]):
        self.base = base
        self.angles = angles

    @property
    def is_exact(self) -> bool:
        return not self.angles

    def exact(self) -> Fraction:
        if not self.is_exact:
            raise ValueError("mean index has irrational contributions; use enclosure()")
        return self.base

    def enclosure(self, tol: Optional[Fraction] = None,
                  budget: Optional[int] = None) -> tuple[Fraction, Fraction]:
        """Certified rational interval around the mean index."""
        if self.is_exact:
            return self.base, self.base
        if tol is None:
            tol = Fraction(1, 10**12)
        budget = _resolve_budget(budget)
        for _ in range(budget + 1):
            lo = hi = self.base
            for a in self.angles:
                a_lo, a_hi = a.enclosure()
                lo += 2 * a_lo
                hi += 2 * a_hi
            if hi - lo <= tol:
                return lo, hi
            refined = False
            for a in self.angles:
                refined = a.refine_once() or refined
            if not refined:
                break
        raise UndecidableComparison(f"mean index enclosure not shrinkable to {tol}")

    def cmp(self, other: Fraction, budget: Optional[int] = None) -> int:
        """Certified comparison against a rational: -1, 0 or +1."""
        other = Fraction(other)
        if self.is_exact:
            v = self.base
            return -1 if v < other else (0 if v == other else 1)
        budget = _resolve_budget(budget)
        for _ in range(budget + 1):
            lo, hi = self._raw_bounds()
            if lo > other:
                return 1
            if hi < other:
                return -1
            refined = False
            for a in self.angles:
                refined = a.refine_once() or refined
            if not refined:
                break
        raise UndecidableComparison(f"mean index vs {other} undecided")

    def floor_quotient(self, num: int, den: int, budget: Optional[int] = None) -> int:
        """Certified floor(num / (den * value)); value must be positive."""
        if num < 0 or den < 1:
            raise ValueError("floor_quotient expects num >= 0, den >= 1")
        if self.is_exact:
            if self.base <= 0:
                raise ValueError("mean index must be positive")
            q = Fraction(num) / (den * self.base)
            return q.numerator // q.denominator
        budget = _resolve_budget(budget)
        for _ in range(budget + 1):
            lo, hi = self._raw_bounds()
            if lo > 0:
                q_hi = Fraction(num) / (den * lo)
                q_lo = Fraction(num) / (den * hi)
                f_lo = q_lo.numerator // q_lo.denominator
                f_hi = q_hi.numerator // q_hi.denominator
                if f_lo == f_hi:
                    return f_lo
            refined = False
            for a in self.angles:
                refined = a.refine_once() or refined
            if not refined:
                break
        raise UndecidableComparison(
            f"floor({num} / ({den} * mean index)) undecided")

    def _raw_bounds(self) -> tuple[Fraction, Fraction]:
        lo = hi = self.base
        for a in self.angles:
            a_lo, a_hi = a.enclosure()
            lo += 2 * a_lo
            hi += 2 * a_hi
        return lo, hi

    def __float__(self):
        lo, hi = self._raw_bounds() if self.angles else (self.base, self.base)
        return float((lo + hi) / 2)

    def __eq__(self, other):
        return (isinstance(other, MeanIndex) and self.base == other.base
                and self.angles == other.angles)

    def __repr__(self):
        if self.is_exact:
            return f"MeanIndex({self.base})"
        return f"MeanIndex({self.base} + irrational, ~{float(self):.6f})"


def mean_index(seed: PathSeed) -> MeanIndex:
    """Closed form of lim i(m)/m: i1 + p- + p0 - r + sum of theta_j/pi."""
    d = seed.decomp
    base = Fraction(seed.i1 + d.p_minus + d.p_zero - d.r)
    irr = []
    for a in d.theta_angles:
        if a.is_rational:
            base += 2 * a.value
        else:
            irr.append(a)
    return MeanIndex(base, tuple(irr))
