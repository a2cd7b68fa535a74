"""Certified arithmetic for angle ratios x = theta / (2*pi).

Every index formula in this package reduces to floors, ceilings,
integrality tests and fractional parts of m*x for a positive integer m.
A silently wrong floor corrupts every quantity computed downstream, so
each query either returns a certified answer or raises
``UndecidableComparison`` -- never a guess.

Rational ratios are exact integer arithmetic.  Irrational ratios carry a
rational enclosure ``[approximant - error, approximant + error]`` that
can be tightened through a refiner: a pure function mapping a level
``0, 1, 2, ...`` to enclosures whose widths at least halve per level.
The built-in constructor for quadratic irrationals (a + b*sqrt(d))/c
refines by integer-square-root bisection and is exact at every level.
Enclosures only ever tighten, and refinement is lock-protected, so
values are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from threading import Lock
from typing import Callable, Optional

from .errors import UndecidableComparison

# Refinement steps allowed per query before giving up.  The theory puts
# no a-priori bound on how close m*x may come to an integer, so some
# bound must be chosen; 64 halvings on top of the level-0 enclosure is
# far beyond any scan this package performs, and callers can override.
DEFAULT_BUDGET = 64

Refiner = Callable[[int], tuple[Fraction, Fraction]]


@dataclass(frozen=True)
class Enclosure:
    """A certified rational interval [lo, hi] containing the true value."""

    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi


def _resolve_budget(budget: Optional[int]) -> int:
    return DEFAULT_BUDGET if budget is None else budget


class ExactAngle:
    """Base class for angle ratios; see :class:`RationalAngle` and
    :class:`IrrationalAngle`."""

    __slots__ = ()

    @property
    def is_rational(self) -> bool:
        raise NotImplementedError

    def floor_mul(self, m: int, budget: Optional[int] = None) -> int:
        """Certified floor(m * x)."""
        raise NotImplementedError

    def ceil_mul(self, m: int, budget: Optional[int] = None) -> int:
        """Certified min{k in Z : k >= m*x}."""
        raise NotImplementedError

    def varphi_mul(self, m: int, budget: Optional[int] = None) -> int:
        """0 if m*x is an integer, 1 otherwise."""
        raise NotImplementedError

    def frac_mul(self, m: int, tol: Fraction = Fraction(1, 10**9),
                 budget: Optional[int] = None):
        """Fractional part of m*x: an exact Fraction when rational, else a
        certified :class:`Enclosure` of width <= tol."""
        raise NotImplementedError

    def frac_side(self, m: int, delta: Fraction,
                  budget: Optional[int] = None) -> str:
        """Locate {m*x} relative to a rational threshold delta in (0, 1/2).

        Returns ``"zero"`` ({m*x} = 0, rational only), ``"low"``
        (0 < {m*x} < delta), ``"high"`` ({m*x} > 1 - delta) or ``"mid"``.
        """
        raise NotImplementedError


class RationalAngle(ExactAngle):
    """x = p/q in lowest terms with 0 < p/q < 1.

    The endpoints 0 and 1 are rejected: a full turn is not a rotation
    block, and the flat angles belong to the dedicated +/-1-eigenvalue
    normal forms.
    """

    __slots__ = ("_value",)

    def __init__(self, p, q=None):
        value = Fraction(p, q) if q is not None else Fraction(p)
        if not 0 < value < 1:
            raise ValueError(f"rational angle ratio must lie strictly in (0,1), got {value}")
        object.__setattr__(self, "_value", value)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("RationalAngle is immutable")

    @property
    def value(self) -> Fraction:
        return self._value

    @property
    def is_rational(self) -> bool:
        return True

    def floor_mul(self, m: int, budget: Optional[int] = None) -> int:
        _check_multiplier(m)
        return (m * self._value.numerator) // self._value.denominator

    def ceil_mul(self, m: int, budget: Optional[int] = None) -> int:
        _check_multiplier(m)
        return -((-m * self._value.numerator) // self._value.denominator)

    def varphi_mul(self, m: int, budget: Optional[int] = None) -> int:
        _check_multiplier(m)
        return 0 if (m * self._value.numerator) % self._value.denominator == 0 else 1

    def frac_mul(self, m: int, tol: Fraction = Fraction(1, 10**9),
                 budget: Optional[int] = None) -> Fraction:
        _check_multiplier(m)
        return Fraction((m * self._value.numerator) % self._value.denominator,
                        self._value.denominator)

    def frac_side(self, m: int, delta: Fraction,
                  budget: Optional[int] = None) -> str:
        _check_delta(delta)
        f = self.frac_mul(m)
        if f == 0:
            return "zero"
        if f < delta:
            return "low"
        if f > 1 - delta:
            return "high"
        return "mid"

    def __eq__(self, other):
        return isinstance(other, RationalAngle) and self._value == other._value

    def __hash__(self):
        return hash(("rational", self._value))

    def __repr__(self):
        return f"RationalAngle({self._value})"

    def __float__(self):
        return float(self._value)


class IrrationalAngle(ExactAngle):
    """An irrational x in (0, 1) given by an enclosure and optional refiner.

    The irrational flavor is trusted, not inferred: callers declaring a
    value irrational get irrational semantics (m*x is never an integer).
    ``source`` tags the construction for equality and serialization,
    e.g. ``("quadratic", (a, b, c, d))`` or ``("decimal", (s, e))``.
    """

    __slots__ = ("_lo", "_hi", "_level", "_refiner", "_lock", "source")

    def __init__(self, approximant: Fraction, error_bound: Fraction,
                 refiner: Optional[Refiner] = None,
                 source: Optional[tuple] = None):
        approximant = Fraction(approximant)
        error_bound = Fraction(error_bound)
        if error_bound <= 0:
            raise ValueError("error bound must be positive")
        lo = approximant - error_bound
        hi = approximant + error_bound
        if hi <= 0 or lo >= 1:
            raise ValueError("enclosure lies outside (0,1)")
        object.__setattr__(self, "_lo", max(lo, Fraction(0)))
        object.__setattr__(self, "_hi", min(hi, Fraction(1)))
        object.__setattr__(self, "_level", -1)
        object.__setattr__(self, "_refiner", refiner)
        object.__setattr__(self, "_lock", Lock())
        object.__setattr__(self, "source", source)

    def __setattr__(self, name, value):
        raise AttributeError("IrrationalAngle exposes no mutable attributes")

    @property
    def is_rational(self) -> bool:
        return False

    def enclosure(self) -> tuple[Fraction, Fraction]:
        """Current cached enclosure (monotonically tightening)."""
        return self._lo, self._hi

    def enclosure_at(self, level: int) -> tuple[Fraction, Fraction]:
        """Pure enclosure at a refinement level, independent of the cache."""
        if self._refiner is None:
            return self._lo, self._hi
        lo, hi = self._refiner(level)
        return max(lo, Fraction(0)), min(hi, Fraction(1))

    def refine_once(self) -> bool:
        """Tighten the cached enclosure one level.  False if refinerless."""
        if self._refiner is None:
            return False
        with self._lock:
            level = self._level + 1
            lo, hi = self._refiner(level)
            # Intersect so concurrent readers only ever see tightening.
            lo = max(lo, self._lo)
            hi = min(hi, self._hi)
            object.__setattr__(self, "_lo", lo)
            object.__setattr__(self, "_hi", hi)
            object.__setattr__(self, "_level", level)
        return True

    # -- certified queries ------------------------------------------------

    def floor_mul(self, m: int, budget: Optional[int] = None) -> int:
        _check_multiplier(m)
        for _ in range(_resolve_budget(budget) + 1):
            lo, hi = self._lo, self._hi
            f_lo = (m * lo.numerator) // lo.denominator
            f_hi = (m * hi.numerator) // hi.denominator
            if f_lo == f_hi:
                return f_lo
            if not self.refine_once():
                break
        raise UndecidableComparison(
            f"floor({m} * {self!r}) undecided: enclosure too coarse for this multiplier")

    def ceil_mul(self, m: int, budget: Optional[int] = None) -> int:
        # m*x is never an integer for irrational x.
        return self.floor_mul(m, budget) + 1

    def varphi_mul(self, m: int, budget: Optional[int] = None) -> int:
        _check_multiplier(m)
        return 1

    def frac_mul(self, m: int, tol: Fraction = Fraction(1, 10**9),
                 budget: Optional[int] = None) -> Enclosure:
        """Certified enclosure of {m*x}, width <= tol, snapped to a decimal
        grid so the result is reproducible and serializes losslessly."""
        _check_multiplier(m)
        tol = Fraction(tol)
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        # Deterministic: derived from the pure leveled enclosure, not the cache.
        for level in range(_resolve_budget(budget) + 1):
            lo, hi = self.enclosure_at(level)
            f_lo = (m * lo.numerator) // lo.denominator
            f_hi = (m * hi.numerator) // hi.denominator
            if f_lo != f_hi:
                if self._refiner is None:
                    break
                continue
            frac_lo = m * lo - f_lo
            frac_hi = m * hi - f_lo
            if frac_hi - frac_lo <= tol / 2:
                return Enclosure(*_snap_outward(frac_lo, frac_hi, tol / 4))
            if self._refiner is None:
                break
        raise UndecidableComparison(
            f"frac({m} * {self!r}) not enclosable at width {tol}")

    def frac_side(self, m: int, delta: Fraction,
                  budget: Optional[int] = None) -> str:
        _check_multiplier(m)
        _check_delta(delta)
        d_num, d_den = delta.numerator, delta.denominator
        for _ in range(_resolve_budget(budget) + 1):
            lo, hi = self._lo, self._hi
            f = (m * lo.numerator) // lo.denominator
            if f == (m * hi.numerator) // hi.denominator:
                # fractional interval, scaled to integers
                fr_lo_num = m * lo.numerator - f * lo.denominator  # / lo.denominator
                fr_hi_num = m * hi.numerator - f * hi.denominator
                if fr_hi_num * d_den < d_num * hi.denominator:
                    return "low"
                if fr_lo_num * d_den > (d_den - d_num) * lo.denominator:
                    return "high"
                if (fr_lo_num * d_den > d_num * lo.denominator
                        and fr_hi_num * d_den < (d_den - d_num) * hi.denominator):
                    return "mid"
            if not self.refine_once():
                break
        raise UndecidableComparison(
            f"side of frac({m} * {self!r}) vs delta={delta} undecided")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, IrrationalAngle):
            return False
        return self.source is not None and self.source == other.source

    def __hash__(self):
        return hash(("irrational", self.source)) if self.source else id(self)

    def __float__(self):
        return float((self._lo + self._hi) / 2)

    def __repr__(self):
        if self.source and self.source[0] == "quadratic":
            a, b, c, d = self.source[1]
            return f"IrrationalAngle(({a}{b:+}*sqrt({d}))/{c})"
        return f"IrrationalAngle(~{float(self):.10f})"


# -- constructors ----------------------------------------------------------


def rational_angle(p, q=None) -> RationalAngle:
    return RationalAngle(p, q)


def quadratic_angle(a: int, b: int, c: int, d: int) -> IrrationalAngle:
    """The quadratic irrational (a + b*sqrt(d)) / c, required to lie in (0,1).

    Refines by exact integer-square-root bisection: level k encloses
    sqrt(d) between consecutive multiples of 2**-(24*(k+1)).
    """
    for name, v in (("a", a), ("b", b), ("c", c), ("d", d)):
        if not isinstance(v, int):
            raise ValueError(f"quadratic coefficient {name} must be an integer")
    if c == 0:
        raise ValueError("quadratic denominator c must be nonzero")
    if b == 0:
        raise ValueError("quadratic angle with b = 0 is rational; use rational_angle")
    if d < 2 or isqrt(d) ** 2 == d:
        raise ValueError(f"sqrt({d}) is not irrational")
    a, b, c, d = _normalize_quadratic(a, b, c, d)

    def refiner(level: int) -> tuple[Fraction, Fraction]:
        k = 24 * (level + 1)
        s = isqrt(d << (2 * k))  # floor(2**k * sqrt(d))
        den = c << k
        if b > 0:
            return (Fraction((a << k) + b * s, den),
                    Fraction((a << k) + b * (s + 1), den))
        return (Fraction((a << k) + b * (s + 1), den),
                Fraction((a << k) + b * s, den))

    lo, hi = refiner(0)
    if hi <= 0 or lo >= 1:
        raise ValueError(f"({a}{b:+}*sqrt({d}))/{c} = {float((lo + hi) / 2):.6f} lies outside (0,1)")
    mid = (lo + hi) / 2
    angle = IrrationalAngle(mid, hi - mid, refiner, source=("quadratic", (a, b, c, d)))
    return angle


def decimal_angle(approximant, error) -> IrrationalAngle:
    """An irrational declared by a decimal approximant and error bound.

    No refiner is available, so queries needing more precision than the
    stated error raise UndecidableComparison.
    """
    approx_str = str(approximant)
    err_str = str(error)
    return IrrationalAngle(Fraction(approx_str), Fraction(err_str),
                           source=("decimal", (approx_str, err_str)))


def complement_angle(x: ExactAngle) -> ExactAngle:
    """The angle ratio 1 - x (the conjugate rotation e^{-i*theta})."""
    if isinstance(x, RationalAngle):
        return RationalAngle(1 - x.value)
    if isinstance(x, IrrationalAngle):
        if x.source and x.source[0] == "quadratic":
            a, b, c, d = x.source[1]
            return quadratic_angle(c - a, -b, c, d)
        if x.source and x.source[0] == "decimal":
            approx, err = x.source[1]
            return IrrationalAngle(1 - Fraction(approx), Fraction(err),
                                   source=("decimal-complement", (approx, err)))
        lo, hi = x.enclosure()
        mid = 1 - (lo + hi) / 2
        return IrrationalAngle(mid, (hi - lo) / 2)
    raise TypeError(f"not an ExactAngle: {x!r}")


def same_angle(x: ExactAngle, y: ExactAngle, budget: Optional[int] = None) -> bool:
    """Certified equality of two angle ratios.

    Equal representations compare equal immediately; otherwise the
    enclosures are refined until disjoint.  Raises UndecidableComparison
    when neither happens within the budget (distinct representations of
    the same irrational value cannot be certified equal).
    """
    if x == y:
        return True
    if isinstance(x, RationalAngle) and isinstance(y, RationalAngle):
        return False
    budget = _resolve_budget(budget)
    for _ in range(budget + 1):
        x_lo, x_hi = _bounds(x)
        y_lo, y_hi = _bounds(y)
        if x_hi < y_lo or y_hi < x_lo:
            return False
        refined = False
        for z in (x, y):
            if isinstance(z, IrrationalAngle):
                refined = z.refine_once() or refined
        if not refined:
            break
    raise UndecidableComparison(f"cannot separate {x!r} from {y!r}")


# -- helpers ----------------------------------------------------------------


def _bounds(x: ExactAngle) -> tuple[Fraction, Fraction]:
    if isinstance(x, RationalAngle):
        return x.value, x.value
    return x.enclosure()


def _check_multiplier(m: int) -> None:
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"multiplier must be a positive integer, got {m!r}")


def _check_delta(delta: Fraction) -> None:
    if not 0 < delta < Fraction(1, 2):
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")


def _normalize_quadratic(a: int, b: int, c: int, d: int) -> tuple[int, int, int, int]:
    """Canonical form: c > 0, d squarefree-reduced, gcd(a, b, c) = 1."""
    if c < 0:
        a, b, c = -a, -b, -c
    f = 2
    while f * f <= d:
        while d % (f * f) == 0:
            d //= f * f
            b *= f
        f += 1
    g = gcd(gcd(abs(a), abs(b)), c)
    return a // g, b // g, c // g, d


def _snap_outward(lo: Fraction, hi: Fraction, grid: Fraction) -> tuple[Fraction, Fraction]:
    """Widen [lo, hi] outward to the decimal grid with step <= grid."""
    step = Fraction(1)
    while step > grid:
        step /= 10
    lo_s = Fraction((lo.numerator * step.denominator) // (lo.denominator * step.numerator)
                    * step.numerator, step.denominator)
    hi_s = Fraction(-((-hi.numerator * step.denominator) // (hi.denominator * step.numerator))
                    * step.numerator, step.denominator)
    return max(lo_s, Fraction(0)), hi_s
