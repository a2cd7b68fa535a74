"""Search for and verify common index jump tuples.

A jump tuple (N, m_1, ..., m_q) aligns the iterate indices of q paths
around 2N: the odd neighbours 2m_k -/+ 1 return to the initial nullity
and hit prescribed index values, the even iterate 2m_k is sandwiched
within half the elliptic height of 2N, and every rotation angle of every
path lands within delta of an integer multiple at m_k.

The scan walks the lattice m_1 in M*Z (M is the common angle period, so
every rational angle multiple is exact there), reads the unique
candidate N off the odd-iterate index identity, reconstructs the other
m_k through the floor construction, and certifies every condition by
direct evaluation through :mod:`symjump.iteration`.  Acceptance also
requires the closed form for the even-iterate index in terms of
splitting numbers to agree with the direct evaluation; this rejects
candidates whose delta is too coarse for that algebra to hold.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Optional, Sequence

from .errors import ConstraintViolation, NoTupleFound
from .iteration import MeanIndex, PathSeed, index_iterate, mean_index, nullity_iterate
from .normal_forms import c_total, elliptic_height, splitting_plus_at_one

_CHUNK = 2048  # lattice steps per scan chunk


@dataclass(frozen=True)
class ConditionCheck:
    """One evaluated (in)equality with both sides recorded."""

    name: str
    lhs: int
    rhs: int
    relation: str  # "==", "<=", ">="

    @property
    def passed(self) -> bool:
        if self.relation == "==":
            return self.lhs == self.rhs
        if self.relation == "<=":
            return self.lhs <= self.rhs
        if self.relation == ">=":
            return self.lhs >= self.rhs
        raise ValueError(f"unknown relation {self.relation}")


@dataclass(frozen=True)
class AngleSide:
    """Where {2 * m_k * x} fell for one spectrum angle."""

    kind: str        # "theta" | "alpha" | "beta"
    index: int       # position within the kind's angle list
    rational: bool
    side: str        # "zero" | "low" | "high" | "mid"


@dataclass(frozen=True)
class PathVerification:
    seed_index: int
    conditions: tuple[ConditionCheck, ...]
    angle_sides: tuple[AngleSide, ...]

    @property
    def closeness_ok(self) -> bool:
        return all(s.side != "mid" for s in self.angle_sides)

    @property
    def passed(self) -> bool:
        return self.closeness_ok and all(c.passed for c in self.conditions)

    def irrational_rotation_sides(self) -> tuple[str, ...]:
        return tuple(s.side for s in self.angle_sides
                     if s.kind == "theta" and not s.rational)


@dataclass(frozen=True)
class JumpTuple:
    N: int
    m: tuple[int, ...]
    chi: tuple[int, ...]
    M_period: int
    delta: Fraction
    per_path: tuple[PathVerification, ...]

    @property
    def passed(self) -> bool:
        return all(pv.passed for pv in self.per_path)

    def sort_key(self):
        return (self.N, self.chi)


@dataclass(frozen=True)
class TupleVerification:
    per_path: tuple[PathVerification, ...]

    @property
    def passed(self) -> bool:
        return all(pv.passed for pv in self.per_path)


@dataclass(frozen=True)
class DeltaReport:
    """Splitting-number counts near the even jump iterate."""

    delta_k: int
    delta_k_prime: int
    c_k: int
    s_plus: int


def angle_period(seeds: Sequence[PathSeed]) -> int:
    """Least M with M * theta/pi an integer for every rational angle."""
    seeds = tuple(seeds)
    if not seeds:
        raise ValueError("at least one seed is required")
    M = 1
    for seed in seeds:
        for _, _, a in seed.decomp.spectrum_angles():
            if a.is_rational:
                M = lcm(M, (2 * a.value).denominator)
    return M


# -- verification ------------------------------------------------------------


def _sides_for(seed: PathSeed, m_k: int, delta: Fraction,
               budget: Optional[int]) -> tuple[AngleSide, ...]:
    out = []
    for kind, idx, a in seed.decomp.spectrum_angles():
        side = a.frac_side(2 * m_k, delta, budget)
        out.append(AngleSide(kind, idx, a.is_rational, side))
    return tuple(out)


def delta_from_sides(seed: PathSeed, sides: Iterable[AngleSide]) -> int:
    """Sum of S^- over spectrum angles whose fractional part fell in (0, delta).

    A rotation block carries S^- = 1 at its own angle only; a nontrivial
    4x4 block carries S^- = 1 at the angle and its conjugate, so either
    side of the pair contributes exactly one.
    """
    total = 0
    for s in sides:
        if s.kind == "theta" and s.side == "low":
            total += 1
        elif s.kind == "alpha" and s.side in ("low", "high"):
            total += 1
    return total


def _verify_one_path(seed: PathSeed, k: int, N: int, m_k: int, chi_k: int,
                     M: int, delta: Fraction, mi: MeanIndex,
                     budget: Optional[int]) -> PathVerification:
    d = seed.decomp
    i1, nu1 = seed.i1, seed.nu1
    e_half = elliptic_height(d) // 2
    s_plus = splitting_plus_at_one(d)
    c_tot = c_total(d)

    i_prev = index_iterate(seed, 2 * m_k - 1, budget)
    nu_prev = nullity_iterate(seed, 2 * m_k - 1, budget)
    i_even = index_iterate(seed, 2 * m_k, budget)
    nu_even = nullity_iterate(seed, 2 * m_k, budget)
    i_next = index_iterate(seed, 2 * m_k + 1, budget)
    nu_next = nullity_iterate(seed, 2 * m_k + 1, budget)

    sides = _sides_for(seed, m_k, delta, budget)
    delta_k = delta_from_sides(seed, sides)
    lattice_m = (mi.floor_quotient(N, M, budget) + chi_k) * M

    conditions = (
        ConditionCheck("nullity_before_jump", nu_prev, nu1, "=="),
        ConditionCheck("nullity_after_jump", nu_next, nu1, "=="),
        ConditionCheck("index_nullity_before_jump", i_prev + nu_prev,
                       2 * N - (i1 + 2 * s_plus - nu1), "=="),
        ConditionCheck("index_after_jump", i_next, 2 * N + i1, "=="),
        ConditionCheck("even_index_lower", i_even, 2 * N - e_half, ">="),
        ConditionCheck("even_index_nullity_upper", i_even + nu_even,
                       2 * N + e_half, "<="),
        ConditionCheck("even_index_splitting_identity", i_even,
                       2 * N - s_plus - c_tot + 2 * delta_k, "=="),
        ConditionCheck("floor_construction_shape", m_k, lattice_m, "=="),
    )
    return PathVerification(k, conditions, sides)


def _verify_paths(seeds: Sequence[PathSeed], mis: Sequence[MeanIndex], M: int,
                  N: int, m: Sequence[int], chi: Sequence[int], delta: Fraction,
                  budget: Optional[int],
                  required_sides: Optional[Sequence[tuple[str, ...]]] = None,
                  early_exit: bool = False) -> Optional[tuple[PathVerification, ...]]:
    records = []
    for k, seed in enumerate(seeds):
        rec = _verify_one_path(seed, k, N, m[k], chi[k], M, delta, mis[k], budget)
        if required_sides is not None and required_sides[k] is not None:
            if rec.irrational_rotation_sides() != tuple(required_sides[k]):
                if early_exit:
                    return None
        if early_exit and not rec.passed:
            return None
        records.append(rec)
    return tuple(records)


def verify_tuple(t: JumpTuple, seeds: Sequence[PathSeed],
                 budget: Optional[int] = None) -> TupleVerification:
    """Re-evaluate every condition of a tuple from scratch."""
    seeds = tuple(seeds)
    if not seeds:
        raise ValueError("empty seed list")
    if len(t.m) != len(seeds) or len(t.chi) != len(seeds):
        raise ValueError(
            f"tuple holds {len(t.m)} paths but {len(seeds)} seeds were given")
    M = angle_period(seeds)
    mis = [mean_index(s) for s in seeds]
    records = _verify_paths(seeds, mis, M, t.N, t.m, t.chi, t.delta, budget,
                            early_exit=False)
    return TupleVerification(records)


# -- search ------------------------------------------------------------------


def find_jump_tuples(seeds: Sequence[PathSeed], delta: Fraction = Fraction(1, 1000),
                     n_max: int = 10**6, limit: int = 3, *,
                     budget: Optional[int] = None,
                     required_sides: Optional[Sequence[Optional[tuple[str, ...]]]] = None,
                     exclude: Iterable[int] = (),
                     n_min: int = 1,
                     workers: int = 1,
                     progress: Optional[Callable[[int, int], None]] = None) -> list[JumpTuple]:
    """Scan for up to ``limit`` verified jump tuples with n_min <= N <= n_max.

    ``required_sides``, when given, restricts which side of an integer
    each irrational rotation angle multiple must fall on, per seed (used
    to build complementary tuples).  ``exclude`` skips listed N values.
    Raises NoTupleFound if the scan exhausts its bound with no hit.
    """
    seeds = tuple(seeds)
    if not seeds:
        raise ValueError("at least one seed is required")
    delta = Fraction(delta)
    if not 0 < delta < Fraction(1, 2):
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    if n_max < 1 or limit < 1 or n_min < 1:
        raise ValueError("n_max, n_min and limit must be positive")
    mis = [mean_index(s) for s in seeds]
    for k, mi in enumerate(mis):
        if mi.cmp(0, budget) <= 0:
            raise ValueError(f"seed {k}: mean index must be positive")
    M = angle_period(seeds)
    exclude_set = frozenset(exclude)

    seed1, mi1 = seeds[0], mis[0]
    d1 = seed1.decomp
    # i(2m+1) >= (2m+1)*mean - slack, so the candidate N = (i(2m+1) - i1)/2
    # can only keep growing once the bound below passes the target.
    slack = 3 * d1.r + 2 * d1.r_star + d1.p_minus + d1.p_zero + d1.q_zero + d1.q_plus
    mi1_lo = mi1.exact() if mi1.is_exact else mi1.enclosure(Fraction(1, 10**6), budget)[0]

    def n_lower_bound(m1: int) -> Fraction:
        return ((2 * m1 + 1) * mi1_lo - slack - seed1.i1) / 2

    def scan_chunk(start_step: int) -> list[JumpTuple]:
        hits = []
        for step in range(start_step, start_step + _CHUNK):
            m1 = step * M
            c = index_iterate(seed1, 2 * m1 + 1, budget) - seed1.i1
            if c <= 0 or c % 2:
                continue
            N = c // 2
            if N > n_max or N < n_min or N in exclude_set:
                continue
            chi1 = m1 // M - mi1.floor_quotient(N, M, budget)
            if chi1 not in (0, 1):
                continue
            sides1 = _sides_for(seed1, m1, delta, budget)
            if any(s.side == "mid" for s in sides1):
                continue
            if required_sides is not None and required_sides[0] is not None:
                got = tuple(s.side for s in sides1
                            if s.kind == "theta" and not s.rational)
                if got != tuple(required_sides[0]):
                    continue
            options = [[(m1, chi1)]]
            feasible = True
            for k in range(1, len(seeds)):
                t_k = mis[k].floor_quotient(N, M, budget)
                opts = []
                for chi_k in (0, 1):
                    m_k = (t_k + chi_k) * M
                    if m_k < 1:
                        continue
                    if index_iterate(seeds[k], 2 * m_k + 1, budget) != 2 * N + seeds[k].i1:
                        continue
                    opts.append((m_k, chi_k))
                if not opts:
                    feasible = False
                    break
                options.append(opts)
            if not feasible:
                continue
            for combo in itertools.product(*options):
                m = tuple(mc[0] for mc in combo)
                chi = tuple(mc[1] for mc in combo)
                records = _verify_paths(seeds, mis, M, N, m, chi, delta, budget,
                                        required_sides=required_sides, early_exit=True)
                if records is not None:
                    hits.append(JumpTuple(N, m, chi, M, delta, records))
        return hits

    hits: list[JumpTuple] = []
    stop_after: Optional[Fraction] = None

    def consume(chunk_hits: list[JumpTuple], last_step: int) -> bool:
        nonlocal stop_after
        hits.extend(chunk_hits)
        if progress is not None:
            progress(last_step * M, n_max)
        if len(hits) >= limit and stop_after is None:
            cutoff = sorted(t.N for t in hits)[limit - 1]
            stop_after = Fraction(cutoff)
        bound = n_lower_bound(last_step * M)
        if stop_after is not None and bound > stop_after:
            return True
        return bound > n_max

    step = 1
    if workers <= 1:
        while True:
            if consume(scan_chunk(step), step + _CHUNK - 1):
                break
            step += _CHUNK
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pending = {}
            done = False
            while not done:
                while len(pending) < workers:
                    pending[step] = pool.submit(scan_chunk, step)
                    step += _CHUNK
                first = min(pending)
                done = consume(pending.pop(first).result(), first + _CHUNK - 1)

    hits.sort(key=JumpTuple.sort_key)
    if not hits:
        raise NoTupleFound(
            f"no jump tuple with N <= {n_max} at delta = {delta}; "
            f"raise n_max or loosen delta")
    return hits[:limit]


def flipped_sides(t: JumpTuple) -> tuple[tuple[str, ...], ...]:
    """Opposite side pattern for every irrational rotation angle."""
    flip = {"low": "high", "high": "low"}
    return tuple(tuple(flip[s] for s in pv.irrational_rotation_sides())
                 for pv in t.per_path)


def find_complementary_tuples(seeds: Sequence[PathSeed], first: JumpTuple,
                              delta: Optional[Fraction] = None,
                              n_max: int = 10**6, limit: int = 1,
                              **kwargs) -> list[JumpTuple]:
    """Tuples whose irrational rotation angles all land on the opposite
    side from ``first``, so the two near-integer counts add up to the
    full irrational rotation census."""
    if delta is None:
        delta = first.delta
    return find_jump_tuples(seeds, delta, n_max, limit,
                            required_sides=flipped_sides(first),
                            exclude={first.N}, **kwargs)


# -- jump-side quantities ------------------------------------------------------


def compute_delta(seed: PathSeed, m_k: int, delta: Fraction,
                  budget: Optional[int] = None,
                  complement_m: Optional[int] = None) -> DeltaReport:
    """The near-integer splitting count at m_k, with its complement.

    The complement count is evaluated directly when the paired iterate
    is supplied, otherwise derived from the identity that the two counts
    exhaust the irrational rotation census.
    """
    delta = Fraction(delta)
    d = seed.decomp
    dk = delta_from_sides(seed, _sides_for(seed, m_k, delta, budget))
    irr_census = (d.r - d.r_prime) + 2 * (d.r_star - d.r_star_prime)
    if dk > (d.r - d.r_prime) + (d.r_star - d.r_star_prime):
        raise ConstraintViolation(
            f"near-integer count {dk} exceeds the irrational rotation census; "
            f"m_k = {m_k} does not come from a verified tuple")
    if complement_m is not None:
        dkp = delta_from_sides(seed, _sides_for(seed, complement_m, delta, budget))
        if dk + dkp != irr_census:
            raise ConstraintViolation(
                f"counts {dk} + {dkp} != {irr_census}: iterates {m_k}, {complement_m} "
                f"are not a complementary pair")
    else:
        dkp = irr_census - dk
    return DeltaReport(dk, dkp, c_total(d), splitting_plus_at_one(d))


def index_at_even_jump(seed: PathSeed, N: int, delta_k: int) -> int:
    """Closed form for the even-iterate index: 2N - S^+ - C + 2*delta_k."""
    return 2 * N - splitting_plus_at_one(seed.decomp) - c_total(seed.decomp) + 2 * delta_k
