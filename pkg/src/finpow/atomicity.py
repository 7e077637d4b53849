"""Atomicity-hierarchy predicates: ascending-chain exploration, atom-divisor
extraction in the power monoid, finite-factorization counting, the canonical
decomposition of rationals over odd-prime unit fractions, the rank-2 atom
construction, and the first-coordinate projection-gap checker.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .arith import Element, InvalidInputError, QPoint2, Rat, is_prime, primes_from, vp_value
from .backend import (
    Budget,
    MonoidSpec,
    as_budget,
    atoms,
    divisors,
    factorizations,
    member,
    members_upto,
)
from .power import FinSet, is_p_atom, singleton, sumset_all, zero_set
from .mcd import _singleton_divisors, p_divisors


@dataclass(frozen=True)
class ChainReport:
    """A strictly-proper divisibility chain found by depth-first search."""

    start: object
    chain: tuple
    stabilized: bool

    @property
    def length(self) -> int:
        return len(self.chain)

    @property
    def cardinality_profile(self) -> tuple:
        if not self.chain or not isinstance(self.chain[0], FinSet):
            raise InvalidInputError("cardinality profile is defined for set chains")
        return tuple(len(s) for s in self.chain)


def accp_chain_explore(
    b: Element, spec: MonoidSpec, maxlen: int = 32, budget: "Budget | int | None" = None
) -> ChainReport:
    """Longest chain b = b_0, b_1, ... with each b_{i+1} a proper divisor of
    b_i.  stabilized is True when the final element has no proper divisor."""
    spec = spec.expanded()
    bud = as_budget(budget)
    memo: dict = {}

    def longest(x, depth):
        if depth >= maxlen:
            return [x], False
        if x in memo:
            return memo[x]
        best, done = [x], True
        for d in sorted(divisors(x, spec, bud), reverse=True):
            if d == x:
                continue
            tail, tail_done = longest(d, depth + 1)
            if len(tail) + 1 > len(best):
                best, done = [x] + tail, tail_done
        if done:
            memo[x] = (best, done)
        return best, done

    chain, stabilized = longest(b, 0)
    return ChainReport(b, tuple(chain), stabilized)


def p_accp_chain_explore(
    s: FinSet, spec: MonoidSpec, maxlen: int = 16, budget: "Budget | int | None" = None
) -> ChainReport:
    """Longest strictly-proper divisibility chain of finite sets from s.

    The cardinality profile along any such chain is non-increasing, which is
    what forces stabilization."""
    spec = spec.expanded()
    bud = as_budget(budget)
    memo: dict = {}

    def longest(t: FinSet, depth):
        if depth >= maxlen:
            return [t], False
        if t.elems in memo:
            return memo[t.elems]
        best, done = [t], True
        for u in p_divisors(t, spec, bud):
            if u == t:
                continue
            tail, tail_done = longest(u, depth + 1)
            if len(tail) + 1 > len(best):
                best, done = [t] + tail, tail_done
        if done:
            memo[t.elems] = (best, done)
        return best, done

    chain, stabilized = longest(s, 0)
    return ChainReport(s, tuple(chain), stabilized)


@dataclass(frozen=True)
class SampleReport:
    ok: bool
    counterexample: object = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_furstenberg_sample(
    spec: MonoidSpec, bound: Rat, budget: "Budget | int | None" = None
) -> SampleReport:
    """True iff every nonzero member below the bound is divisible by an atom."""
    if bound <= 0:
        raise InvalidInputError("bound must be positive")
    spec = spec.expanded()
    bud = as_budget(budget)
    ats = atoms(spec, bud)
    for b in members_upto(spec, bound, bud):
        if b == 0:
            continue
        if not any(a <= b and member(b - a, spec, bud) for a in ats):
            return SampleReport(False, counterexample=b)
    return SampleReport(True)


def p_furstenberg_divisor(
    s: FinSet, spec: MonoidSpec, budget: "Budget | int | None" = None
) -> FinSet:
    """A certified atom of the power monoid dividing s.

    Dichotomy: when s has a nonzero singleton divisor {d}, any atom dividing
    d serves; otherwise a minimal-cardinality non-singleton divisor of s is
    itself an atom (certified, with recursive fallback)."""
    spec = spec.expanded()
    bud = as_budget(budget)
    if s == zero_set(spec):
        raise InvalidInputError("the zero set has no atom divisor")
    if is_p_atom(s, spec, bud).is_atom:
        return s
    single = [d for d in _singleton_divisors(s, spec, bud) if d != spec.zero]
    if single:
        d = max(single)
        for a in atoms(spec, bud):
            if a <= d and member(d - a, spec, bud):
                return singleton(a)
        raise InvalidInputError(f"no atom divides {d}")
    cands = sorted(
        (u for u in p_divisors(s, spec, bud) if len(u) >= 2 and u != s),
        key=lambda u: (len(u), u.elems),
    )
    for u in cands:
        if is_p_atom(u, spec, bud).is_atom:
            return u
    for u in cands:
        return p_furstenberg_divisor(u, spec, bud)
    raise InvalidInputError(f"no atom divisor found for {s.render()}")


def atom_divisors(
    b: Element, spec: MonoidSpec, budget: "Budget | int | None" = None
) -> list:
    """All atoms of the monoid dividing b."""
    spec = spec.expanded()
    bud = as_budget(budget)
    return [a for a in atoms(spec, bud) if a <= b and member(b - a, spec, bud)]


def ffm_count(b: Element, spec: MonoidSpec, budget: "Budget | int | None" = None) -> int:
    """Exact number of factorizations of b into atoms."""
    return len(factorizations(b, spec, as_budget(budget)))


@dataclass(frozen=True)
class DescentReport:
    ok: bool
    max_descent: int = 0
    counterexample: object = None

    def __bool__(self) -> bool:
        return self.ok


def tidf_implies_atomic_check(
    spec: MonoidSpec, bound: Rat, budget: "Budget | int | None" = None
) -> DescentReport:
    """Replay the atomicity descent from every member below the bound:
    repeatedly subtract the minimum atom divisor and confirm termination at 0
    within ceil(b / min atom) steps."""
    spec = spec.expanded()
    if spec.is_rank2:
        raise InvalidInputError("descent check requires a rank-1 positive backend")
    bud = as_budget(budget)
    min_atom = min(atoms(spec, bud))
    worst = 0
    for b in members_upto(spec, bound, bud):
        if b == 0:
            continue
        q, steps = b, 0
        limit = math.ceil(b / min_atom)
        while q != 0:
            advs = atom_divisors(q, spec, bud)
            if not advs or steps >= limit:
                return DescentReport(False, counterexample=b)
            q -= min(advs)
            steps += 1
        worst = max(worst, steps)
    return DescentReport(True, max_descent=worst)


# ---------------------------------------------------------------------------
# Canonical decomposition over the odd-prime unit fractions


@dataclass(frozen=True)
class CanonicalDecompQ:
    """q = ell + sum of coeffs[p]/p with each coefficient in [0, p-1]; the
    integer part ell is maximal.  k = 2 - ell."""

    ell: int
    coeffs: tuple  # sorted tuple of (prime, coefficient)

    @property
    def k(self) -> int:
        return 2 - self.ell

    @property
    def value(self) -> Rat:
        return Fraction(self.ell) + sum(
            (Fraction(c, p) for p, c in self.coeffs), Fraction(0)
        )


def canonical_decomp_Q(q: Rat) -> CanonicalDecompQ:
    """Decompose q as a maximal integer plus reduced odd-prime unit-fraction
    multiples.  Defined exactly on the difference group of the monoid
    generated by {1/p : p odd prime}."""
    q = Fraction(q)
    den = q.denominator
    if den % 2 == 0:
        raise InvalidInputError(f"{q} has even denominator")
    coeffs = []
    rest = q
    p = 3
    d = den
    while d > 1:
        while d % p:
            p += 2
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if e > 1:
            raise InvalidInputError(f"{q} has a repeated odd prime in its denominator")
        c = q.numerator * pow(q.denominator // p, -1, p) % p
        coeffs.append((p, c))
        rest -= Fraction(c, p)
    if rest.denominator != 1:
        raise InvalidInputError(f"{q} is not a sum of odd-prime unit fractions")
    return CanonicalDecompQ(int(rest), tuple(coeffs))


def k_of(q: Rat) -> int:
    return canonical_decomp_Q(q).k


def rank2_atom(q: Rat, branch: str) -> QPoint2:
    """The rank-2 atom attached to q on branch A (first coordinate 1/5) or
    branch B (first coordinate 1/7)."""
    q = Fraction(q)
    if not Fraction(2) < q < Fraction(3):
        raise InvalidInputError(f"{q} is outside (2, 3)")
    if branch not in ("A", "B"):
        raise InvalidInputError("branch must be 'A' or 'B'")
    x = Fraction(1, 5) if branch == "A" else Fraction(1, 7)
    return QPoint2(x, q + Fraction(1, 2) ** k_of(q))


@dataclass(frozen=True)
class Lemma54Certificate:
    """An exact re-summable identity a_q + a_r = a_{q-1/p} + a_{r+1/p} +
    multiplicity * increment, with the increment a dyadic second-coordinate
    generator."""

    q: Rat
    r: Rat
    p: int
    branches: tuple
    left: tuple  # (atom for q, atom for r)
    right: tuple  # (atom for q - 1/p, atom for r + 1/p)
    increment: QPoint2
    multiplicity: int

    @property
    def left_sum(self) -> QPoint2:
        return self.left[0] + self.left[1]

    @property
    def right_sum(self) -> QPoint2:
        return self.right[0] + self.right[1] + self.multiplicity * self.increment

    def resums_exactly(self) -> bool:
        return self.left_sum == self.right_sum


def lemma54_sum_witness(
    q: Rat,
    r: Rat,
    branches: tuple = ("A", "B"),
    prime_floor: int = 5,
    search_cap: int = 10_000,
) -> Lemma54Certificate:
    """Express the sum of two atoms as a sum of two other atoms plus a dyadic
    increment, using the first odd prime p >= prime_floor at which both q and
    r have nonnegative valuation and q - 1/p, r + 1/p stay inside (2, 3)."""
    q, r = Fraction(q), Fraction(r)
    two, three = Fraction(2), Fraction(3)
    if not (two < q < three and two < r < three):
        raise InvalidInputError("both arguments must lie in (2, 3)")
    chosen = None
    for p in primes_from(max(prime_floor, 3)):
        if p > search_cap:
            break
        inv = Fraction(1, p)
        if (
            vp_value(p, q) >= 0
            and vp_value(p, r) >= 0
            and two < q - inv < three
            and two < r + inv < three
        ):
            chosen = p
            break
    if chosen is None:
        raise InvalidInputError(
            f"no admissible odd prime below {search_cap} for ({q}, {r})"
        )
    inv = Fraction(1, chosen)
    kq, kr = k_of(q), k_of(r)
    if k_of(q - inv) != kq + 1 or k_of(r + inv) != kr:
        raise InvalidInputError("canonical-index relations failed")
    left = (rank2_atom(q, branches[0]), rank2_atom(r, branches[1]))
    right = (rank2_atom(q - inv, branches[0]), rank2_atom(r + inv, branches[1]))
    if kq + 1 >= 1:
        increment = QPoint2(Fraction(0), Fraction(1, 2 ** (kq + 1)))
        multiplicity = 1
    else:
        increment = QPoint2(Fraction(0), Fraction(1))
        multiplicity = 2 ** (-(kq + 1))
    cert = Lemma54Certificate(
        q, r, chosen, tuple(branches), left, right, increment, multiplicity
    )
    if not cert.resums_exactly():
        raise InvalidInputError("certificate failed exact re-summation")
    return cert


# ---------------------------------------------------------------------------
# First-coordinate projection gap

PROJECTION_HEADS = (Fraction(0), Fraction(1, 5), Fraction(1, 7))
PROJECTION_GAP = Fraction(2, 35)
UNATTAINABLE_OFFSET = Fraction(1, 35)


@dataclass(frozen=True)
class ProjectionGapReport:
    ok: bool
    detail: str
    violation: object = None

    def __bool__(self) -> bool:
        return self.ok


def thm55_projection_check(
    atom_list: Sequence[FinSet],
    spec: MonoidSpec,
    budget: "Budget | int | None" = None,
) -> ProjectionGapReport:
    """Verify the projection-gap mechanism on a list of power-monoid atoms
    over rank-2 points: each atom's minimum has first coordinate 0, 1/5, or
    1/7, and in the total sumset every first-coordinate offset from the
    minimum is 0 or at least 2/35 — so an offset of exactly 1/35 never
    occurs.  The report covers the supplied atoms only."""
    spec = spec.expanded()
    bud = as_budget(budget)
    if not atom_list:
        return ProjectionGapReport(True, "mechanism verified (vacuous)")
    for a in atom_list:
        if a.min.x not in PROJECTION_HEADS:
            return ProjectionGapReport(
                False, "first-coordinate trichotomy violated", a
            )
        if not is_p_atom(a, spec, bud).is_atom:
            return ProjectionGapReport(False, "input set is not an atom", a)
    total = sumset_all(list(atom_list), spec)
    base = total.min.x
    for v in total:
        offset = v.x - base
        if offset == UNATTAINABLE_OFFSET:
            return ProjectionGapReport(False, "unattainable offset 1/35 attained", v)
        if offset != 0 and offset < PROJECTION_GAP:
            return ProjectionGapReport(False, "offset inside the gap", v)
    return ProjectionGapReport(True, "mechanism verified")
