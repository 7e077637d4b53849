"""Finite presentations of reduced linearly ordered monoids.

A backend is a `MonoidSpec`: either an explicit positive generator list
(integers, rationals, or plane points) or a named truncated family with a
depth parameter.  On top of a spec we decide membership exactly, enumerate
divisors, compute atoms, and enumerate complete factorizations.

Membership and factorization share one engine: a depth-first enumeration of
coefficient vectors over the generators.  For rational backends the search is
pruned hard by p-adic congruences -- when a prime p divides the denominator
of exactly one remaining generator g, the coefficient of g is forced into a
single residue class mod p^e, which is what keeps truncated Puiseux families
with large denominators tractable.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Optional, Sequence

from .arith import (
    Element,
    InvalidInputError,
    QPoint2,
    QPOINT_ZERO,
    Rat,
    parse_element,
    primes_from,
    primes_geq,
    render_element,
    vp_value,
)

DEFAULT_BUDGET = 10**6

FAMILY_TAGS = ("EX44", "RANK2-5.3", "Q-ODDPRIMES")


class BudgetExceededError(RuntimeError):
    """A search ran out of its node budget.  Carries partial progress."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class TruncationError(RuntimeError):
    """A family truncation is too shallow for the requested computation."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class Budget:
    """A mutable node counter shared across the sub-searches of one query."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: int = DEFAULT_BUDGET):
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1, partial=None) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceededError(
                f"search budget of {self.limit} nodes exceeded", partial=partial
            )


def as_budget(budget: "Budget | int | None") -> Budget:
    if budget is None:
        return Budget()
    if isinstance(budget, Budget):
        return budget
    return Budget(int(budget))


# ---------------------------------------------------------------------------
# Specs


@dataclass(frozen=True)
class MonoidSpec:
    """A finite presentation: explicit generators or a named truncated family.

    Generators are strictly positive, deduplicated, and sorted; truncated
    families expand deterministically given their depth (and, for the rank-2
    family, a finite sample of second-coordinate seeds).
    """

    kind: str  # numerical | puiseux | rank2 | family
    generators: tuple = ()
    family: Optional[str] = None
    depth: Optional[int] = None
    sample: tuple = ()

    def __post_init__(self):
        if self.kind == "family":
            if self.family not in FAMILY_TAGS:
                raise InvalidInputError(f"unknown family tag {self.family!r}")
            if self.depth is None or self.depth < 1:
                raise InvalidInputError("family depth must be >= 1")
            object.__setattr__(self, "sample", tuple(sorted(set(self.sample))))
            return
        if self.kind not in ("numerical", "puiseux", "rank2"):
            raise InvalidInputError(f"unknown spec kind {self.kind!r}")
        gens = tuple(sorted(set(self.generators)))
        if not gens:
            raise InvalidInputError("empty generator list")
        if len(gens) < len(self.generators):
            raise InvalidInputError("duplicate generator after reduction")
        zero = QPOINT_ZERO if self.kind == "rank2" else Fraction(0)
        for g in gens:
            if self.kind == "rank2" and not isinstance(g, QPoint2):
                raise InvalidInputError("rank2 spec requires plane-point generators")
            if self.kind != "rank2" and isinstance(g, QPoint2):
                raise InvalidInputError("rank-1 spec requires rational generators")
            if not g > zero:
                raise InvalidInputError(f"generator {g!r} is not strictly positive")
        if self.kind == "numerical" and any(g.denominator != 1 for g in gens):
            raise InvalidInputError("numerical spec requires integer generators")
        object.__setattr__(self, "generators", gens)

    # -- convenience constructors ------------------------------------------
    @classmethod
    def numerical(cls, *gens: int) -> "MonoidSpec":
        return cls("numerical", tuple(Fraction(g) for g in gens))

    @classmethod
    def puiseux(cls, *gens) -> "MonoidSpec":
        return cls("puiseux", tuple(Fraction(g) for g in gens))

    @classmethod
    def rank2(cls, *gens: QPoint2) -> "MonoidSpec":
        return cls("rank2", tuple(gens))

    @classmethod
    def of_family(cls, family: str, depth: int, sample: Iterable[Rat] = ()) -> "MonoidSpec":
        return cls("family", family=family, depth=depth, sample=tuple(sample))

    # ----------------------------------------------------------------------
    @property
    def is_rank2(self) -> bool:
        if self.kind == "family":
            return self.family == "RANK2-5.3"
        return self.kind == "rank2"

    @property
    def zero(self) -> Element:
        return QPOINT_ZERO if self.is_rank2 else Fraction(0)

    @property
    def is_truncated_family(self) -> bool:
        return self.kind == "family"

    def expanded(self) -> "MonoidSpec":
        if self.kind != "family":
            return self
        return expand_family(self.family, self.depth, self.sample)

    def check_element(self, q: Element) -> None:
        if self.is_rank2 != isinstance(q, QPoint2):
            raise InvalidInputError(
                f"element {q!r} does not match spec of kind {self.kind!r}"
            )


def _ex44_generators(depth: int, prime_offset: int = 0) -> tuple[Rat, ...]:
    # p_k below is the k-th prime >= 5 (1-indexed), shifted by the offset knob.
    count = 2 * depth + 2 + prime_offset
    ps = primes_geq(5, count)

    def p(k: int) -> int:
        return ps[k - 1 + prime_offset]

    gens = []
    for n in range(depth):
        gens.append(Fraction(1, 2**n * p(2 * n + 2)))
        gens.append(Fraction(1, p(2 * n + 1)) * (Fraction(1, 3) + Fraction(1, 2**n)))
    return tuple(gens)


def ex44_a1_atoms(depth: int, prime_offset: int = 0) -> tuple[Rat, ...]:
    return tuple(g for i, g in enumerate(_ex44_generators(depth, prime_offset)) if i % 2 == 0)


def ex44_a2_atoms(depth: int, prime_offset: int = 0) -> tuple[Rat, ...]:
    return tuple(g for i, g in enumerate(_ex44_generators(depth, prime_offset)) if i % 2 == 1)


def expand_family(
    family: str, depth: int, sample: Iterable[Rat] = (), prime_offset: int = 0
) -> MonoidSpec:
    """Expand a named truncated family into an explicit generator list."""
    if depth is None or depth < 1:
        raise InvalidInputError("family depth must be >= 1")
    if family == "EX44":
        return MonoidSpec("puiseux", _ex44_generators(depth, prime_offset))
    if family == "Q-ODDPRIMES":
        return MonoidSpec(
            "puiseux", tuple(Fraction(1, p) for p in primes_geq(3, depth))
        )
    if family == "RANK2-5.3":
        from .atomicity import rank2_atom  # deferred: atomicity builds on this module

        gens: list[QPoint2] = []
        for q in sample:
            gens.append(rank2_atom(Fraction(q), "A"))
            gens.append(rank2_atom(Fraction(q), "B"))
        for n in range(1, depth + 1):
            gens.append(QPoint2(Fraction(0), Fraction(1, 2**n)))
        if not gens:
            raise InvalidInputError("RANK2-5.3 needs a nonempty sample or depth")
        return MonoidSpec("rank2", tuple(gens))
    raise InvalidInputError(f"unknown family tag {family!r}")


# ---------------------------------------------------------------------------
# Coefficient-vector enumeration


def _den_primes(n: int) -> tuple[int, ...]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return tuple(out)


def _crt(pairs: Sequence[tuple[int, int]]) -> tuple[int, int]:
    # pairs of (modulus, residue) with pairwise coprime moduli
    mod, res = 1, 0
    for m, r in pairs:
        inv = pow(mod, -1, m)
        res = res + mod * ((r - res) * inv % m)
        mod *= m
    return mod, res % mod


def _coefficient_progression(q: Rat, g: Rat, later: Sequence[Rat]) -> Optional[tuple[int, int]]:
    """Admissible coefficients of g in a representation of q, as (start, step).

    For each prime p dividing d(g) but no later generator's denominator, the
    residual after removing k copies of g must have nonnegative p-adic
    valuation, which pins k to one residue class mod p^e.  Returns None when
    no coefficient can work.
    """
    congruences: list[tuple[int, int]] = []
    later_dens = [h.denominator for h in later]
    for p in _den_primes(g.denominator):
        if any(d % p == 0 for d in later_dens):
            continue
        e = -vp_value(p, g)
        t = q / g
        if t != 0 and vp_value(p, t) < 0:
            return None
        mod = p**e
        td = t.denominator
        k0 = t.numerator * pow(td, -1, mod) % mod
        congruences.append((mod, k0))
    if not congruences:
        return 0, 1
    mod, res = _crt(congruences)
    return res, mod


def _solutions_rank1(
    q: Rat,
    gens: tuple[Rat, ...],
    budget: Budget,
    first_only: bool,
    results: list[tuple[int, ...]],
    prefix: list[int],
) -> bool:
    budget.spend(partial=list(results))
    if q == 0:
        results.append(tuple(prefix) + (0,) * (len(gens)))
        return True
    if q < 0 or not gens:
        return False
    for p in _den_primes(q.denominator):
        if not any(g.denominator % p == 0 for g in gens):
            return False
    g, rest = gens[0], gens[1:]
    prog = _coefficient_progression(q, g, rest)
    if prog is None:
        return False
    start, step = prog
    kmax = int(q / g)
    found = False
    for k in range(start, kmax + 1, step):
        prefix.append(k)
        if _solutions_rank1(q - k * g, rest, budget, first_only, results, prefix):
            found = True
            prefix.pop()
            if first_only:
                return True
            continue
        prefix.pop()
    # a bare residual of zero copies of g is covered by k = 0 above
    return found


def _solutions_rank2(
    q: QPoint2,
    gens: tuple[QPoint2, ...],
    budget: Budget,
    first_only: bool,
    results: list[tuple[int, ...]],
    prefix: list[int],
) -> bool:
    budget.spend(partial=list(results))
    if q == QPOINT_ZERO:
        results.append(tuple(prefix) + (0,) * (len(gens)))
        return True
    if q.x < 0 or q.y < 0 or not gens:
        return False
    if q.y > 0 and all(g.y == 0 for g in gens):
        return False
    if q.x > 0 and all(g.x == 0 for g in gens):
        return False
    g, rest = gens[0], gens[1:]
    bounds = []
    if g.y > 0:
        bounds.append(int(q.y / g.y))
    if g.x > 0:
        bounds.append(int(q.x / g.x))
    kmax = min(bounds)
    found = False
    for k in range(kmax + 1):
        prefix.append(k)
        if _solutions_rank2(
            QPoint2(q.x - k * g.x, q.y - k * g.y), rest, budget, first_only, results, prefix
        ):
            found = True
            prefix.pop()
            if first_only:
                return True
            continue
        prefix.pop()
    return found


def representations(
    b: Element,
    spec: MonoidSpec,
    budget: "Budget | int | None" = None,
    over: Optional[tuple] = None,
) -> list[tuple[int, ...]]:
    """All coefficient vectors writing b over the spec's generators.

    The vectors are indexed by the (sorted) generator tuple; pass `over` to
    enumerate over a different basis, e.g. the atom list.
    """
    spec = spec.expanded()
    spec.check_element(b)
    bud = as_budget(budget)
    basis = tuple(over) if over is not None else spec.generators
    ordered = tuple(sorted(basis, reverse=True))
    results: list[tuple[int, ...]] = []
    if spec.is_rank2:
        _solutions_rank2(b, ordered, bud, False, results, [])
    else:
        _solutions_rank1(b, ordered, bud, False, results, [])
    # re-index from the internal descending order back to the basis order
    index = {g: i for i, g in enumerate(ordered)}
    out = []
    for vec in results:
        out.append(tuple(vec[index[g]] for g in basis))
    return sorted(set(out))


_member_cache: dict[tuple[MonoidSpec, Element], bool] = {}


def member(q: Element, spec: MonoidSpec, budget: "Budget | int | None" = None) -> bool:
    """Exact membership: is q a nonnegative-integer combination of generators?"""
    spec = spec.expanded()
    spec.check_element(q)
    if q < spec.zero:
        return False
    key = (spec, q)
    cached = _member_cache.get(key)
    if cached is not None:
        return cached
    bud = as_budget(budget)
    results: list[tuple[int, ...]] = []
    ordered = tuple(sorted(spec.generators, reverse=True))
    if spec.is_rank2:
        ok = _solutions_rank2(q, ordered, bud, True, results, [])
    else:
        ok = _solutions_rank1(q, ordered, bud, True, results, [])
    _member_cache[key] = ok
    return ok


def divides(d: Element, b: Element, spec: MonoidSpec, budget: "Budget | int | None" = None) -> bool:
    """d divides b in the monoid: b - d is a member."""
    spec = spec.expanded()
    r = b - d
    if r < spec.zero:
        return False
    return member(r, spec, budget)


_divisor_cache: dict[tuple[MonoidSpec, Element], tuple] = {}


def divisors(b: Element, spec: MonoidSpec, budget: "Budget | int | None" = None) -> list:
    """The full divisor set {d in M : d | b}, sorted.

    Every divisor is a sub-multiset sum of some generator representation of
    b, so we enumerate representations and collect their partial sums.
    """
    spec = spec.expanded()
    key = (spec, b)
    cached = _divisor_cache.get(key)
    if cached is not None:
        return list(cached)
    bud = as_budget(budget)
    reps = representations(b, spec, bud)
    gens = spec.generators
    found: set = set()
    for vec in reps:
        used = [(g, c) for g, c in zip(gens, vec) if c]
        ranges = [range(c + 1) for _, c in used]
        for combo in itertools.product(*ranges):
            bud.spend(partial=sorted(found))
            d = spec.zero
            for (g, _), k in zip(used, combo):
                if k:
                    d = d + k * g
            found.add(d)
    out = sorted(found)
    _divisor_cache[key] = tuple(out)
    return out


def atoms(spec: MonoidSpec, budget: "Budget | int | None" = None) -> list:
    """Generators that are not sums of the remaining generators.

    Shortcut: a generator whose denominator carries a prime that no other
    generator's denominator does can never be expressed over the others, so
    it is an atom without any search.
    """
    spec = spec.expanded()
    bud = as_budget(budget)
    gens = spec.generators
    out = []
    for g in gens:
        others = tuple(h for h in gens if h != g)
        if not others:
            out.append(g)
            continue
        if not spec.is_rank2:
            other_dens = [h.denominator for h in others]
            if any(
                all(d % p for d in other_dens) for p in _den_primes(g.denominator)
            ):
                out.append(g)
                continue
        sub = MonoidSpec(spec.kind, others)
        if not member(g, sub, bud):
            out.append(g)
    return out


@dataclass(frozen=True)
class Factorization:
    """A multiset of (atom, multiplicity) pairs summing to the factored element."""

    parts: tuple  # tuple[(Element, int), ...] sorted by atom, multiplicities >= 1

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(sorted(self.parts)))
        if any(m < 1 for _, m in self.parts):
            raise InvalidInputError("factorization multiplicities must be >= 1")

    def total(self, zero: Element = Fraction(0)) -> Element:
        s = zero
        for a, m in self.parts:
            s = s + m * a
        return s

    @property
    def length(self) -> int:
        return sum(m for _, m in self.parts)

    def multiplicity(self, atom: Element) -> int:
        for a, m in self.parts:
            if a == atom:
                return m
        return 0

    def __iter__(self):
        return iter(self.parts)

    def render(self) -> str:
        if not self.parts:
            return "(empty)"
        return " + ".join(f"{m}*({render_element(a)})" for a, m in self.parts)


def factorizations(
    b: Element, spec: MonoidSpec, budget: "Budget | int | None" = None
) -> list[Factorization]:
    """The complete list Z(b) of factorizations of b into atoms."""
    spec = spec.expanded()
    bud = as_budget(budget)
    atom_list = tuple(atoms(spec, bud))
    reps = representations(b, spec, bud, over=atom_list)
    out = []
    for vec in reps:
        parts = tuple((a, c) for a, c in zip(atom_list, vec) if c)
        out.append(Factorization(parts))
    return out


def members_upto(
    spec: MonoidSpec, bound: Rat, budget: "Budget | int | None" = None
) -> list:
    """All members of a rank-1 spec in [0, bound], sorted."""
    spec = spec.expanded()
    if spec.is_rank2:
        raise InvalidInputError("members_upto supports rank-1 specs only")
    bud = as_budget(budget)
    found: set = set()

    def walk(gens: tuple[Rat, ...], acc: Rat) -> None:
        bud.spend(partial=sorted(found))
        found.add(acc)
        if not gens:
            return
        g, rest = gens[0], gens[1:]
        kmax = int((bound - acc) / g)
        for k in range(kmax + 1):
            walk(rest, acc + k * g)

    walk(tuple(sorted(spec.generators, reverse=True)), Fraction(0))
    return sorted(found)


def clear_caches() -> None:
    _member_cache.clear()
    _divisor_cache.clear()


# ---------------------------------------------------------------------------
# Spec file grammar, shared by library and CLI:
#   kind numerical|puiseux|rank2|family
#   gens 2, 3            (or rationals `1/7, 4/15`, or points `(0,1/2), ...`)
#   family EX44 depth 3
#   sample 7/3, 32/15    (seeds for the RANK2-5.3 family)


def _split_top_level(text: str) -> list[str]:
    # split on commas that are not inside parentheses
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return [p.strip() for p in parts if p.strip()]


def parse_monoid_spec(text: str) -> MonoidSpec:
    kind = None
    gens: list[Element] = []
    family = None
    depth = None
    sample: list[Rat] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "kind":
                kind = rest
            elif word == "gens":
                gens.extend(parse_element(t) for t in _split_top_level(rest))
            elif word == "family":
                fields = rest.split()
                family = fields[0]
                if len(fields) >= 3 and fields[1] == "depth":
                    depth = int(fields[2])
            elif word == "sample":
                sample.extend(Fraction(parse_element(t)) for t in _split_top_level(rest))
            else:
                raise InvalidInputError(f"unknown directive {word!r}")
        except InvalidInputError as exc:
            raise InvalidInputError(f"line {lineno}: {exc}") from exc
    if kind == "family" or (kind is None and family is not None):
        return MonoidSpec.of_family(family, depth if depth is not None else 1, sample)
    if kind is None:
        raise InvalidInputError("missing `kind` directive")
    return MonoidSpec(kind, tuple(gens))


def render_monoid_spec(spec: MonoidSpec) -> str:
    if spec.kind == "family":
        lines = ["kind family", f"family {spec.family} depth {spec.depth}"]
        if spec.sample:
            lines.append("sample " + ", ".join(render_element(q) for q in spec.sample))
        return "\n".join(lines) + "\n"
    gens = ", ".join(render_element(g) for g in spec.generators)
    return f"kind {spec.kind}\ngens {gens}\n"
