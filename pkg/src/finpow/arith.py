"""Exact rational arithmetic, p-adic valuations, prime streams, and the
lexicographically ordered plane points used by the rank-2 backend.

All values here are immutable and all functions are pure.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

Rat = Fraction


class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's contract."""


def reduce(num: int, den: int) -> Rat:
    """Canonical lowest-terms rational with positive denominator."""
    if den == 0:
        raise InvalidInputError("zero denominator")
    return Fraction(num, den)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_from(lower: int) -> Iterator[int]:
    """All primes >= lower, in increasing order."""
    n = max(lower, 2)
    while True:
        if is_prime(n):
            yield n
        n += 1


def primes_geq(lower: int, count: int) -> list[int]:
    """The first `count` primes >= lower, in increasing order."""
    if count < 0:
        raise InvalidInputError("count must be nonnegative")
    out: list[int] = []
    for p in primes_from(lower):
        if len(out) == count:
            break
        out.append(p)
    return out


@dataclass(frozen=True)
class PadicVal:
    """A p-adic valuation: a plain integer, or the infinity reserved for 0.

    Infinity is the tagged value ``PadicVal.infinity()``, never a magic number.
    """

    value: int | None  # None encodes infinity

    @classmethod
    def infinity(cls) -> "PadicVal":
        return cls(None)

    @classmethod
    def finite(cls, v: int) -> "PadicVal":
        return cls(int(v))

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __int__(self) -> int:
        if self.value is None:
            raise InvalidInputError("infinite valuation has no integer value")
        return self.value

    def _key(self) -> tuple[int, int]:
        # infinity sorts above every finite valuation
        return (1, 0) if self.value is None else (0, self.value)

    def __lt__(self, other: "PadicVal") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "PadicVal") -> bool:
        return self._key() <= other._key()

    def __add__(self, other: "PadicVal") -> "PadicVal":
        if self.value is None or other.value is None:
            return PadicVal.infinity()
        return PadicVal(self.value + other.value)

    def __repr__(self) -> str:
        return "PadicVal(inf)" if self.value is None else f"PadicVal({self.value})"


def _vp_int(p: int, n: int) -> int:
    # n != 0
    m = 0
    while n % p == 0:
        n //= p
        m += 1
    return m


def vp(p: int, q: Rat) -> PadicVal:
    """The exact p-adic valuation of a rational; infinity iff q = 0."""
    if not is_prime(p):
        raise InvalidInputError(f"{p} is not prime")
    if q == 0:
        return PadicVal.infinity()
    return PadicVal.finite(_vp_int(p, q.numerator) - _vp_int(p, q.denominator))


def vp_value(p: int, q: Rat) -> int:
    """Finite valuation of a nonzero rational, as a plain int."""
    v = vp(p, q)
    return int(v)


@dataclass(frozen=True, order=False)
class QPoint2:
    """A point of Q^2 ordered lexicographically with priority on y, then x."""

    x: Rat
    y: Rat

    def _key(self) -> tuple[Rat, Rat]:
        return (self.y, self.x)

    def __lt__(self, other: "QPoint2") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "QPoint2") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "QPoint2") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "QPoint2") -> bool:
        return self._key() >= other._key()

    def __add__(self, other: "QPoint2") -> "QPoint2":
        return QPoint2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "QPoint2") -> "QPoint2":
        return QPoint2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "QPoint2":
        return QPoint2(-self.x, -self.y)

    def __mul__(self, k: int) -> "QPoint2":
        return QPoint2(k * self.x, k * self.y)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"({render_rational(self.x)}, {render_rational(self.y)})"


QPOINT_ZERO = QPoint2(Fraction(0), Fraction(0))

Element = Union[Rat, QPoint2]


def zero_like(elem: Element) -> Element:
    return QPOINT_ZERO if isinstance(elem, QPoint2) else Fraction(0)


# ---------------------------------------------------------------------------
# Literal syntax shared by files, CLI arguments, and reports:
#   rational: `n/d` with optional sign, or `n` meaning n/1
#   plane point: `(x, y)`

def parse_rational(text: str) -> Rat:
    t = text.strip()
    try:
        if "/" in t:
            n, _, d = t.partition("/")
            return reduce(int(n.strip()), int(d.strip()))
        return Fraction(int(t))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInputError(f"bad rational literal {text!r}") from exc


def render_rational(q: Rat) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_qpoint(text: str) -> QPoint2:
    t = text.strip()
    if not (t.startswith("(") and t.endswith(")")):
        raise InvalidInputError(f"bad point literal {text!r}")
    parts = t[1:-1].split(",")
    if len(parts) != 2:
        raise InvalidInputError(f"bad point literal {text!r}")
    return QPoint2(parse_rational(parts[0]), parse_rational(parts[1]))


def parse_element(text: str) -> Element:
    t = text.strip()
    if t.startswith("("):
        return parse_qpoint(t)
    return parse_rational(t)


def render_element(e: Element) -> str:
    if isinstance(e, QPoint2):
        return repr(e)
    return render_rational(e)
