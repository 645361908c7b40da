"""Digit-restricted self-similar sets ``K = {sum a_i q^-i : a_i in A}``."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, NamedTuple, Optional

from .digits import Word
from .errors import DomainError
from .numbers import PeriodicExpansion, rational_expansions


@dataclass(frozen=True)
class DigitIFS:
    """The IFS ``{x -> (x + c)/base : c in digits}``."""

    base: int
    digits: tuple[int, ...]

    def __init__(self, base: int, digits: Iterable[int]):
        digits = tuple(sorted(set(digits)))
        if base < 3:
            raise DomainError("bases below 3 are not supported")
        if len(digits) < 2:
            raise DomainError("a digit set needs at least two digits")
        if digits[0] < 0 or digits[-1] > base - 1:
            raise DomainError(f"digits must lie in [0, {base - 1}]")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "digits", digits)

    def __str__(self):
        return f"({self.base},{{{','.join(map(str, self.digits))}}})"

    @property
    def hull(self) -> tuple[Fraction, Fraction]:
        q = self.base
        return Fraction(self.digits[0], q - 1), Fraction(self.digits[-1], q - 1)

    @classmethod
    def parse(cls, base: int, text: str) -> "DigitIFS":
        try:
            return cls(base, (int(t) for t in text.split(",") if t.strip()))
        except ValueError:
            raise DomainError(f"cannot parse digit set {text!r}") from None


@dataclass(frozen=True)
class ConditionReport:
    is_endpoint_pair: bool
    main1_ok: bool
    unique_coding: bool


def validate_digit_set(ifs: DigitIFS) -> ConditionReport:
    q, a = ifs.base, set(ifs.digits)
    unique = not any(d + 1 in a for d in a)
    return ConditionReport(
        is_endpoint_pair=a == {0, q - 1},
        main1_ok=1 not in a and q - 1 in a and unique,
        unique_coding=unique,
    )


class Membership(NamedTuple):
    member: bool
    witness: Optional[PeriodicExpansion]

    def __bool__(self):
        return self.member


def member_rational(ifs: DigitIFS, r) -> Membership:
    """Exact membership of a rational via its eventually periodic expansions."""
    r = Fraction(r)
    lo, hi = ifs.hull
    if not lo <= r <= hi:
        raise DomainError(f"{r} lies outside the hull [{lo}, {hi}]")
    allowed = set(ifs.digits)
    for exp in rational_expansions(r, ifs.base):
        if allowed.issuperset(exp.digits()):
            return Membership(True, exp)
    return Membership(False, None)


@dataclass(frozen=True)
class CoverInterval:
    lo: Fraction
    hi: Fraction
    depth: int


def cover_intervals(ifs: DigitIFS, depth: int) -> Iterator[CoverInterval]:
    """All ``|A|**depth`` images of the hull, in lexicographic order of codes."""
    q = ifs.base
    lo, hi = ifs.hull
    scale = Fraction(1, q**depth)
    for word in product(ifs.digits, repeat=depth):
        off = sum(Fraction(d, q ** (i + 1)) for i, d in enumerate(word))
        yield CoverInterval(off + lo * scale, off + hi * scale, depth)


def in_cover(ifs: DigitIFS, point, depth: int) -> bool:
    """Whether ``point`` lies in the depth-``depth`` cover of the attractor.

    Depth-first descent on ``y -> q*y - c``; a branch is dropped as soon as
    ``y`` leaves the hull.  Only the numerator changes, so everything is
    integer arithmetic over the point's denominator.
    """
    if depth < 0:
        raise DomainError("depth must be nonnegative")
    point = Fraction(point)
    q = ifs.base
    num, den = point.numerator, point.denominator
    a_lo, a_hi = ifs.digits[0], ifs.digits[-1]

    def inside(p):
        return a_lo * den <= (q - 1) * p <= a_hi * den

    if not inside(num):
        return False
    stack = [(num, depth)]
    while stack:
        p, left = stack.pop()
        if left == 0:
            return True
        for c in ifs.digits:
            child = q * p - c * den
            if inside(child):
                stack.append((child, left - 1))
    return False


def coding_truncation(ifs: DigitIFS, word: Word) -> Fraction:
    if word.base != ifs.base:
        raise DomainError("word and digit set use different bases")
    allowed = set(ifs.digits)
    bad = [d for d in word.digits if d not in allowed]
    if bad:
        raise DomainError(f"digit {bad[0]} is not in {set(ifs.digits)}")
    return word.value()
