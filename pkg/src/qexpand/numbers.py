"""
Gap functions, checkpoint positions, Liouville-type constants and exact
rational expansions.

Rationals are plain :class:`fractions.Fraction` values throughout.  The
subtraction oracle at the bottom of the module is deliberately built only
from exact truncations and tail bounds; it shares nothing with the block
rewriter in :mod:`qexpand.translate` and is used to cross-check it.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .digits import (MAX_INDEX, DigitStream, IndicatorTail, Word, format_digits,
                     parse_digits, periodic_stream, runs_value)
from .errors import DomainError, HorizonError, IndexCeilingError

DEFAULT_GAP_CHECK = 40

FAMILIES = ("factorial", "power", "cubic")


@dataclass(frozen=True)
class GapFunction:
    """Integer function ``g`` whose consecutive differences grow without bound.

    Only three families are supported: ``factorial`` (k!), ``power`` (k**k)
    and ``cubic`` with coefficients ``(c3, c2, c1)``.
    """

    family: str = "factorial"
    coefficients: tuple[int, ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown gap family {self.family!r}")
        if self.family == "cubic":
            if len(self.coefficients) != 3:
                raise DomainError("cubic gap needs three coefficients c3,c2,c1")
        elif self.coefficients:
            raise DomainError(f"{self.family} gap takes no coefficients")

    def __call__(self, k: int) -> int:
        if k < 1:
            raise DomainError("gap functions are defined for k >= 1")
        if self.family == "factorial":
            return math.factorial(k)
        if self.family == "power":
            return k**k
        c3, c2, c1 = self.coefficients
        return c3 * k**3 + c2 * k**2 + c1 * k

    def __str__(self):
        if self.family == "cubic":
            return "cubic:" + ",".join(map(str, self.coefficients))
        return self.family

    @classmethod
    def parse(cls, text: str) -> "GapFunction":
        name, _, rest = text.partition(":")
        coeffs = tuple(int(c) for c in rest.split(",")) if rest else ()
        return cls(name, coeffs)

    def check(self, k_max: int = DEFAULT_GAP_CHECK) -> bool:
        """Finite-range surrogate for ``g(n+1) - g(n) -> inf``.

        True iff ``g(1) >= 1``, ``g`` is strictly increasing and its
        differences are strictly increasing for ``1 <= n <= k_max``.
        """
        values = [self(k) for k in range(1, k_max + 3)]
        if values[0] < 1:
            return False
        gaps = [b - a for a, b in zip(values, values[1:])]
        return all(g > 0 for g in gaps) and all(b > a for a, b in zip(gaps, gaps[1:]))


@dataclass(frozen=True)
class PositionSequence:
    """Checkpoint indices ``P(k) = scale * g(k)``."""

    gap: GapFunction = field(default_factory=GapFunction)
    scale: int = 1

    def __post_init__(self):
        if self.scale < 1:
            raise DomainError("position scale must be a positive integer")

    def __str__(self):
        return str(self.gap) if self.scale == 1 else f"{self.scale}*{self.gap}"

    def position(self, k: int) -> int:
        p = self.scale * self.gap(k)
        if p > MAX_INDEX:
            raise IndexCeilingError(f"P({k}) = {self.scale}*g({k}) exceeds 2**63 - 1")
        return p

    def positions(self) -> Iterator[int]:
        """All representable checkpoints, in increasing order."""
        k = 1
        while True:
            try:
                yield self.position(k)
            except IndexCeilingError:
                return
            k += 1

    def upto(self, n: int) -> Iterator[int]:
        """Checkpoints ``<= n``."""
        return itertools.takewhile(lambda p: p <= n, self.positions())

    def block_of(self, i: int) -> int:
        """Largest ``k`` with ``P(k) <= i`` (0 if ``i < P(1)``)."""
        k = 0
        for p in self.positions():
            if p > i:
                break
            k += 1
        return k

    def is_checkpoint(self, i: int) -> bool:
        for p in self.positions():
            if p >= i:
                return p == i
        return False

    def next_after(self, i: int) -> Optional[int]:
        for p in self.positions():
            if p > i:
                return p
        return None


@dataclass(frozen=True)
class LiouvilleSpec:
    """``sign * sum_k base**(-P(k))``."""

    base: int
    positions: PositionSequence = field(default_factory=PositionSequence)
    sign: int = 1

    def __post_init__(self):
        if self.base < 3:
            raise DomainError("bases below 3 are not supported")
        if self.sign not in (1, -1):
            raise DomainError("sign must be +1 or -1")

    def truncation(self, n: int) -> Fraction:
        """Exact signed value of the indicator digits at positions ``<= n``."""
        total = sum(Fraction(1, self.base**p) for p in self.positions.upto(n))
        return self.sign * total


def position(p: PositionSequence, k: int) -> int:
    return p.position(k)


def liouville_stream(spec: LiouvilleSpec) -> DigitStream:
    """Indicator digits of ``|s|``: 1 at every checkpoint, 0 elsewhere."""
    seq = spec.positions

    def source():
        prev = 0
        for p in seq.positions():
            if p - prev > 1:
                yield (0, p - prev - 1)
            yield (1, 1)
            prev = p
        if prev < MAX_INDEX:
            yield (0, MAX_INDEX - prev)

    return DigitStream(spec.base, source, tail=IndicatorTail(seq.is_checkpoint),
                       label=f"liouville({seq})")


def truncation_value(s: DigitStream, n: int) -> Fraction:
    return s.value_prefix(n)


# ---------------------------------------------------------------------------
# eventually periodic expansions


def _canonical(pre: Sequence[int], per: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    pre, per = list(pre), tuple(per)
    n = len(per)
    for p in range(1, n + 1):
        if n % p == 0 and per[:p] * (n // p) == per:
            per = per[:p]
            break
    while pre and pre[-1] == per[-1]:
        pre.pop()
        per = (per[-1],) + per[:-1]
    return tuple(pre), per


@dataclass(frozen=True)
class PeriodicExpansion:
    base: int
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise DomainError("period must be nonempty")

    def value(self) -> Fraction:
        q = self.base
        a, m = runs_value(((d, 1) for d in self.preperiod), q)
        b, p = runs_value(((d, 1) for d in self.period), q)
        return (Fraction(a) + Fraction(b, q**p - 1)) / q**m

    def digits(self) -> tuple[int, ...]:
        return self.preperiod + self.period

    def __str__(self):
        pre = format_digits(self.preperiod, self.base) or "ε"
        return f"{pre}({format_digits(self.period, self.base)})"

    @classmethod
    def parse(cls, text: str, base: int) -> "PeriodicExpansion":
        text = text.strip()
        if "(" not in text:
            pre, per = text, "0"
        else:
            pre, _, rest = text.partition("(")
            per = rest.rstrip(")")
        pre = "" if pre == "ε" else pre
        p, q = _canonical(parse_digits(pre, base), parse_digits(per, base))
        return cls(base, p, q)

    def stream(self) -> DigitStream:
        return periodic_stream(self.base, self.preperiod, self.period)


def _long_division(r: Fraction, base: int):
    num, den = r.numerator, r.denominator
    seen: dict[int, int] = {}
    digits: list[int] = []
    while num not in seen:
        seen[num] = len(digits)
        num *= base
        digits.append(num // den)
        num %= den
    start = seen[num]
    return digits[:start], digits[start:]


def rational_expansions(r, base: int) -> list[PeriodicExpansion]:
    """Every eventually periodic base-``base`` expansion of ``r`` in [0, 1].

    A ``base``-adic rational strictly inside (0, 1) has two: the terminating
    one (listed first) and the one ending in ``(base-1)^inf``.
    """
    r = Fraction(r)
    if not 0 <= r <= 1:
        raise DomainError(f"{r} is outside [0, 1]")
    if base < 2:
        raise DomainError("base must be at least 2")
    if r == 1:
        return [PeriodicExpansion(base, (), (base - 1,))]
    pre, per = _canonical(*_long_division(r, base))
    out = [PeriodicExpansion(base, pre, per)]
    if per == (0,) and r != 0:
        dual = list(pre)
        dual[-1] -= 1
        out.append(PeriodicExpansion(base, *_canonical(dual, (base - 1,))))
    return out


def format_rational(r) -> str:
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise DomainError(f"cannot parse rational {text!r}") from None


# ---------------------------------------------------------------------------
# subtraction oracle


def oracle_subtract_digits(x_coding: DigitStream, ell: int, spec: LiouvilleSpec, n: int,
                           max_depth: Optional[int] = None, nonnegative: bool = True) -> Word:
    """First ``n`` canonical digits of ``x - ell * |s|`` from exact truncations.

    At depth ``M`` the difference ``D`` satisfies, in units of ``Q**-M``,
    ``N - eps < D < N + 1`` where ``N`` is the truncated difference and
    ``eps = 2*ell*Q**(M - P_next)`` bounds the Liouville tail; the upper
    bound is strict because that tail is positive.  ``M`` grows
    until that interval sits inside one depth-``n`` digit cylinder.  With
    ``nonnegative`` the caller guarantees ``D >= 0`` and the lower end is
    clamped at 0.  A ``Q``-adic rational difference never separates and
    ends in :class:`HorizonError`.
    """
    q = x_coding.base
    if spec.base != q:
        raise DomainError("coding and Liouville constant use different bases")
    if ell < 1 or 2 * ell >= q * q:
        raise DomainError(f"ell must lie in [1, {(q * q - 1) // 2}]")
    if n < 0:
        raise DomainError("digit count must be nonnegative")
    if max_depth is None:
        max_depth = n + 20000
    checkpoints = spec.positions
    step = 8
    depth = n + step
    while True:
        p_next = checkpoints.next_after(depth)
        if p_next is not None and p_next - depth < 2:
            depth = p_next
            p_next = checkpoints.next_after(depth)
        if depth > max_depth:
            raise HorizonError(
                f"no depth up to {max_depth} separates the first {n} digits; "
                "the difference may be a base-q rational")
        x_num, _ = runs_value(x_coding.runs(depth), q)
        s_num = sum(q ** (depth - p) for p in checkpoints.upto(depth))
        N = x_num - ell * s_num
        width = q ** (depth - n)
        if p_next is not None:
            lo = (N - 1) // width
            fits = N + 1 <= (lo + 1) * width
        else:
            lo = N // width
            fits = N + 1 < (lo + 1) * width
        if nonnegative and lo < 0:
            lo, fits = 0, N + 1 <= width
        if fits:
            if lo >= q**n or lo < 0:
                raise DomainError("difference lies outside [0, 1)")
            digits = []
            for _ in range(n):
                lo, d = divmod(lo, q)
                digits.append(d)
            return Word(q, tuple(reversed(digits)))
        step *= 2
        depth = n + step
