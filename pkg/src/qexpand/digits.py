"""
Sparse base-Q digit streams.

A :class:`DigitStream` is an immutable description of an infinite digit
sequence ``d_1 d_2 ...``.  It never stores digits; it stores a factory that
produces run-length blocks ``(digit, length)`` on demand, so positions in the
billions can be addressed as long as the number of runs before them is small.
Reading is done through a :class:`Cursor`, which owns all mutable state.
"""
from __future__ import annotations

import itertools

import string
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, NamedTuple, Optional, Sequence

from .errors import DomainError, IndexCeilingError, ResourceError

MAX_INDEX = 2**63 - 1
_CHUNK = 1 << 16
DEFAULT_CAP = 10**7

_ALNUM = string.digits + string.ascii_lowercase


class RunBlock(NamedTuple):
    digit: int
    length: int

    def __str__(self):
        return f"{format_digit(self.digit, 36)}^{self.length}"


# ---------------------------------------------------------------------------
# text forms


def format_digit(d: int, base: int) -> str:
    if base <= 36:
        return _ALNUM[d]
    return str(d)


def format_digits(digits: Sequence[int], base: int) -> str:
    """Digits as text: one character each up to base 36, dot-separated above."""
    if base <= 36:
        return "".join(_ALNUM[d] for d in digits)
    return ".".join(str(d) for d in digits)


def parse_digits(text: str, base: int) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    if base <= 36:
        try:
            digits = tuple(_ALNUM.index(ch) for ch in text.lower())
        except ValueError:
            raise DomainError(f"cannot parse digit word {text!r}") from None
    else:
        digits = tuple(int(part) for part in text.split("."))
    for d in digits:
        if not 0 <= d < base:
            raise DomainError(f"digit {d} outside [0, {base - 1}]")
    return digits


def format_runs(runs: Iterable[RunBlock], base: int = 36, compact: bool = False) -> str:
    """Serialize runs as ``d^n`` joined by commas; ``compact`` drops ``^1``."""
    parts = []
    for d, n in runs:
        t = format_digit(d, base) if base <= 36 else str(d)
        parts.append(t if compact and n == 1 else f"{t}^{n}")
    return ",".join(parts)


def parse_runs(text: str, base: int = 36) -> list[RunBlock]:
    runs = []
    for part in filter(None, text.split(",")):
        d, _, n = part.partition("^")
        digit = parse_digits(d, base)[0] if base <= 36 else int(d)
        runs.append(RunBlock(digit, int(n) if n else 1))
    return merge_runs(runs)


# ---------------------------------------------------------------------------
# run utilities


def join_runs(*parts: Sequence[Sequence[int]]) -> list[RunBlock]:
    """Concatenate canonical run lists, merging only at the seams."""
    out: list[RunBlock] = []
    for part in parts:
        start = 0
        while start < len(part) and part[start][1] <= 0:
            start += 1
        if start == len(part):
            continue
        d, n = part[start]
        if out and out[-1][0] == d:
            out[-1] = RunBlock(d, out[-1][1] + n)
        else:
            out.append(RunBlock(d, n))
        out.extend(part[start + 1:])
    return out


def merge_runs(runs: Iterable[Sequence[int]]) -> list[RunBlock]:
    """Canonical RLE: drop empty runs and merge neighbours with equal digits."""
    out: list[RunBlock] = []
    cd, cn = -1, 0
    for d, n in runs:
        if n <= 0:
            continue
        if d == cd:
            cn += n
        else:
            if cn:
                out.append(RunBlock(cd, cn))
            cd, cn = d, n
    if cn:
        out.append(RunBlock(cd, cn))
    return out


def runs_length(runs: Iterable[Sequence[int]]) -> int:
    return sum(n for _, n in runs)


def expand_runs(runs: Iterable[Sequence[int]]) -> list[int]:
    out: list[int] = []
    for d, n in runs:
        out.extend([d] * n)
    return out


def encode_runs(digits: Iterable[int]) -> list[RunBlock]:
    return [RunBlock(d, sum(1 for _ in g)) for d, g in itertools.groupby(digits)]


def split_runs(runs: Sequence[RunBlock], n: int) -> tuple[list[RunBlock], list[RunBlock]]:
    """Split runs after the first ``n`` digits."""
    runs = list(runs)
    for j, (d, length) in enumerate(runs):
        if n <= 0:
            return runs[:j], runs[j:]
        if length > n:
            return runs[:j] + [RunBlock(d, n)], [RunBlock(d, length - n)] + runs[j + 1:]
        n -= length
    return runs, []


def runs_value(runs: Iterable[Sequence[int]], base: int) -> tuple[int, int]:
    """Return ``(N, n)`` with the digits' value equal to ``N / base**n``."""
    num, total = 0, 0
    for d, n in runs:
        scale = base**n
        num = num * scale + d * ((scale - 1) // (base - 1))
        total += n
    return num, total


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Word:
    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise DomainError("base must be at least 2")
        for d in self.digits:
            if not 0 <= d < self.base:
                raise DomainError(f"digit {d} outside [0, {self.base - 1}]")

    def __len__(self):
        return len(self.digits)

    def __getitem__(self, item):
        return self.digits[item]

    def __str__(self):
        return f"q={self.base}:{format_digits(self.digits, self.base)}"

    @classmethod
    def from_text(cls, text: str) -> "Word":
        head, sep, body = text.partition(":")
        if not sep or not head.startswith("q="):
            raise DomainError(f"word text must look like 'q=3:0121', got {text!r}")
        base = int(head[2:])
        return cls(base, parse_digits(body, base))

    def runs(self) -> list[RunBlock]:
        return encode_runs(self.digits)

    def value(self) -> Fraction:
        num, n = runs_value(self.runs(), self.base)
        return Fraction(num, self.base**n)


# ---------------------------------------------------------------------------
# closed-form tails


@dataclass(frozen=True)
class PeriodicTail:
    """Marks a stream as ``preperiod (period)^inf``."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def digit_at(self, i: int) -> int:
        m = len(self.preperiod)
        if i <= m:
            return self.preperiod[i - 1]
        return self.period[(i - m - 1) % len(self.period)]


@dataclass(frozen=True)
class IndicatorTail:
    """Digit ``mark`` at the indices accepted by ``marks``, ``background`` elsewhere."""

    marks: Callable[[int], bool]
    mark: int = 1
    background: int = 0

    def digit_at(self, i: int) -> int:
        return self.mark if self.marks(i) else self.background


# ---------------------------------------------------------------------------
# streams


def _check_index(i: int) -> None:
    if i > MAX_INDEX:
        raise IndexCeilingError(f"index {i} exceeds 2**63 - 1")


class DigitStream:
    """Infinite base-Q digit sequence backed by a run factory.

    ``source`` is a zero-argument callable returning a fresh iterator of
    ``(digit, length)`` pairs. Adjacent equal runs are allowed in the raw
    source; every public view merges them.
    """

    def __init__(self, base: int, source: Callable[[], Iterator[Sequence[int]]],
                 tail=None, label: Optional[str] = None):
        if base < 2:
            raise DomainError("base must be at least 2")
        self.base = base
        self._source = source
        self.tail = tail
        self.label = label

    def __repr__(self):
        return f"DigitStream(base={self.base}, label={self.label!r})"

    def cursor(self) -> "Cursor":
        return Cursor(self)

    def runs(self, limit: int = MAX_INDEX) -> Iterator[RunBlock]:
        """Canonical runs covering digits ``1..limit``."""
        cur = self.cursor()
        last: Optional[RunBlock] = None
        while cur.position < limit:
            if cur._left >= _CHUNK:
                chunk = [cur.next_run(limit - cur.position)]
            else:
                chunk = cur.take(min(limit - cur.position, _CHUNK))
            if last is not None:
                if chunk[0].digit == last.digit:
                    chunk[0] = RunBlock(last.digit, last.length + chunk[0].length)
                else:
                    yield last
            yield from chunk[:-1]
            last = chunk[-1]
        if last is not None:
            yield last

    def runs_before(self, i: int) -> list[RunBlock]:
        """Canonical RLE of the digits at positions ``1..i``."""
        _check_index(i)
        return list(self.runs(i))

    def prefix(self, n: int, cap: int = DEFAULT_CAP) -> Word:
        if n < 0:
            raise DomainError("prefix length must be nonnegative")
        if n > cap:
            raise ResourceError(f"prefix of {n} digits exceeds the cap of {cap}")
        return Word(self.base, tuple(expand_runs(self.runs(n))))

    def digit_at(self, i: int) -> int:
        if i < 1:
            raise DomainError("digit positions start at 1")
        _check_index(i)
        if self.tail is not None:
            return self.tail.digit_at(i)
        cur = self.cursor()
        cur.skip(i - 1)
        return cur.next_digit()

    def value_prefix(self, n: int) -> Fraction:
        num, _ = runs_value(self.runs(n), self.base)
        return Fraction(num, self.base**n)


class Cursor:
    """Private read position over a stream."""

    def __init__(self, stream: DigitStream):
        self.base = stream.base
        self._it = iter(stream._source())
        self._digit = 0
        self._left = 0
        self.position = 0

    def _fill(self) -> None:
        while self._left == 0:
            try:
                d, n = next(self._it)
            except StopIteration:
                if self.position >= MAX_INDEX:
                    raise IndexCeilingError("read past index 2**63 - 1") from None
                raise RuntimeError("digit source ended before the index ceiling") from None
            if not 0 <= d < self.base:
                raise DomainError(f"stream produced digit {d} outside base {self.base}")
            self._digit, self._left = d, n

    def next_run(self, at_most: int = MAX_INDEX) -> RunBlock:
        """Return the rest of the current raw run, clipped to ``at_most`` digits."""
        self._fill()
        n = min(self._left, at_most)
        self._left -= n
        self.position += n
        return RunBlock(self._digit, n)

    def take(self, n: int) -> list[RunBlock]:
        """Canonical runs of the next ``n`` digits."""
        out: list[RunBlock] = []
        if n <= 0:
            return out
        self.position += n
        base, it = self.base, self._it
        d, left = self._digit, self._left
        while True:
            if left == 0:
                try:
                    d, left = next(it)
                except StopIteration:
                    self.position -= n
                    self._left = 0
                    self._fill()
                if not 0 <= d < base:
                    raise DomainError(f"stream produced digit {d} outside base {base}")
            k = left if left < n else n
            left -= k
            n -= k
            if out and out[-1][0] == d:
                out[-1] = RunBlock(d, out[-1][1] + k)
            else:
                out.append(RunBlock(d, k))
            if n == 0:
                break
        self._digit, self._left = d, left
        return out

    def skip(self, n: int) -> None:
        while n > 0:
            n -= self.next_run(n).length

    def next_digit(self) -> int:
        return self.next_run(1).digit


# ---------------------------------------------------------------------------
# constructors


def constant_stream(base: int, digit: int) -> DigitStream:
    if not 0 <= digit < base:
        raise DomainError(f"digit {digit} outside base {base}")
    return DigitStream(base, lambda: iter([(digit, MAX_INDEX)]),
                       tail=PeriodicTail((), (digit,)), label=f"({digit})")


def _primitive(period: tuple[int, ...]) -> tuple[int, ...]:
    n = len(period)
    for p in range(1, n + 1):
        if n % p == 0 and period[:p] * (n // p) == period:
            return period[:p]
    return period


def periodic_stream(base: int, preperiod: Sequence[int], period: Sequence[int]) -> DigitStream:
    """The stream ``preperiod (period)^inf``."""
    pre, per = tuple(preperiod), _primitive(tuple(period))
    if not per:
        raise DomainError("period must be nonempty")
    for d in pre + per:
        if not 0 <= d < base:
            raise DomainError(f"digit {d} outside base {base}")
    pre_runs = encode_runs(pre)
    per_runs = encode_runs(per)

    def source():
        yield from pre_runs
        if len(per) == 1:
            yield (per[0], MAX_INDEX - len(pre))
            return
        while True:
            yield from per_runs

    label = f"{format_digits(pre, base)}({format_digits(per, base)})"
    return DigitStream(base, source, tail=PeriodicTail(pre, per), label=label)


def word_stream(word: Word, fill: int = 0) -> DigitStream:
    """A finite word followed by ``fill`` forever."""
    return periodic_stream(word.base, word.digits, (fill,))


def replace_first_digit(stream: DigitStream, digit: int) -> DigitStream:
    """Copy of ``stream`` whose first digit is ``digit``."""
    if not 0 <= digit < stream.base:
        raise DomainError(f"digit {digit} outside base {stream.base}")

    def source():
        it = iter(stream._source())
        d, n = next(it)
        yield (digit, 1)
        if n > 1:
            yield (d, n - 1)
        yield from it

    tail = None
    if isinstance(stream.tail, PeriodicTail):
        t = stream.tail
        head = t.preperiod + t.period
        tail = PeriodicTail((digit,) + head[1:], t.period)
    return DigitStream(stream.base, source, tail=tail, label=stream.label)
