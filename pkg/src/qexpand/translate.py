"""
Canonical digits of ``x - ell * s`` by block rewriting.

``x`` is a coding over a digit set and ``s`` has digit 1 exactly at the
checkpoints ``P(1) < P(2) < ...``.  Subtracting digitwise gives signed
digits ``a_i = x_i - ell * s_i``; the only negative ones sit at checkpoints.
The rewriter walks the checkpoints in order and keeps the digit at the
current checkpoint *pending* until it has seen the next one.  If the next
checkpoint digit ``v`` is negative it borrows one unit, either from the
last nonzero digit strictly between the two checkpoints or, when that
stretch is all zeros, from the pending digit itself.  Either way the
positions behind the lender are filled with ``q-1`` and the checkpoint
becomes ``v + q``.

Block ``k >= 1`` covers positions ``P(k) .. P(k+1) - 1``; block 0 covers
the positions before ``P(1)`` and never has a pending digit.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .digits import (DigitStream, RunBlock, format_runs, join_runs, merge_runs,
                     replace_first_digit)
from .errors import DomainError, IndexCeilingError
from .numbers import GapFunction, LiouvilleSpec, PositionSequence
from .selfsimilar import DigitIFS, validate_digit_set


class Tag(str, enum.Enum):
    NO_BORROW = "NO_BORROW"
    INTERIOR_BORROW = "INTERIOR_BORROW"
    PENDING_BORROW = "PENDING_BORROW"


@dataclass(frozen=True)
class BlockRewrite:
    k: int
    start: int
    end: int
    tag: Tag
    borrow_index: Optional[int]
    pending_in: Optional[int]
    source_digit: int
    pending_out: int
    emitted: tuple[RunBlock, ...]
    source: tuple[RunBlock, ...]

    @property
    def checkpoint(self) -> int:
        """Position of the checkpoint that closes this block."""
        return self.end + 1

    @property
    def checkpoint_digit(self) -> Optional[int]:
        """Final digit at ``P(k)``; None for block 0."""
        return self.emitted[0].digit if self.k >= 1 else None

    @property
    def tag_text(self) -> str:
        if self.tag is Tag.INTERIOR_BORROW:
            return f"INTERIOR_BORROW({self.borrow_index})"
        return self.tag.value

    def log_line(self, base: int = 36) -> str:
        emit = format_runs(self.emitted, base, compact=True)
        return f"k={self.k} tag={self.tag_text} emit={emit} pending={self.pending_out}"


@dataclass(frozen=True)
class ShiftRecord:
    first_digit: int
    shift: Fraction

    @property
    def applied(self) -> bool:
        return self.shift != 0


class SignedDigitView:
    """``a_i = x_i - ell * s_i`` as plain integers."""

    def __init__(self, x_coding: DigitStream, ell: int, spec: LiouvilleSpec):
        self.x = x_coding
        self.ell = ell
        self.spec = spec

    def digit_at(self, i: int) -> int:
        mark = self.spec.positions.is_checkpoint(i)
        return self.x.digit_at(i) - self.ell * mark


def signed_digit_at(view: SignedDigitView, i: int) -> int:
    return view.digit_at(i)


def shift_to_leading(ifs: DigitIFS, x_coding: DigitStream) -> tuple[DigitStream, ShiftRecord]:
    """Move a coding into the top first-level piece by forcing ``x_1 = q-1``.

    The shift ``(q-1-x_1)/q`` is rational, so irrationality of the
    translated point transfers both ways.
    """
    q = ifs.base
    if q - 1 not in ifs.digits:
        raise DomainError(f"{q - 1} is not in the digit set, cannot shift to the top piece")
    first = x_coding.digit_at(1)
    if first not in ifs.digits:
        raise DomainError(f"first digit {first} is not in the digit set")
    if first == q - 1:
        return x_coding, ShiftRecord(first, Fraction(0))
    return replace_first_digit(x_coding, q - 1), ShiftRecord(first, Fraction(q - 1 - first, q))


def check_ell(ifs: DigitIFS, ell: int, allow_boundary: bool = False) -> None:
    q = ifs.base
    report = validate_digit_set(ifs)
    if report.is_endpoint_pair:
        if ell == q - 1:
            if not allow_boundary:
                raise DomainError(
                    f"ell = base-1 = {q - 1} is outside the proven range 1..{q - 2}: "
                    f"x - {q - 1}*s can be rational (the coding with {q - 1} at "
                    "every checkpoint gives exactly 0)")
        elif not 1 <= ell <= q - 2:
            raise DomainError(f"ell must lie in 1..{q - 2} for the digit set {{0,{q - 1}}}")
    else:
        if not report.main1_ok:
            raise DomainError(
                "digit set must avoid 1, contain base-1 and have no consecutive digits")
        if ell != 1:
            raise DomainError("general digit sets are only handled with ell = 1")


def _rewrite(x_coding: DigitStream, ell: int, positions: PositionSequence,
             allowed: frozenset) -> Iterator[BlockRewrite]:
    q = x_coding.base
    cur = x_coding.cursor()
    pending: Optional[int] = None
    start = 1
    k = 0
    for c in positions.positions():
        interior = cur.take(c - cur.position - 1)
        xc = cur.next_digit()
        for d, _ in interior:
            if d not in allowed:
                raise DomainError(f"coding digit {d} before position {c} is not in the digit set")
        if xc not in allowed:
            raise DomainError(f"coding digit {xc} at position {c} is not in the digit set")
        head = [] if pending is None else [(pending, 1)]
        v = xc - ell
        borrow_index = None
        if v >= 0:
            tag = Tag.NO_BORROW
            emitted = join_runs(head, interior)
            pending_out = v
        else:
            pending_out = v + q
            j = len(interior) - 1
            while j >= 0 and interior[j].digit == 0:
                j -= 1
            if j >= 0:
                tag = Tag.INTERIOR_BORROW
                d, n = interior[j]
                consumed = sum(r.length for r in interior[:j + 1])
                borrow_index = (c - 1) - (sum(r.length for r in interior) - consumed)
                tail = merge_runs([(d, n - 1), (d - 1, 1), (q - 1, c - borrow_index - 1)])
                emitted = join_runs(head, interior[:j], tail)
            else:
                if pending is None:
                    raise DomainError(
                        f"digit at the first checkpoint must exceed ell={ell} "
                        "(no nonzero coding digit precedes it); shift the coding first")
                if pending < 1:
                    raise DomainError(f"pending digit {pending} at position {start} cannot lend")
                tag = Tag.PENDING_BORROW
                emitted = join_runs([(pending - 1, 1)], [(q - 1, c - start - 1)])
        yield BlockRewrite(
            k=k, start=start, end=c - 1, tag=tag, borrow_index=borrow_index,
            pending_in=pending, source_digit=xc, pending_out=pending_out,
            emitted=tuple(emitted), source=tuple(interior))
        pending = pending_out
        start = c
        k += 1
    raise IndexCeilingError("the next checkpoint lies beyond index 2**63 - 1")


class BlockLog:
    """Re-iterable, lazily computed sequence of :class:`BlockRewrite`."""

    def __init__(self, x_coding, ell, positions, allowed):
        self._args = (x_coding, ell, positions, allowed)

    def __iter__(self) -> Iterator[BlockRewrite]:
        return _rewrite(*self._args)

    def take(self, k_max: int) -> list[BlockRewrite]:
        """Blocks ``0..k_max``."""
        out = []
        for block in self:
            out.append(block)
            if block.k >= k_max:
                break
        return out

    def covering(self, n: int) -> list[BlockRewrite]:
        """Every block that starts at or before position ``n``."""
        out = []
        for block in self:
            if block.start > n:
                break
            out.append(block)
        return out


def normalize_subtract(ifs: DigitIFS, x_coding: DigitStream, ell: int, spec: LiouvilleSpec,
                       allow_boundary: bool = False) -> tuple[DigitStream, BlockLog]:
    """Stream the canonical expansion of ``x - ell * |s|``.

    Output for block ``k`` is committed only once the coding has been read
    through ``P(k+1)``.  ``allow_boundary`` admits ``ell = q-1`` for the
    endpoint digit set, where the difference may be rational.
    """
    if spec.base != ifs.base or x_coding.base != ifs.base:
        raise DomainError("digit set, coding and Liouville constant must share one base")
    check_ell(ifs, ell, allow_boundary)
    if ell in ifs.digits and not allow_boundary:
        raise DomainError(f"ell = {ell} must not be a digit of the set")
    allowed = frozenset(ifs.digits)
    log = BlockLog(x_coding, ell, spec.positions, allowed)

    def source():
        for block in log:
            yield from block.emitted

    stream = DigitStream(ifs.base, source, label=f"{x_coding.label} - {ell}*s")
    return stream, log


def shared_translate_configs(q: int, n: int, m: int) -> list[tuple[DigitIFS, LiouvilleSpec]]:
    """Both coordinates of one translate ``-sum q**(-(m*n)*k!)``.

    In base ``q**n`` the checkpoints are ``m*k!``; in base ``q**m`` they are
    ``n*k!``.  The Liouville sign is negative: the sets are shifted down.
    """
    if q < 3 or n < 2 or m < 2:
        raise DomainError("need q >= 3 and n, m >= 2")
    out = []
    for exp, scale in ((n, m), (m, n)):
        base = q**exp
        pos = PositionSequence(GapFunction("factorial"), scale)
        out.append((DigitIFS(base, (0, base - 1)), LiouvilleSpec(base, pos, sign=-1)))
    return out
