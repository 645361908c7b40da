"""
Finite-horizon irrationality evidence for ``x - ell*s``.

A certificate bundles two independent checks on a rewritten expansion:

* every block matches the rewriting template its tag names, and the digit
  left at each checkpoint lies in the set the configuration predicts;
* a brute-force sweep finds no ``(preperiod, period)`` pair, within stated
  bounds, that is consistent with the prefix.

Neither check proves irrationality.  The certificate only records that the
finite evidence matches what the irrationality argument requires.
"""
from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .digits import (DigitStream, PeriodicTail, Word, expand_runs, format_runs,
                     encode_runs, merge_runs, runs_length, split_runs)
from .errors import ConformanceError, DomainError, HorizonError
from .numbers import (DEFAULT_GAP_CHECK, GapFunction, LiouvilleSpec, PositionSequence,
                      format_rational, parse_rational)
from .selfsimilar import DigitIFS, validate_digit_set
from .translate import BlockRewrite, Tag, normalize_subtract, shift_to_leading

DEFAULT_K_RANGE = (2, 7)
DEFAULT_SWEEP = 300


class Kind(str, enum.Enum):
    STRUCTURAL = "STRUCTURAL"
    RATIONAL_MINUS_LIOUVILLE = "RATIONAL_MINUS_LIOUVILLE"


class Verdict(str, enum.Enum):
    NO_PERIOD_FOUND = "NO_PERIOD_FOUND"
    PERIOD_FOUND = "PERIOD_FOUND"
    REFUSED_POSSIBLE_RATIONAL = "REFUSED_POSSIBLE_RATIONAL"


@dataclass(frozen=True)
class PeriodWitness:
    preperiod: int
    period: int
    horizon: int

    def __str__(self):
        return f"N={self.preperiod} p={self.period} H={self.horizon}"


def detect_period(w, max_pre: int, max_period: int) -> Optional[PeriodWitness]:
    """Least ``(N, p)`` with ``w[i+p] == w[i]`` for every 0-based ``i >= N``.

    Only ``N <= max_pre`` and ``p <= max_period`` are tried; the prefix must
    hold at least ``max_pre + 2*max_period`` digits so each candidate is
    tested on at least two full periods.
    """
    digits = w.digits if isinstance(w, Word) else tuple(w)
    size = len(digits)
    if size < max_pre + 2 * max_period:
        raise HorizonError(
            f"prefix of {size} digits is shorter than maxN + 2*maxP = "
            f"{max_pre + 2 * max_period}")
    arr = np.asarray(digits, dtype=np.int64)
    best = None
    for p in range(1, max_period + 1):
        neq = (arr[p:] != arr[:-p])[::-1]
        last = int(neq.argmax())
        n0 = neq.size - last if neq[last] else 0
        if n0 <= max_pre and (best is None or (n0, p) < best):
            best = (n0, p)
    return PeriodWitness(best[0], best[1], size) if best else None


# ---------------------------------------------------------------------------
# per-block checks


def template_problems(block: BlockRewrite, base: int, ell: int) -> list[str]:
    """Restate each tag's rewriting formula and compare the block against it."""
    q = base
    problems: list[str] = []
    v = block.source_digit - ell
    head = [] if block.pending_in is None else [(block.pending_in, 1)]
    source = list(block.source)
    span = block.end - block.start + 1
    if runs_length(block.emitted) != span:
        problems.append("emitted length does not match the block span")
    if runs_length(source) != span - len(head):
        problems.append("source length does not match the block interior")
    if block.tag is Tag.NO_BORROW:
        expected = merge_runs(head + source)
        out = v
        if v < 0:
            problems.append("negative checkpoint digit without a borrow")
    elif block.tag is Tag.INTERIOR_BORROW:
        i = block.borrow_index
        first = block.end - runs_length(source) + 1
        if v >= 0:
            problems.append("borrow recorded although the checkpoint digit is nonnegative")
        if i is None or not first <= i <= block.end:
            return problems + ["borrow index outside the block interior"]
        before, rest = split_runs(source, i - first)
        lender, after = split_runs(rest, 1)
        xi = lender[0].digit
        if xi == 0:
            problems.append("borrowed from a zero digit")
        if any(d != 0 for d, _ in after):
            problems.append("borrow is not at the last nonzero interior digit")
        expected = merge_runs(head + before + [(xi - 1, 1), (q - 1, block.end - i)])
        out = v + q
    else:
        if v >= 0:
            problems.append("borrow recorded although the checkpoint digit is nonnegative")
        if any(d != 0 for d, _ in source):
            problems.append("pending digit lent although the interior has a nonzero digit")
        if not head or block.pending_in < 1:
            return problems + ["pending digit cannot lend"]
        expected = merge_runs([(block.pending_in - 1, 1), (q - 1, span - 1)])
        out = v + q
    if list(block.emitted) != expected:
        problems.append("emitted runs differ from the template")
    if block.pending_out != out:
        problems.append(f"pending {block.pending_out} != template value {out}")
    return problems


def configuration(ifs: DigitIFS, ell: int) -> str:
    report = validate_digit_set(ifs)
    if report.is_endpoint_pair:
        return "endpoint-pair" if 1 <= ell <= ifs.base - 2 else "boundary"
    if report.main1_ok and ell == 1:
        return "sparse-digits"
    return "unsupported"


def admissible_checkpoint_digits(ifs: DigitIFS, ell: int) -> frozenset:
    q = ifs.base
    if configuration(ifs, ell) == "endpoint-pair":
        return frozenset({q - ell - 2, q - ell - 1, q - ell})
    return frozenset(a - 1 for a in ifs.digits if a >= 1)


def checkpoint_law_applies(config: str, prev_tag: Optional[Tag], tag: Tag) -> bool:
    """Whether the checkpoint-digit law is asserted for a block.

    For sparse digit sets it is only asserted when nothing borrows into or
    out of the checkpoint.
    """
    if config == "endpoint-pair":
        return True
    if config == "sparse-digits":
        return prev_tag is Tag.NO_BORROW and tag is not Tag.PENDING_BORROW
    return False


# ---------------------------------------------------------------------------
# certificate records


def _digest(runs) -> str:
    return hashlib.sha256(format_runs(runs).encode()).hexdigest()[:16]


def _clip(runs, n: int):
    return split_runs(list(runs), n)[0]


@dataclass(frozen=True)
class BlockDigest:
    k: int
    start: int
    end: int
    tag: str
    borrow_index: Optional[int]
    pending_in: Optional[int]
    source_digit: int
    pending_out: int
    checkpoint_digit: Optional[int]
    runs: int
    sha: str

    def line(self) -> str:
        return (f"block k={self.k} span={self.start}..{self.end} tag={self.tag} "
                f"borrow={_opt(self.borrow_index)} pending_in={_opt(self.pending_in)} "
                f"source={self.source_digit} pending_out={self.pending_out} "
                f"checkpoint={_opt(self.checkpoint_digit)} runs={self.runs} sha={self.sha}")

    @classmethod
    def parse(cls, line: str) -> "BlockDigest":
        fields = dict(part.split("=", 1) for part in line.split()[1:])
        lo, hi = fields["span"].split("..")
        return cls(int(fields["k"]), int(lo), int(hi), fields["tag"],
                   _unopt(fields["borrow"]), _unopt(fields["pending_in"]),
                   int(fields["source"]), int(fields["pending_out"]),
                   _unopt(fields["checkpoint"]), int(fields["runs"]), fields["sha"])

    @property
    def tag_kind(self) -> Tag:
        return Tag(self.tag.split("(")[0])


def _opt(v):
    return "-" if v is None else str(v)


def _unopt(v):
    return None if v == "-" else int(v)


@dataclass(frozen=True)
class Certificate:
    base: int
    digits: tuple[int, ...]
    ell: int
    gap: str
    scale: int
    sign: int
    coding: str
    first_digit: int
    shift: Fraction
    gap_checked: int
    configuration: str
    k_range: tuple[int, int]
    horizon: int
    max_pre: int
    max_period: int
    kind: Kind
    x_rational: bool
    verdict: Verdict
    witness: Optional[PeriodWitness]
    blocks: tuple[BlockDigest, ...] = field(repr=False)

    @property
    def ifs(self) -> DigitIFS:
        return DigitIFS(self.base, self.digits)

    @property
    def spec(self) -> LiouvilleSpec:
        return LiouvilleSpec(self.base, PositionSequence(GapFunction.parse(self.gap), self.scale),
                             self.sign)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["digits"] = list(self.digits)
        d["shift"] = format_rational(self.shift)
        d["k_range"] = list(self.k_range)
        d["kind"] = self.kind.value
        d["verdict"] = self.verdict.value
        d["blocks"] = [asdict(b) for b in self.blocks]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False, indent=2)

    def to_text(self) -> str:
        w = self.witness
        lines = [
            "irrationality-evidence v1",
            f"base: {self.base}",
            f"digits: {','.join(map(str, self.digits))}",
            f"ell: {self.ell}",
            f"gap: {self.gap}",
            f"scale: {self.scale}",
            f"sign: {self.sign}",
            f"coding: {self.coding}",
            f"first_digit: {self.first_digit}",
            f"shift: {format_rational(self.shift)}",
            f"gap_checked: 1..{self.gap_checked}",
            f"configuration: {self.configuration}",
            f"k_range: {self.k_range[0]}..{self.k_range[1]}",
            f"horizon: {self.horizon}",
            f"sweep: maxN={self.max_pre} maxP={self.max_period}",
            f"kind: {self.kind.value}",
            f"x_rational: {str(self.x_rational).lower()}",
            f"verdict: {self.verdict.value}",
            f"witness: {'-' if w is None else f'{w.preperiod},{w.period}'}",
        ]
        lines += [b.line() for b in self.blocks]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Certificate":
        head, blocks = {}, []
        for line in text.splitlines():
            if line.startswith("block "):
                blocks.append(BlockDigest.parse(line))
            elif ": " in line:
                key, value = line.split(": ", 1)
                head[key] = value
        lo, hi = head["k_range"].split("..")
        sweep = dict(p.split("=") for p in head["sweep"].split())
        horizon = int(head["horizon"])
        witness = None
        if head["witness"] != "-":
            n0, p = head["witness"].split(",")
            witness = PeriodWitness(int(n0), int(p), horizon)
        return cls(
            base=int(head["base"]), digits=tuple(int(d) for d in head["digits"].split(",")),
            ell=int(head["ell"]), gap=head["gap"], scale=int(head["scale"]),
            sign=int(head["sign"]), coding=head["coding"], first_digit=int(head["first_digit"]),
            shift=parse_rational(head["shift"]),
            gap_checked=int(head["gap_checked"].split("..")[1]),
            configuration=head["configuration"], k_range=(int(lo), int(hi)), horizon=horizon,
            max_pre=int(sweep["maxN"]), max_period=int(sweep["maxP"]), kind=Kind(head["kind"]),
            x_rational=head["x_rational"] == "true", verdict=Verdict(head["verdict"]),
            witness=witness, blocks=tuple(blocks))


@dataclass(frozen=True)
class CertificateParams:
    ifs: DigitIFS
    ell: int
    spec: LiouvilleSpec
    coding: str = "custom"
    first_digit: Optional[int] = None
    shift: Fraction = Fraction(0)
    x_rational: bool = False
    gap_checked: int = DEFAULT_GAP_CHECK


def _tail_is_constant(w: Sequence[int], spans, k_range, horizon: int, q: int) -> bool:
    """Whether the last checked block inside the horizon is all 0 or all q-1.

    ``spans`` is a sequence of ``(k, start, end)``.
    """
    inside = [s for s in spans if k_range[0] <= s[0] <= k_range[1] and s[2] <= horizon]
    if inside:
        start = inside[-1][1]
    else:
        start = next((s[1] for s in spans if s[0] == k_range[0]), 1)
    tail = set(w[start - 1:horizon])
    return tail == {0} or tail == {q - 1}


def structural_certificate(blocks: Sequence[BlockRewrite], params: CertificateParams,
                           k_range: tuple[int, int] = DEFAULT_K_RANGE,
                           horizon: Optional[int] = None, max_pre: int = DEFAULT_SWEEP,
                           max_period: int = DEFAULT_SWEEP) -> Certificate:
    """Check a block log and combine it with a non-periodicity sweep.

    Raises :class:`ConformanceError` when any block breaks its template, a
    pending digit is not positive or a checkpoint digit leaves the predicted
    set; these point at a bug, not at the number.
    """
    ifs, ell, spec = params.ifs, params.ell, params.spec
    q = ifs.base
    k_lo, k_hi = k_range
    if not 1 <= k_lo <= k_hi:
        raise DomainError(f"bad block range {k_range}")
    gap_ok = spec.positions.gap.check(max(params.gap_checked, k_hi))
    if not gap_ok:
        raise DomainError(f"gap {spec.positions.gap} fails the growth check on 1..{params.gap_checked}")
    p_hi = spec.positions.position(k_hi)
    if horizon is None:
        horizon = max(p_hi, max_pre + 2 * max_period)
    if horizon < max_pre + 2 * max_period:
        raise HorizonError("horizon is shorter than maxN + 2*maxP")
    if p_hi > horizon:
        raise HorizonError(f"checkpoint P({k_hi}) = {p_hi} lies beyond the horizon {horizon}")
    blocks = [b for b in blocks if b.start <= horizon]
    if not blocks or blocks[-1].end < horizon or blocks[-1].k < k_hi:
        raise HorizonError("block log does not reach the horizon")

    config = configuration(ifs, ell)
    admissible = admissible_checkpoint_digits(ifs, ell)
    prev_tag = None
    for b in blocks:
        problems = template_problems(b, q, ell)
        if problems:
            raise ConformanceError(f"block {b.k}: " + "; ".join(problems))
        if config != "boundary" and b.pending_out < 1:
            raise ConformanceError(f"block {b.k}: pending digit {b.pending_out} is not positive")
        if k_lo <= b.k <= k_hi and checkpoint_law_applies(config, prev_tag, b.tag):
            if b.checkpoint_digit not in admissible:
                raise ConformanceError(
                    f"block {b.k}: checkpoint digit {b.checkpoint_digit} not in {sorted(admissible)}")
            if config == "sparse-digits" and b.checkpoint_digit in ifs.digits:
                raise ConformanceError(f"block {b.k}: checkpoint digit lies in the digit set")
        prev_tag = b.tag

    digests = []
    runs_all = []
    for b in blocks:
        clipped = _clip(b.emitted, min(b.end, horizon) - b.start + 1)
        runs_all.extend(clipped)
        digests.append(BlockDigest(
            b.k, b.start, b.end, b.tag_text, b.borrow_index, b.pending_in,
            b.source_digit, b.pending_out, b.checkpoint_digit, len(clipped), _digest(clipped)))
    w = expand_runs(runs_all)[:horizon]

    witness = detect_period(w, max_pre, max_period)
    if _tail_is_constant(w, [(b.k, b.start, b.end) for b in blocks], k_range, horizon, q):
        verdict = Verdict.REFUSED_POSSIBLE_RATIONAL
    elif witness is not None:
        verdict = Verdict.PERIOD_FOUND
    else:
        verdict = Verdict.NO_PERIOD_FOUND
    kind = Kind.STRUCTURAL
    if verdict is not Verdict.NO_PERIOD_FOUND and params.x_rational:
        kind = Kind.RATIONAL_MINUS_LIOUVILLE

    first = params.first_digit if params.first_digit is not None else -1
    return Certificate(
        base=q, digits=ifs.digits, ell=ell, gap=str(spec.positions.gap),
        scale=spec.positions.scale, sign=spec.sign, coding=params.coding, first_digit=first,
        shift=params.shift, gap_checked=max(params.gap_checked, k_hi), configuration=config,
        k_range=(k_lo, k_hi), horizon=horizon, max_pre=max_pre, max_period=max_period,
        kind=kind, x_rational=params.x_rational, verdict=verdict, witness=witness,
        blocks=tuple(digests))


# ---------------------------------------------------------------------------
# verification


@dataclass
class Verification:
    ok: bool
    reasons: list[str]

    def __bool__(self):
        return self.ok


def _shape_problems(d: BlockDigest, w: Sequence[int], q: int) -> bool:
    end = min(d.end, len(w))
    seg = w[d.start - 1:end]
    tag = d.tag_kind
    if tag is Tag.INTERIOR_BORROW and any(x != q - 1 for x in w[d.borrow_index:end]):
        return True
    if d.pending_in is None or not seg:
        return False
    if tag is Tag.PENDING_BORROW:
        return seg[0] != d.pending_in - 1 or any(x != q - 1 for x in seg[1:])
    return seg[0] != d.pending_in


def verify_certificate(cert: Certificate, prefix) -> Verification:
    """Re-run the template and sweep checks of ``cert`` on ``prefix``."""
    digits = prefix.digits if isinstance(prefix, Word) else tuple(prefix)
    H = cert.horizon
    if H < cert.max_pre + 2 * cert.max_period or len(digits) < H:
        return Verification(False, ["insufficient horizon"])
    w = digits[:H]
    q = cert.base
    reasons: list[str] = []
    admissible = admissible_checkpoint_digits(cert.ifs, cert.ell)
    prev_tag = None
    for d in cert.blocks:
        if d.start > H:
            reasons.append(f"block {d.k} starts beyond the horizon")
            continue
        seg = w[d.start - 1:min(d.end, H)]
        runs = encode_runs(seg)
        if _digest(runs) != d.sha or len(runs) != d.runs or _shape_problems(d, w, q):
            reasons.append(f"template mismatch block {d.k}")
        if d.k >= 1 and cert.k_range[0] <= d.k <= cert.k_range[1]:
            if checkpoint_law_applies(cert.configuration, prev_tag, d.tag_kind):
                if w[d.start - 1] not in admissible:
                    reasons.append(f"checkpoint law violated block {d.k}")
        prev_tag = d.tag_kind
    if cert.blocks and cert.blocks[-1].end < H:
        reasons.append("blocks do not cover the horizon")
    witness = detect_period(w, cert.max_pre, cert.max_period)
    if witness != cert.witness:
        reasons.append("sweep result differs")
    spans = [(d.k, d.start, d.end) for d in cert.blocks]
    refused = _tail_is_constant(w, spans, cert.k_range, H, q)
    if refused != (cert.verdict is Verdict.REFUSED_POSSIBLE_RATIONAL):
        reasons.append("verdict differs")
    return Verification(not reasons, reasons)


# ---------------------------------------------------------------------------
# pipeline


def coding_is_rational(x: DigitStream, horizon: int, max_pre: int, max_period: int) -> bool:
    """Closed-form tail, or a period detected within the sweep bounds."""
    if isinstance(x.tail, PeriodicTail):
        return True
    return detect_period(x.prefix(horizon), max_pre, max_period) is not None


def certify(ifs: DigitIFS, x_coding: DigitStream, ell: int, spec: LiouvilleSpec,
            k_range: tuple[int, int] = DEFAULT_K_RANGE, horizon: Optional[int] = None,
            max_pre: int = DEFAULT_SWEEP, max_period: int = DEFAULT_SWEEP,
            allow_boundary: bool = False, gap_checked: int = DEFAULT_GAP_CHECK,
            coding: Optional[str] = None):
    """Shift, rewrite and certify one coding; returns ``(certificate, prefix)``.

    The prefix is the concatenated block emission clipped to the horizon;
    :func:`recompute_prefix` rebuilds it from scratch for verification.
    """
    if horizon is None:
        horizon = max(spec.positions.position(k_range[1]), max_pre + 2 * max_period)
    x, shift = shift_to_leading(ifs, x_coding)
    _, log = normalize_subtract(ifs, x, ell, spec, allow_boundary=allow_boundary)
    k_needed = max(k_range[1], spec.positions.block_of(horizon))
    blocks = log.take(k_needed)
    params = CertificateParams(
        ifs=ifs, ell=ell, spec=spec, coding=coding or x_coding.label or "custom",
        first_digit=shift.first_digit, shift=shift.shift,
        x_rational=coding_is_rational(x, horizon, max_pre, max_period),
        gap_checked=gap_checked)
    cert = structural_certificate(blocks, params, k_range, horizon, max_pre, max_period)
    prefix = expand_runs(r for b in blocks for r in b.emitted)[:horizon]
    return cert, Word(ifs.base, tuple(prefix))


def recompute_prefix(cert: Certificate) -> Word:
    """Rebuild the certified prefix from the recorded coding descriptor."""
    from .codings import build_coding

    ifs, spec = cert.ifs, cert.spec
    x = build_coding(cert.coding, ifs, spec)
    x, _ = shift_to_leading(ifs, x)
    stream, _ = normalize_subtract(ifs, x, cert.ell, spec,
                                   allow_boundary=cert.configuration == "boundary")
    return stream.prefix(cert.horizon)
