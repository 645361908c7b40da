"""Command-line interface: ``qexpand <subcommand> [options]``."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import certify as cert_mod
from .codings import build_coding
from .digits import Word, format_runs
from .errors import ConformanceError, DomainError, IndexCeilingError, ResourceError
from .measure import monte_carlo, scan_rationals
from .numbers import (GapFunction, LiouvilleSpec, PositionSequence, format_rational,
                      liouville_stream, oracle_subtract_digits, parse_rational,
                      rational_expansions)
from .selfsimilar import DigitIFS, coding_truncation, in_cover, member_rational
from .translate import normalize_subtract, shift_to_leading


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--base", type=int, default=3)
    p.add_argument("--digits", default=None, help="digit set, e.g. 0,2 (default 0,base-1)")
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--gap", default="factorial", help="factorial | power | cubic:c3,c2,c1")
    p.add_argument("--scale", type=int, default=1, help="checkpoints at scale * g(k)")
    p.add_argument("--sign", type=int, default=1, choices=(1, -1))
    p.add_argument("--prefix", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="qexpand", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("liouville", parents=[common], help="digits of the Liouville constant")
    p.add_argument("--runs", action="store_true", help="print run-length form")

    p = sub.add_parser("code", parents=[common], help="value of a coding word or expansions")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--word")
    g.add_argument("--rational")

    p = sub.add_parser("member", parents=[common], help="exact rational membership")
    p.add_argument("--rational", required=True)
    p.add_argument("--depth", type=int, default=None, help="also test the depth-N cover")

    for name in ("translate", "certify", "oracle-check"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--coding", default="all-max",
                       help="factorial-twos | all-max | literal:<word> | random:<seed>")
        if name == "translate":
            p.add_argument("--blocks", action="store_true", help="print the block rewrite log")
            p.add_argument("--runs", action="store_true", help="print run-length form")
        if name == "certify":
            p.add_argument("--k-range", default="2..7")
            p.add_argument("--max-pre", type=int, default=cert_mod.DEFAULT_SWEEP)
            p.add_argument("--max-period", type=int, default=cert_mod.DEFAULT_SWEEP)
            p.add_argument("--verify", metavar="FILE", default=None,
                           help="verify a saved certificate instead of producing one")

    p = sub.add_parser("scan", parents=[common], help="rationals in a translated cover")
    p.add_argument("--t", default="0")
    p.add_argument("--max-den", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)

    p = sub.add_parser("montecarlo", parents=[common], help="hit fraction over random translates")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--max-den", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    return parser


def _ifs(args) -> DigitIFS:
    text = args.digits if args.digits is not None else f"0,{args.base - 1}"
    return DigitIFS.parse(args.base, text)


def _spec(args) -> LiouvilleSpec:
    return LiouvilleSpec(args.base, PositionSequence(GapFunction.parse(args.gap), args.scale),
                         args.sign)


def _boundary(ifs: DigitIFS, ell: int) -> bool:
    if ell == ifs.base - 1 and ifs.digits == (0, ifs.base - 1):
        print(f"warning: ell = base-1 lies outside the proven range; x - {ell}*s "
              "may be rational", file=sys.stderr)
        return True
    return False


def _emit(args, text: str, payload: dict) -> None:
    print(json.dumps(payload) if args.json else text)


def cmd_liouville(args) -> int:
    s = liouville_stream(_spec(args))
    n = args.prefix or 24
    if args.runs:
        runs = s.runs_before(n)
        _emit(args, format_runs(runs, args.base), {"base": args.base, "runs": format_runs(runs)})
    else:
        w = s.prefix(n)
        _emit(args, str(w), {"base": args.base, "digits": list(w.digits), "text": str(w)})
    return 0


def cmd_code(args) -> int:
    if args.word is not None:
        ifs = _ifs(args)
        w = Word.from_text(args.word) if args.word.startswith("q=") else \
            Word(args.base, tuple(int(c, 36) for c in args.word))
        v = coding_truncation(ifs, w)
        _emit(args, format_rational(v), {"word": str(w), "value": format_rational(v)})
    else:
        exps = rational_expansions(parse_rational(args.rational), args.base)
        texts = [str(e) for e in exps]
        _emit(args, "\n".join(texts), {"rational": args.rational, "expansions": texts})
    return 0


def cmd_member(args) -> int:
    ifs = _ifs(args)
    r = parse_rational(args.rational)
    res = member_rational(ifs, r)
    text = f"true witness={res.witness}" if res.member else "false"
    payload = {"member": res.member, "witness": None if res.witness is None else str(res.witness)}
    if args.depth is not None:
        covered = in_cover(ifs, r, args.depth)
        text += f"\ncover(depth={args.depth})={str(covered).lower()}"
        payload["cover"] = covered
    _emit(args, text, payload)
    return 0


def _translated(args):
    ifs, spec = _ifs(args), _spec(args)
    x = build_coding(args.coding, ifs, spec)
    x, shift = shift_to_leading(ifs, x)
    boundary = _boundary(ifs, args.ell)
    stream, log = normalize_subtract(ifs, x, args.ell, spec, allow_boundary=boundary)
    return ifs, spec, x, shift, stream, log


def cmd_translate(args) -> int:
    _, _, _, shift, stream, log = _translated(args)
    n = args.prefix or 24
    w = stream.prefix(n)
    lines = [format_runs(stream.runs_before(n), args.base) if args.runs else str(w)]
    if shift.applied:
        lines.append(f"shift={format_rational(shift.shift)}")
    blocks = log.covering(n) if args.blocks else []
    lines += [b.log_line(args.base) for b in blocks]
    payload = {"text": str(w), "digits": list(w.digits), "shift": format_rational(shift.shift),
               "blocks": [b.log_line(args.base) for b in blocks]}
    _emit(args, "\n".join(lines), payload)
    return 0


def cmd_certify(args) -> int:
    if args.verify:
        with open(args.verify) as fh:
            c = cert_mod.Certificate.from_text(fh.read())
        res = cert_mod.verify_certificate(c, cert_mod.recompute_prefix(c))
        text = "verified" if res.ok else "rejected: " + "; ".join(res.reasons)
        _emit(args, text, {"ok": res.ok, "reasons": res.reasons})
        return 0 if res.ok else 1
    ifs, spec = _ifs(args), _spec(args)
    lo, _, hi = args.k_range.partition("..")
    x = build_coding(args.coding, ifs, spec)
    c, _ = cert_mod.certify(ifs, x, args.ell, spec, k_range=(int(lo), int(hi)),
                            horizon=args.horizon, max_pre=args.max_pre,
                            max_period=args.max_period,
                            allow_boundary=_boundary(ifs, args.ell), coding=args.coding)
    if args.json:
        print(c.to_json())
    else:
        sys.stdout.write(c.to_text())
    return 0


def cmd_oracle_check(args) -> int:
    _, spec, x, _, stream, _ = _translated(args)
    n = args.prefix or 720
    a = stream.prefix(n)
    b = oracle_subtract_digits(x, args.ell, spec, n)
    bad = next((i for i, (u, v) in enumerate(zip(a.digits, b.digits), 1) if u != v), None)
    if bad is None:
        _emit(args, f"agree n={n}", {"agree": True, "n": n})
        return 0
    _emit(args, f"disagree position={bad} stream={a[bad - 1]} oracle={b[bad - 1]}",
          {"agree": False, "position": bad})
    return 1


def cmd_scan(args) -> int:
    rep = scan_rationals(_ifs(args), parse_rational(args.t), args.max_den, args.depth)
    lines = [format_rational(h) for h in rep.hits] + [f"hits={len(rep.hits)}"]
    _emit(args, "\n".join(lines), {"t": format_rational(rep.t),
                                   "hits": [format_rational(h) for h in rep.hits]})
    return 0


def cmd_montecarlo(args) -> int:
    f = monte_carlo(_ifs(args), args.samples, args.max_den, args.depth, args.seed)
    _emit(args, f"fraction={f:.6f}", {"fraction": round(f, 6), "samples": args.samples})
    return 0


COMMANDS = {
    "liouville": cmd_liouville,
    "code": cmd_code,
    "member": cmd_member,
    "translate": cmd_translate,
    "certify": cmd_certify,
    "oracle-check": cmd_oracle_check,
    "scan": cmd_scan,
    "montecarlo": cmd_montecarlo,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ResourceError, IndexCeilingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ConformanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
