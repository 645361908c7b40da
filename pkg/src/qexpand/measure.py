"""
Translated covers versus small-denominator rationals.

A null set shifted by a random ``t`` almost surely misses any fixed
countable set.  Here the null set is replaced by a depth-``N`` cover of the
attractor and the countable set by the rationals with denominator at most
``D``; everything stays exact by drawing ``t`` from the lattice ``Q**-N``.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import DomainError
from .selfsimilar import DigitIFS, in_cover


@dataclass(frozen=True)
class ScanReport:
    ifs: DigitIFS
    t: Fraction
    max_den: int
    depth: int
    hits: tuple[Fraction, ...]


def _rationals_in(lo: Fraction, hi: Fraction, max_den: int) -> list[Fraction]:
    found = set()
    for d in range(1, max_den + 1):
        for p in range(math.ceil(lo * d), math.floor(hi * d) + 1):
            if math.gcd(p, d) == 1:
                found.add(Fraction(p, d))
    return sorted(found)


def _hits(ifs: DigitIFS, t: Fraction, max_den: int, depth: int) -> Iterator[Fraction]:
    lo, hi = ifs.hull
    for r in _rationals_in(lo + t, hi + t, max_den):
        if in_cover(ifs, r - t, depth):
            yield r


def scan_rationals(ifs: DigitIFS, t, max_den: int, depth: int) -> ScanReport:
    """All reduced ``p/d`` with ``d <= max_den`` lying in the translated cover."""
    if max_den < 0 or depth < 0:
        raise DomainError("max_den and depth must be nonnegative")
    t = Fraction(t)
    return ScanReport(ifs, t, max_den, depth, tuple(_hits(ifs, t, max_den, depth)))


def monte_carlo(ifs: DigitIFS, samples: int, max_den: int, depth: int, seed: int) -> float:
    """Fraction of lattice translates ``t = j / Q**depth`` in [0, 1) whose cover hits."""
    if samples < 1:
        raise DomainError("need at least one sample")
    if max_den < 1:
        return 0.0
    rng = random.Random(seed)
    scale = ifs.base**depth
    hit = 0
    for _ in range(samples):
        t = Fraction(rng.randrange(scale), scale)
        if next(_hits(ifs, t, max_den, depth), None) is not None:
            hit += 1
    return hit / samples
