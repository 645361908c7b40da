"""
Named finite descriptions of infinite codings.

``factorial-twos``   the top digit ``q-1`` at every checkpoint, 0 elsewhere
``all-max``          ``(q-1)^inf``
``literal:<w>``      the word ``w`` then ``0^inf``; ``literal:<pre>(<per>)`` is periodic
``random:<seed>``    i.i.d. uniform digits from the digit set
"""
from __future__ import annotations

import numpy as np

from .digits import MAX_INDEX, DigitStream, IndicatorTail, constant_stream, periodic_stream
from .errors import DomainError
from .numbers import LiouvilleSpec, PeriodicExpansion
from .selfsimilar import DigitIFS

_CHUNK = 4096


def checkpoint_max_stream(base: int, spec: LiouvilleSpec) -> DigitStream:
    seq = spec.positions
    top = base - 1

    def source():
        prev = 0
        for p in seq.positions():
            if p - prev > 1:
                yield (0, p - prev - 1)
            yield (top, 1)
            prev = p
        if prev < MAX_INDEX:
            yield (0, MAX_INDEX - prev)

    return DigitStream(base, source, tail=IndicatorTail(seq.is_checkpoint, mark=top),
                       label="factorial-twos")


def random_stream(ifs: DigitIFS, seed: int) -> DigitStream:
    """Uniform i.i.d. digits from ``ifs.digits`` generated directly as runs.

    A run of an i.i.d. uniform sequence over ``m`` symbols is geometric with
    success probability ``(m-1)/m``, and the next symbol is uniform over the
    other ``m-1``; sampling runs this way has the same law as sampling digits.
    """
    digits = np.array(ifs.digits)
    m = len(digits)

    def source():
        rng = np.random.default_rng(seed)
        current = int(rng.integers(m))
        while True:
            lengths = rng.geometric((m - 1) / m, size=_CHUNK)
            steps = rng.integers(1, m, size=_CHUNK)
            index = (current + np.concatenate(([0], np.cumsum(steps[:-1])))) % m
            current = int((index[-1] + steps[-1]) % m)
            yield from zip(digits[index].tolist(), lengths.tolist())

    return DigitStream(ifs.base, source, label=f"random:{seed}")


def build_coding(descriptor: str, ifs: DigitIFS, spec: LiouvilleSpec) -> DigitStream:
    q = ifs.base
    name, _, arg = descriptor.partition(":")
    if name == "factorial-twos":
        return checkpoint_max_stream(q, spec)
    if name == "all-max":
        s = constant_stream(q, q - 1)
    elif name == "literal":
        exp = PeriodicExpansion.parse(arg, q)
        s = periodic_stream(q, exp.preperiod, exp.period)
    elif name == "random":
        try:
            return random_stream(ifs, int(arg))
        except ValueError:
            raise DomainError(f"random coding needs an integer seed, got {arg!r}") from None
    else:
        raise DomainError(f"unknown coding {descriptor!r}")
    s.label = descriptor
    return s
