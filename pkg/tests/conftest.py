from fractions import Fraction

import pytest

from qexpand.codings import build_coding
from qexpand.numbers import GapFunction, LiouvilleSpec, PositionSequence
from qexpand.selfsimilar import DigitIFS
from qexpand.translate import shift_to_leading


def make_config(q, digits=None, gap="factorial", scale=1, sign=1):
    ifs = DigitIFS(q, digits if digits is not None else (0, q - 1))
    spec = LiouvilleSpec(q, PositionSequence(GapFunction.parse(gap), scale), sign)
    return ifs, spec


def shifted(descriptor, ifs, spec):
    x, _ = shift_to_leading(ifs, build_coding(descriptor, ifs, spec))
    return x


def value_of(digits, q):
    """Plain positional value, written out without any library helper."""
    return sum(Fraction(d, q ** (i + 1)) for i, d in enumerate(digits))


@pytest.fixture
def cantor():
    return make_config(3)
