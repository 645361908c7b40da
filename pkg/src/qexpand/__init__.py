"""Exact base-q digit streams for Liouville-type translates of digit-restricted self-similar sets."""
from .digits import DigitStream, RunBlock, Word
from .errors import (ConformanceError, DomainError, HorizonError, IndexCeilingError,
                     ResourceError)
from .numbers import (GapFunction, LiouvilleSpec, PeriodicExpansion, PositionSequence,
                      liouville_stream, oracle_subtract_digits, rational_expansions,
                      truncation_value)
from .selfsimilar import DigitIFS, in_cover, member_rational, validate_digit_set
from .translate import normalize_subtract, shift_to_leading

__version__ = "0.1.0"
