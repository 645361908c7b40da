"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the range an operation is defined on."""


class ResourceError(RuntimeError):
    """A configured materialization or search cap was exceeded."""


class HorizonError(ResourceError):
    """A finite search ran out of depth before reaching a decision."""


class IndexCeilingError(OverflowError):
    """A digit index or checkpoint position exceeds the 64-bit ceiling."""


class ConformanceError(AssertionError):
    """A rewritten block does not match its template (signals a bug)."""
