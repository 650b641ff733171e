"""Exception hierarchy."""


class RanddagError(Exception):
    """Base class for all library errors."""


class OutOfRangeError(RanddagError, ValueError):
    """A query falls outside the bounds a table was built for."""


class ResourceLimitError(RanddagError, RuntimeError):
    """A table build exceeded its configured entry budget."""


class EmptyClassError(RanddagError, ValueError):
    """Asked to sample from a class that contains no object."""


class TableCorruptionError(RanddagError, RuntimeError):
    """Pick weights do not add up to the stored table entry."""


class CacheError(RanddagError, ValueError):
    """A cache file is malformed or does not match the requested table."""


class MalformedDoagError(RanddagError, ValueError):
    pass


class InvalidMatrixError(RanddagError, ValueError):
    pass


class InconsistentStepError(RanddagError, ValueError):
    pass


class UnderSampledError(RanddagError, ValueError):
    pass


class SizeLimitError(RanddagError, ValueError):
    """Brute-force enumeration requested beyond its hard size cap."""


class CacheMismatchError(CacheError):
    """A well-formed cache file describes a different table."""
