"""Exception hierarchy. Every domain failure raised by the library is an SvisError."""


class SvisError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class TableError(SvisError, ValueError):
    """Malformed input, unknown ids, id collisions, dimension mismatches."""


class RelationError(SvisError, ValueError):
    """Unknown attribute, universe mismatch, non-covering relation."""


class ConsistencyError(SvisError):
    """A block mapping is not consistent with a relation it is applied to."""


class ReductError(SvisError, ValueError):
    """Unknown relation names or enumeration guards exceeded."""


class StateError(SvisError):
    """Corrupt or incompatible compression state, or an invalid update."""
