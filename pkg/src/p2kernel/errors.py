"""Exception hierarchy shared across the package."""


class P2KernelError(Exception):
    """Base class for all errors raised by p2kernel."""


class UnknownVertexError(P2KernelError, KeyError):
    """A vertex id was referenced that is not present in the graph."""


class OracleLimitError(P2KernelError):
    """The exact oracle was asked to solve an instance above its size limit."""


class NotSimpleError(P2KernelError):
    """A unit does not match any type of the unit taxonomy."""


class TwoPathsError(P2KernelError):
    """A unit holds two vertex-disjoint P2's and must be split first."""


class InvariantViolation(P2KernelError, AssertionError):
    """An internal invariant of the kernelization failed (always a bug)."""


class ParseError(P2KernelError, ValueError):
    """Malformed input file."""
