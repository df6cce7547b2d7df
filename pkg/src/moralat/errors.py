"""Exception types shared across the toolkit."""


class MoralatError(Exception):
    """Base class for all toolkit errors."""


class FormatError(MoralatError):
    """Malformed input file or record.

    Carries an optional source location so CLI messages can point at the
    offending line.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        super().__init__(where + message)
        self.path = path
        self.line = line


class TokenizeError(MoralatError):
    """Input text that cannot be segmented into mora tokens."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"position {position}: {message}"
        super().__init__(message)
        self.position = position


class FstOpError(MoralatError):
    """A lattice operation was called outside its contract.

    Covers semiring mismatches, cyclic inputs to acyclic-only algorithms,
    nondeterministic inputs to minimization, and divergent epsilon closures.
    """


class EmptyLatticeError(MoralatError):
    """No accepting path where one is required (decode failures)."""
