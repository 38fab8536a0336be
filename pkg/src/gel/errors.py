"""Exception hierarchy shared by all gel modules.

Every error carries an ``exit_code`` so the command line front end can map
failures onto its documented exit statuses (2 validation, 3 parse, 4 cap).
"""


class GelError(Exception):
    exit_code = 1


class InputParseError(GelError):
    """Malformed textual input (graph file, cycle notation, scalar, JSON)."""

    exit_code = 3

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphParseError(InputParseError):
    pass


class ValidationError(GelError):
    """A structural hypothesis on the graph fails (sinks, loops without exits)."""

    exit_code = 2


class CapExceededError(GelError):
    """An enumeration, iteration or level budget was exhausted."""

    exit_code = 4


class GradeMismatchError(GelError):
    """Two algebra elements of different gauge grade were combined or compared."""


class PreconditionError(GelError):
    """A mathematical precondition fails (non-unitary, wrong commutant, ...)."""
