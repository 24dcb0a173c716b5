"""Exception types shared across the package."""


class KvError(Exception):
    """Base class for all errors raised by kvadapt."""


class InputError(KvError, ValueError):
    """An argument violates an operation's precondition."""


class StructuralError(KvError):
    """A classification tree edit addressed the wrong kind of node."""


class GenerationError(KvError):
    """Random automaton generation gave up after too many retries."""


class LearnerInvariantError(KvError):
    """A learner detected a broken internal invariant."""


class AggregationError(KvError):
    """Benchmark aggregation found an empty cell."""


class ParseError(KvError, ValueError):
    """A text or JSON file could not be parsed."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column
