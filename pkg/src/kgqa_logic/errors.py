"""Exception hierarchy shared across the package.

Each class carries the process exit code the CLI maps it to; the code
families (parse=3, schema=4, alignment=5, I/O=6) are documented in the
README.
"""

from __future__ import annotations


class KgqaError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ParseError(KgqaError):
    """Malformed input text (KB line, QA line, query string, question)."""

    exit_code = 3


class KbParseError(ParseError):
    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class QaParseError(ParseError):
    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class QuerySyntaxError(ParseError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"at position {position}: {message}"
        super().__init__(message)
        self.position = position


class ChainShapeError(ParseError):
    """Query atoms do not form a left-to-right chain."""

    def __init__(self, message: str, atom_index: int):
        super().__init__(f"atom {atom_index}: {message}")
        self.atom_index = atom_index


class QuestionFormatError(ParseError):
    """Question text violates the single-bracketed-entity format."""


class SchemaError(KgqaError):
    """Names outside the known relation/predicate/pair vocabulary."""

    exit_code = 4


class KbSchemaError(SchemaError):
    pass


class UnknownPredicateError(SchemaError):
    pass


class PathMappingError(SchemaError):
    """An inference-path node pair has no predicate mapping."""


class AlignmentError(KgqaError):
    """Line-aligned input files disagree on line count."""

    exit_code = 5


class KbStateError(KgqaError):
    """Operation applied to a fact base in the wrong state."""


class GroundingError(KgqaError):
    """ENT substitution applied to a query that cannot accept it."""


class SamplingError(KgqaError):
    """Stratified sampling cannot satisfy the requested quota."""


class InvalidExampleError(KgqaError):
    """An evaluation example violates its preconditions (e.g. empty gold set)."""


class EvalConfigError(KgqaError):
    """Evaluation run is misconfigured."""
