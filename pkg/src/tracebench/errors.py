"""Exception types shared across the package."""

from __future__ import annotations


class TracebenchError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TracebenchError):
    """Syntax error with source position, for queries, expressions and command files."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column

    def diagnostic(self) -> dict:
        return {"line": self.line, "column": self.column, "message": self.message}


class UnsupportedConstructError(ParseError):
    """A recognized SQL construct that is outside the supported subset."""

    def __init__(self, construct: str, line: int = 1, column: int = 1):
        super().__init__(f"unsupported construct: {construct}", line, column)
        self.construct = construct


class SchemaError(TracebenchError):
    """Query does not validate against the table schema."""


class StorageError(TracebenchError):
    """Storage-level failure: missing tables, collisions, corrupt catalogs."""


class EvalError(TracebenchError):
    """Runtime failure while evaluating an embedded expression."""


class CommandError(TracebenchError):
    """Malformed command file or bad command invocation."""

    def __init__(self, message: str, script: str | None = None):
        super().__init__(message if script is None else f"{message}\nscript:\n{script}")
        self.message = message
        self.script = script


class FitError(TracebenchError):
    """Data unfit for the requested distribution or regression."""


class SimError(TracebenchError):
    """Invalid simulation configuration or runaway event loop."""
