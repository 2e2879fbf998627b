"""Exception types raised across the generation pipeline."""

from __future__ import annotations


class FuzzTargetError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(FuzzTargetError):
    """An API-spec document could not be read.

    ``line`` and ``column`` are 1-based positions in the source document when
    known (JSON syntax errors); schema errors carry a field path instead.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 field: str | None = None) -> None:
        self.line = line
        self.column = column
        self.field = field
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        elif field is not None:
            where = f" (at {field})"
        super().__init__(f"{message}{where}")


class DuplicateIdError(ParseError):
    def __init__(self, function_id: str) -> None:
        self.function_id = function_id
        super().__init__(f"duplicate function id {function_id!r}", field="functions")


class FrontierExplosionError(FuzzTargetError):
    """The BFS frontier grew past the configured cap."""

    def __init__(self, level: int, size: int, cap: int) -> None:
        self.level = level
        self.size = size
        self.cap = cap
        super().__init__(
            f"BFS frontier reached {size} sequences at length {level} (cap {cap}); "
            "try lowering --max-len"
        )


class InternalBindingError(FuzzTargetError):
    """A sequence accepted as valid could not be bound to variables."""


class UnsupportedPrimitiveError(FuzzTargetError):
    """The renderer has no decoder template for a primitive kind."""
