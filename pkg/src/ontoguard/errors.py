"""Exception types shared across the package."""


class OntoGuardError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(OntoGuardError):
    """Structurally invalid triple or illegal mutation of a sealed graph."""


class TurtleSyntaxError(OntoGuardError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class QuerySyntaxError(OntoGuardError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


class SchemaError(OntoGuardError):
    """Ontology fails a structural check (cycle, overlapping bins, bad shares)."""


class AnnotationError(OntoGuardError):
    """Annotation CSV violates the documented schema."""
