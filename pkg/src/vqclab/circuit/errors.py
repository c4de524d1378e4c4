"""Error types for the circuit description language.

Every message must stand on its own: it is fed back verbatim to the
design agent, which sees nothing else about the failure.
"""

from __future__ import annotations


class CircuitError(Exception):
    """Base class for all circuit-language errors."""


class ExprError(CircuitError):
    """Bad expression text: syntax or a context-rule violation."""

    def __init__(self, message: str, source: str, position: int):
        self.source = source
        self.position = position
        super().__init__(f"{message} (in expression {source!r}, column {position + 1})")


class DocumentError(CircuitError):
    """Malformed circuit document (JSON shape, vocabulary, arity)."""

    def __init__(self, message: str, path: str = "", line: int | None = None,
                 col: int | None = None):
        self.path = path
        self.line = line
        self.col = col
        loc = f" at {path}" if path else ""
        if line is not None:
            loc += f" (line {line}, column {col})"
        super().__init__(f"{message}{loc}")


class UnrollError(CircuitError):
    """Semantic failure while expanding and checking a parsed circuit.

    ``construct`` holds a rendering of the offending gate, loop or
    measurement so the agent can locate it.
    """

    def __init__(self, message: str, construct: str = ""):
        self.construct = construct
        suffix = f" [offending construct: {construct}]" if construct else ""
        super().__init__(f"{message}{suffix}")
