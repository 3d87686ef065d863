"""Exception types shared across the package."""
from __future__ import annotations


class InvalidArgumentError(ValueError):
    """An argument violates an operation's precondition."""


class FixtureFormatError(ValueError):
    """A fixture document is malformed or internally inconsistent."""


class SchemaError(ValueError):
    """An input document does not match its expected schema."""


class ConfigurationError(RuntimeError):
    """Required configuration (e.g. the transmission range) is missing."""


class UnreachableNodeError(RuntimeError):
    """A distance-based metric encountered an unreachable node pair."""


class SizeLimitError(ValueError):
    """Input exceeds a brute-force size bound."""


class DisconnectedGraphError(RuntimeError):
    """The operation requires a connected graph; carries the components found."""

    def __init__(self, components: list[list[int]]):
        self.components = [sorted(c) for c in components]
        sizes = ", ".join(str(len(c)) for c in self.components)
        super().__init__(
            f"graph is disconnected: {len(self.components)} components (sizes: {sizes})"
        )
