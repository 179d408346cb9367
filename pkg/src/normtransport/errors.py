"""Exception types shared across the package."""


class NormTransportError(Exception):
    """Base class for all package-specific errors."""


class UnknownSymbolError(NormTransportError):
    """A symbol id or label is not part of the alphabet / code support."""


class RangeNotCoveredError(NormTransportError):
    """A window does not cover the coordinates an operation needs."""


class WindowTooShortError(NormTransportError):
    """A path window is too short for the requested evaluation count."""


class NonCanonicalCylinderError(NormTransportError):
    """A cylinder probes coordinates the engine does not accept (start < 1)."""


class UnsupportedKindError(NormTransportError):
    """The code class does not support the exact operation requested."""


class NotIrreducibleError(NormTransportError):
    """The transition matrix is not irreducible."""


class InsufficientVisitsError(NormTransportError):
    """A window holds fewer visits to the event than the operation needs."""


class StochasticityError(NormTransportError):
    """Rows of a transition matrix (or a probability vector) do not sum to 1."""


class EnumerationBudgetError(NormTransportError):
    """An exact enumeration exceeded its node budget."""


class ZeroBoundaryError(NormTransportError):
    """The target measure gives the code image zero boundary probability."""


class CodeConstructionError(NormTransportError):
    """A code table violates its class constraints."""


class ConfigError(NormTransportError):
    """A configuration file is missing, malformed, or has unknown keys."""
