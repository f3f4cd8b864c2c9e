"""Exception hierarchy shared by every bdris module."""


class BdrisError(Exception):
    """Base class for all errors raised by bdris."""


class GraphError(BdrisError, ValueError):
    """Invalid graph: loops, duplicate edges or out-of-range vertices."""


class ArchitectureError(BdrisError, ValueError):
    """Architecture arguments inconsistent with the requested kind."""


class NetworkError(BdrisError, ValueError):
    """Invalid microwave network quantity (asymmetric, singular, off-support)."""


class DegenerateChannelError(BdrisError, ArithmeticError):
    """Zero channel or numerically rank-deficient tree system."""


class ConfigError(BdrisError, ValueError):
    """Scenario configuration that does not match the schema."""


class ChannelError(BdrisError, ValueError):
    """Invalid propagation geometry or path-loss parameter."""
