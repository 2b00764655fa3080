"""Exception hierarchy shared by all trisumo modules."""


class TrisumoError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TrisumoError):
    """A configuration value or document is invalid; the message names the field."""


class ContractError(TrisumoError):
    """An API precondition was violated (terminal world stepped, stale cache, ...)."""


class InputError(TrisumoError):
    """Caller-supplied runtime data is unusable (NaN actions, bad vector length)."""


class ShapeError(TrisumoError):
    """Array shapes do not match what the operation requires."""


class InsufficientDataError(TrisumoError):
    """Not enough stored samples to satisfy the request."""


class CheckpointError(TrisumoError):
    """A checkpoint file is missing, corrupt, or has an unsupported version."""


class MetricsError(TrisumoError):
    """A metrics CSV could not be parsed; the message carries the line number."""
