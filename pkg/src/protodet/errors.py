"""Exception taxonomy. Every error carries enough context to act on it."""


class ProtodetError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatchError(ProtodetError):
    """An operation received tensors whose dimensions do not conform."""


class MissingGradientError(ProtodetError):
    """An optimizer step found a parameter without a populated gradient."""


class NotStochasticError(ProtodetError):
    """A distribution argument had rows that do not sum to one (or negative entries)."""


class NonFiniteError(ProtodetError):
    """A NaN or infinity appeared where a finite value is required."""


class ConfigError(ProtodetError):
    """A run configuration violated the documented schema."""


class DatasetError(ProtodetError):
    """Dataset generation, loading, or K-shot selection failed."""


class CheckpointError(ProtodetError):
    """A checkpoint file is missing, malformed, or incompatible."""


class TrainingError(ProtodetError):
    """Training diverged or violated a stage postcondition."""
