"""Exception types shared across the toolkit."""


class TagwalkError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(TagwalkError, ValueError):
    """An argument value violates a documented precondition."""


class ConfigError(TagwalkError, ValueError):
    """An experiment configuration is malformed (unknown keys, missing seed, ...)."""


class ContractError(TagwalkError, ValueError):
    """Input data violates a documented contract (e.g. a post without the focus tag)."""


class FitError(TagwalkError, RuntimeError):
    """Not enough usable data points to perform a fit."""


class EvaluationError(TagwalkError, RuntimeError):
    """A series evaluation cannot be completed faithfully."""


class IngestError(TagwalkError, RuntimeError):
    """Malformed input encountered while parsing in strict mode."""
