"""Shared exception types."""


class ModelAvgError(Exception):
    """Base class for all package-specific errors."""


class ZeroColumn(ModelAvgError):
    """A regressor column is identically zero (restricted fit undefined)."""


class CollinearDesign(ModelAvgError):
    """Design Gram determinant is zero up to tolerance (unrestricted fit undefined)."""


class TooManySingularResamples(ModelAvgError):
    """Redraw budget for singular resampled designs was exhausted."""


class ConfigError(ModelAvgError):
    """Invalid run configuration or config-file syntax."""
