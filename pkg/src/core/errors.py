"""Exception types raised across the toolkit."""

from typing import Optional


class RoughKuramotoError(Exception):
    """Base class for every error the toolkit raises on purpose."""


class ConfigurationError(RoughKuramotoError):
    """A configuration file or mapping could not be turned into a model."""


class GraphError(RoughKuramotoError):
    """Graph analysis refused or failed (eigensolver, Cheeger cap)."""


class FbmGenerationError(RoughKuramotoError):
    """Neither circulant embedding nor Cholesky produced a sample."""


class RoughPathParameterError(RoughKuramotoError):
    """Invalid threshold, interval or grid for a rough path operation."""


class DiagnosticRefusal(RoughKuramotoError):
    """A diagnostic was asked for on data it cannot judge."""


class IntegrationAborted(RoughKuramotoError):
    """The state left the finite range during time stepping.

    Attributes:
        last_valid_index: index of the last grid point with a finite state
    """

    def __init__(self, message: str, last_valid_index: Optional[int] = None):
        super().__init__(message)
        self.last_valid_index = last_valid_index
