"""
Custom exception classes for the toolkit.

This module defines the exceptions raised by the data, metric, regression,
generation and analysis layers. The CLI turns any of them into a red
``Error:`` line and a nonzero exit status.
"""

from typing import Iterable, Optional, Sequence, Tuple


class DimABSAError(Exception):
    """Base exception for all toolkit errors."""
    pass


class VARangeError(DimABSAError):
    """Raised when a valence or arousal value falls outside [1.00, 9.00]."""
    pass


class VAFormatError(DimABSAError):
    """Raised when a ``V#A`` string cannot be parsed."""
    pass


class RecordValidationError(DimABSAError):
    """Raised when a record violates a domain invariant."""

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        super().__init__(message)
        self.field = field


class DataFormatError(DimABSAError):
    """Raised when an input document is not parseable JSON."""

    def __init__(self, message: str, locator: Optional[str] = None) -> None:
        super().__init__(f"{locator}: {message}" if locator else message)
        self.locator = locator


class DatasetValidationError(DimABSAError):
    """Raised when a split contains hard validation errors in strict mode."""
    pass


class IncompletePredictionsError(DimABSAError):
    """Raised when grouped predictions do not cover the flattened input."""

    def __init__(
        self,
        missing: Sequence[Tuple[str, str]],
        unexpected: Sequence[Tuple[str, str]] = (),
    ) -> None:
        self.missing = list(missing)
        self.unexpected = list(unexpected)
        parts = []
        if self.missing:
            parts.append(f"missing predictions for {_format_keys(self.missing)}")
        if self.unexpected:
            parts.append(f"predictions for unknown rows {_format_keys(self.unexpected)}")
        super().__init__("; ".join(parts))


class SubmissionError(DimABSAError):
    """Raised when a submission entry cannot be serialized."""
    pass


class MetricInputError(DimABSAError):
    """Raised when metric inputs are empty or misaligned."""
    pass


class UndefinedCorrelationError(MetricInputError):
    """Raised when a correlation is requested for a constant vector."""
    pass


class SubtaskMismatchError(DimABSAError):
    """Raised when tuples do not match the requested subtask shape."""
    pass


class TemplateError(DimABSAError):
    """Raised when an input template or its substitution is invalid."""
    pass


class PoolingError(DimABSAError):
    """Raised when attention pooling receives a fully masked sequence."""
    pass


class DimensionMismatchError(DimABSAError):
    """Raised when tensor widths do not agree."""
    pass


class BatchTooSmallError(DimABSAError):
    """Raised when a batch statistic needs more instances than given."""
    pass


class TrainingDivergedError(DimABSAError):
    """Raised when the training loss becomes non-finite."""
    pass


class CheckpointError(DimABSAError):
    """Raised when a model archive cannot be written or read."""
    pass


class EncoderUnavailableError(DimABSAError):
    """Raised when an encoder backend cannot be constructed."""
    pass


class PromptError(DimABSAError):
    """Raised when a prompt cannot be assembled."""
    pass


class DemoSamplingError(PromptError):
    """Raised when too few records exist to draw demonstrations."""
    pass


class AdapterConfigError(DimABSAError):
    """Raised when an adapter-tuning configuration is invalid."""
    pass


class EdaError(DimABSAError):
    """Raised when a dataset analysis cannot be computed."""
    pass


class ConfigError(DimABSAError):
    """Raised when a run configuration is invalid."""
    pass


def _format_keys(keys: Iterable[Tuple[str, str]]) -> str:
    return ", ".join(f"({review_id!r}, {aspect!r})" for review_id, aspect in keys)
