"""
Dataset split and submission models.

This module defines the container returned by the loader, the validation
report that travels with it, and the per-review submission entry.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Optional, Tuple, Union

from dimabsa.models.record import AnnotatedRecord, AspectEntry, SentimentTuple, Split, Subtask


class Severity(Enum):
    """Validation issue severity."""
    ERROR = "error"
    WARNING = "warning"


class Container(Enum):
    """Outer shape of a JSON data file."""
    ARRAY = "array"
    LINES = "lines"


@dataclass(frozen=True)
class ValidationIssue:
    """
    One finding produced while loading a split.

    Attributes:
        severity: Hard error or soft warning
        locator: Where it happened, e.g. ``line 3`` or ``record 2 (id=x)``
        field: Offending JSON field, if known
        message: Human-readable description
    """
    severity: Severity
    locator: str
    field: Optional[str]
    message: str

    def __str__(self) -> str:
        where = f"{self.locator} [{self.field}]" if self.field else self.locator
        return f"{self.severity.value}: {where}: {self.message}"


@dataclass
class ValidationReport:
    """Collected load findings; records with errors are excluded from the split."""
    issues: List[ValidationIssue] = field(default_factory=list)
    records_seen: int = 0

    def add(
        self,
        severity: Severity,
        locator: str,
        message: str,
        field_name: Optional[str] = None,
    ) -> None:
        """Append a finding."""
        self.issues.append(ValidationIssue(severity, locator, field_name, message))

    @property
    def errors(self) -> List[ValidationIssue]:
        """Hard errors."""
        return [i for i in self.issues if i.severity is Severity.ERROR]

    @property
    def warnings(self) -> List[ValidationIssue]:
        """Soft warnings."""
        return [i for i in self.issues if i.severity is Severity.WARNING]

    @property
    def has_errors(self) -> bool:
        """Check if any hard error was found."""
        return any(i.severity is Severity.ERROR for i in self.issues)


@dataclass
class DatasetSplit:
    """
    The validated records of one data file.

    Attributes:
        records: Valid records in file order
        split: Partition the file belongs to
        subtask: Subtask shared by every record
        container: Shape the file was read from, reused on write
        report: Findings collected during loading
    """
    records: List[AnnotatedRecord]
    split: Split
    subtask: Subtask
    container: Container = Container.LINES
    report: ValidationReport = field(default_factory=ValidationReport)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[AnnotatedRecord]:
        return iter(self.records)

    @property
    def ids(self) -> List[str]:
        """Review identifiers in file order."""
        return [r.review.id for r in self.records]


Payload = Union[Tuple[AspectEntry, ...], Tuple[SentimentTuple, ...]]


@dataclass(frozen=True)
class SubmissionEntry:
    """
    One review's predictions in task format.

    Attributes:
        id: Review identifier
        payload: Aspect entries (DimASR) or tuples (DimASTE, DimASQP)
        text: Review text, written only when present
    """
    id: str
    payload: Payload
    text: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "payload", tuple(self.payload))
