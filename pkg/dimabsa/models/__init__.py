"""Domain models initialization."""

from dimabsa.models.dataset import (
    Container,
    DatasetSplit,
    Severity,
    SubmissionEntry,
    ValidationIssue,
    ValidationReport,
)
from dimabsa.models.record import (
    NULL,
    AnnotatedRecord,
    AspectEntry,
    Domain,
    Language,
    NullTarget,
    RegressionExample,
    Review,
    SentimentTuple,
    Split,
    Subtask,
    Term,
    is_valid_category,
    parse_term,
    term_to_str,
)
from dimabsa.models.scores import Match, MatchResult, MomentStats, ScoreReport
from dimabsa.models.va_pair import NormalizedVA, VAPair, denormalize_clip, normalize_va

__all__ = [
    "NULL",
    "AnnotatedRecord",
    "AspectEntry",
    "Container",
    "DatasetSplit",
    "Domain",
    "Language",
    "Match",
    "MatchResult",
    "MomentStats",
    "NormalizedVA",
    "NullTarget",
    "RegressionExample",
    "Review",
    "ScoreReport",
    "SentimentTuple",
    "Severity",
    "Split",
    "SubmissionEntry",
    "Subtask",
    "Term",
    "VAPair",
    "ValidationIssue",
    "ValidationReport",
    "denormalize_clip",
    "is_valid_category",
    "normalize_va",
    "parse_term",
    "term_to_str",
]
