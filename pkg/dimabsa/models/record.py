"""
Review and annotation models.

This module defines the annotated review records shared by the three
subtasks, the explicit NULL target and the flattened regression row.
"""

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple, Type, TypeVar, Union

from dimabsa.errors import RecordValidationError
from dimabsa.models.va_pair import NormalizedVA, VAPair

_E = TypeVar("_E", bound="_ParseableEnum")


class _ParseableEnum(Enum):
    """Enum accepting case-insensitive names or values from the command line."""

    @classmethod
    def parse(cls: Type[_E], text: str) -> _E:
        needle = text.strip().lower()
        for member in cls:
            if needle in (member.name.lower(), str(member.value).lower()):
                return member
        choices = ", ".join(str(m.value) for m in cls)
        raise ValueError(f"unknown {cls.__name__} {text!r} (expected one of: {choices})")


class Language(_ParseableEnum):
    """Languages of the benchmark."""
    ENG = "ENG"
    ZHO = "ZHO"
    JPN = "JPN"
    RUS = "RUS"
    TAT = "TAT"
    UKR = "UKR"


class Domain(_ParseableEnum):
    """Review domains of the benchmark."""
    RESTAURANT = "Restaurant"
    LAPTOP = "Laptop"
    HOTEL = "Hotel"
    FINANCE = "Finance"


class Subtask(_ParseableEnum):
    """The three subtasks and their record payload keys."""
    ASR = "ASR"
    ASTE = "ASTE"
    ASQP = "ASQP"

    @property
    def payload_key(self) -> str:
        """JSON field holding the record's labels."""
        return {"ASR": "Aspect_VA", "ASTE": "Triplet", "ASQP": "Quadruplet"}[self.value]

    @property
    def has_category(self) -> bool:
        """Check if tuples of this subtask carry a category."""
        return self is Subtask.ASQP


class Split(_ParseableEnum):
    """Dataset partitions."""
    TRAIN = "Train"
    DEV = "Dev"
    TEST = "Test"


class NullTarget(Enum):
    """Explicit marker for an implicit aspect or opinion."""
    NULL = "NULL"

    def __str__(self) -> str:
        return self.value


NULL = NullTarget.NULL

Term = Union[str, NullTarget]

_CATEGORY_PATTERN = re.compile(r"^[A-Z0-9_]+#[A-Z0-9_]+$")


def is_valid_category(category: str) -> bool:
    """Check that a category has the ``ENTITY#ATTRIBUTE`` shape."""
    return bool(_CATEGORY_PATTERN.match(category))


def parse_term(value: object, field: str = "term") -> Term:
    """
    Convert a serialized aspect or opinion into a Term.

    The literal string ``"NULL"`` becomes the NULL sentinel; the empty
    string is rejected.
    """
    if value is NULL:
        return NULL
    if not isinstance(value, str):
        raise RecordValidationError(f"{field} must be a string, got {type(value).__name__}", field)
    if value == NULL.value:
        return NULL
    if value == "":
        raise RecordValidationError(f"{field} must not be empty", field)
    return value


def term_to_str(term: Term) -> str:
    """Serialize a Term; NULL maps to the literal ``"NULL"``."""
    return term.value if isinstance(term, NullTarget) else term


def _check_term(term: Term, field: str) -> None:
    if isinstance(term, NullTarget):
        return
    if not isinstance(term, str) or term == "":
        raise RecordValidationError(f"{field} must be a nonempty string or NULL", field)


@dataclass(frozen=True)
class Review:
    """
    A single review text.

    Attributes:
        id: Identifier, unique within its split
        text: Review text (case preserved)
        language: Data language, when known
        domain: Review domain, when known
        has_text: Whether the source record carried a Text field
    """
    id: str
    text: str
    language: Optional[Language] = None
    domain: Optional[Domain] = None
    has_text: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise RecordValidationError("review id must be a nonempty string", "ID")


@dataclass(frozen=True)
class AspectEntry:
    """A given aspect and its gold VA pair (DimASR)."""
    aspect: Term
    va: VAPair

    def __post_init__(self) -> None:
        _check_term(self.aspect, "Aspect")


@dataclass(frozen=True)
class SentimentTuple:
    """
    A triplet (no category) or quadruplet (with category).

    Attributes:
        aspect: Aspect term or NULL
        opinion: Opinion term or NULL
        category: ``ENTITY#ATTRIBUTE`` label, quadruplets only
        va: Valence-arousal pair
    """
    aspect: Term
    opinion: Term
    category: Optional[str]
    va: VAPair

    def __post_init__(self) -> None:
        _check_term(self.aspect, "Aspect")
        _check_term(self.opinion, "Opinion")
        if self.category is not None and not is_valid_category(self.category):
            raise RecordValidationError(
                f"category {self.category!r} is not of the form ENTITY#ATTRIBUTE", "Category"
            )

    def key(self, subtask: Subtask) -> Tuple[Term, ...]:
        """Categorical match key: ``(A, O)`` or ``(A, C, O)``."""
        if subtask.has_category:
            return (self.aspect, self.category or "", self.opinion)
        return (self.aspect, self.opinion)

    @property
    def has_null(self) -> bool:
        """Check if the aspect or the opinion is NULL."""
        return self.aspect is NULL or self.opinion is NULL


@dataclass(frozen=True)
class AnnotatedRecord:
    """
    A review with its subtask-shaped labels.

    Exactly one of ``aspect_entries`` (DimASR) and ``tuples`` (DimASTE,
    DimASQP) is used.
    """
    review: Review
    subtask: Subtask
    aspect_entries: Tuple[AspectEntry, ...] = ()
    tuples: Tuple[SentimentTuple, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "aspect_entries", tuple(self.aspect_entries))
        object.__setattr__(self, "tuples", tuple(self.tuples))
        if self.subtask is Subtask.ASR:
            if self.tuples:
                raise RecordValidationError("DimASR records carry no tuples", "Aspect_VA")
            if not self.aspect_entries:
                raise RecordValidationError("DimASR records need at least one aspect", "Aspect_VA")
        else:
            key = self.subtask.payload_key
            if self.aspect_entries:
                raise RecordValidationError(f"{key} records carry no aspect entries", key)
            for item in self.tuples:
                if self.subtask.has_category and item.category is None:
                    raise RecordValidationError("quadruplets need a category", "Category")
                if not self.subtask.has_category and item.category is not None:
                    raise RecordValidationError("triplets carry no category", "Category")
        if self.review.domain is Domain.FINANCE and self.subtask is not Subtask.ASR:
            raise RecordValidationError("the Finance domain exists only for DimASR", "domain")

    @property
    def label_count(self) -> int:
        """Number of aspect entries or tuples."""
        return len(self.aspect_entries) if self.subtask is Subtask.ASR else len(self.tuples)


@dataclass(frozen=True)
class RegressionExample:
    """
    One flattened review/aspect row for DimASR.

    Attributes:
        review_id: Source review identifier
        review_text: Review text
        aspect: Aspect term or NULL
        target: Normalized gold VA, None for unlabeled inputs
        occurrence: Index among equal aspect strings within the review
    """
    review_id: str
    review_text: str
    aspect: Term
    target: Optional[NormalizedVA] = None
    occurrence: int = 0

    def __post_init__(self) -> None:
        _check_term(self.aspect, "Aspect")

    @property
    def key(self) -> Tuple[str, str, int]:
        """Grouping key ``(review id, aspect, occurrence)``."""
        return (self.review_id, term_to_str(self.aspect), self.occurrence)
