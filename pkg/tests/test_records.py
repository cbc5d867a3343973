"""
Test suite for review and annotation records.
"""

import pytest

from dimabsa.errors import RecordValidationError
from dimabsa.models.record import (
    NULL,
    AnnotatedRecord,
    AspectEntry,
    Domain,
    Language,
    RegressionExample,
    Review,
    SentimentTuple,
    Split,
    Subtask,
    is_valid_category,
    parse_term,
    term_to_str,
)
from dimabsa.models.va_pair import VAPair

VA = VAPair(6.0, 5.0)


def test_enum_parse_accepts_names_and_values():
    """Test case-insensitive parsing of command-line spellings."""
    assert Subtask.parse("asqp") is Subtask.ASQP
    assert Domain.parse("restaurant") is Domain.RESTAURANT
    assert Domain.parse("LAPTOP") is Domain.LAPTOP
    assert Language.parse(" zho ") is Language.ZHO
    assert Split.parse("dev") is Split.DEV


def test_enum_parse_rejects_unknown():
    """Test that unknown values list the valid choices."""
    with pytest.raises(ValueError, match="expected one of"):
        Subtask.parse("absa")


def test_subtask_payload_keys():
    """Test the JSON field of each subtask."""
    assert Subtask.ASR.payload_key == "Aspect_VA"
    assert Subtask.ASTE.payload_key == "Triplet"
    assert Subtask.ASQP.payload_key == "Quadruplet"
    assert Subtask.ASQP.has_category and not Subtask.ASTE.has_category


def test_parse_term_null_and_empty():
    """Test NULL mapping and empty-string rejection."""
    assert parse_term("NULL") is NULL
    assert parse_term("null") == "null"
    assert parse_term("fries") == "fries"
    with pytest.raises(RecordValidationError):
        parse_term("")
    with pytest.raises(RecordValidationError):
        parse_term(3)
    assert term_to_str(NULL) == "NULL"


@pytest.mark.parametrize(
    "category,valid",
    [("FOOD#QUALITY", True), ("LAPTOP#OPERATION_PERFORMANCE", True), ("food#quality", False),
     ("FOOD", False), ("FOOD#QUALITY#X", False)],
)
def test_category_shape(category, valid):
    """Test the ENTITY#ATTRIBUTE check."""
    assert is_valid_category(category) is valid


def test_sentiment_tuple_key_depends_on_subtask():
    """Test that the category joins the key only for quadruplets."""
    t = SentimentTuple("fries", "soggy", "FOOD#QUALITY", VA)
    assert t.key(Subtask.ASTE) == ("fries", "soggy")
    assert t.key(Subtask.ASQP) == ("fries", "FOOD#QUALITY", "soggy")


def test_sentiment_tuple_rejects_bad_category():
    """Test that malformed categories are rejected at construction."""
    with pytest.raises(RecordValidationError):
        SentimentTuple("fries", "soggy", "food", VA)


def test_has_null():
    """Test NULL detection on either term."""
    assert SentimentTuple(NULL, "great", None, VA).has_null
    assert not SentimentTuple("staff", "great", None, VA).has_null


def test_asr_record_needs_aspects():
    """Test that a DimASR record without aspects is invalid."""
    with pytest.raises(RecordValidationError):
        AnnotatedRecord(Review("r1", "text"), Subtask.ASR)


def test_asqp_record_needs_categories():
    """Test that quadruplet records carry a category on every tuple."""
    with pytest.raises(RecordValidationError):
        AnnotatedRecord(
            Review("r1", "text"), Subtask.ASQP, tuples=(SentimentTuple("a", "b", None, VA),)
        )


def test_aste_record_rejects_categories():
    """Test that triplet records carry no category."""
    with pytest.raises(RecordValidationError):
        AnnotatedRecord(
            Review("r1", "text"),
            Subtask.ASTE,
            tuples=(SentimentTuple("a", "b", "FOOD#QUALITY", VA),),
        )


def test_finance_only_for_asr():
    """Test that the Finance domain is limited to DimASR."""
    review = Review("r1", "Shares fell.", Language.ENG, Domain.FINANCE)
    AnnotatedRecord(review, Subtask.ASR, aspect_entries=(AspectEntry("Shares", VA),))
    with pytest.raises(RecordValidationError):
        AnnotatedRecord(review, Subtask.ASTE, tuples=(SentimentTuple("Shares", "fell", None, VA),))


def test_empty_tuple_list_is_valid():
    """Test that a review without opinions is a valid DimASTE record."""
    record = AnnotatedRecord(Review("r1", "We ate."), Subtask.ASTE)
    assert record.label_count == 0


def test_review_requires_id():
    """Test that an empty review ID is rejected."""
    with pytest.raises(RecordValidationError):
        Review("", "text")


def test_regression_example_key():
    """Test the grouping key of a flattened row."""
    row = RegressionExample("r1", "text", NULL, occurrence=1)
    assert row.key == ("r1", "NULL", 1)
