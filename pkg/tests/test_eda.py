"""
Test suite for dataset statistics and split drift.
"""

import math

import pytest

from dimabsa.core.eda import (
    BinKind,
    Feature,
    PsiLevel,
    fit_categorical_bins,
    fit_quantile_bins,
    null_analysis,
    psi,
    psi_from_proportions,
    psi_level,
    psi_matrix,
    split_stats,
)
from dimabsa.errors import EdaError
from dimabsa.models.dataset import DatasetSplit
from dimabsa.models.record import NULL, AnnotatedRecord, Review, SentimentTuple, Split, Subtask
from dimabsa.models.va_pair import VAPair
from dimabsa.utils.synthetic import make_synthetic_split

VA = VAPair(5.0, 5.0)


def triplet_split(tuples_per_review, split=Split.TRAIN, subtask=Subtask.ASTE):
    records = []
    for i, tuples in enumerate(tuples_per_review):
        text = "x" * (i + 1)
        records.append(AnnotatedRecord(Review(f"r{i}", text), subtask, tuples=tuple(tuples)))
    return DatasetSplit(records=records, split=split, subtask=subtask)


def test_psi_hand_case():
    """Test the two-bin value against a hand computation."""
    expected = 0.4 * math.log(0.9 / 0.5) + 0.4 * math.log(0.5 / 0.1)
    assert psi_from_proportions([0.5, 0.5], [0.9, 0.1]) == pytest.approx(expected, abs=1e-3)
    assert psi_from_proportions([0.5, 0.5], [0.9, 0.1]) == pytest.approx(0.8789, abs=1e-3)


def test_psi_identical_samples_is_zero():
    """Test that a sample does not drift from itself."""
    sample = [float(v) for v in range(1, 101)]
    assert psi(sample, sample, fit_quantile_bins(sample)) == pytest.approx(0.0, abs=1e-9)


def test_psi_with_fitted_bins():
    """Test the hand case through quantile bins on raw samples."""
    reference = [float(v) for v in range(1, 11)]
    bins = fit_quantile_bins(reference, n_bins=2)
    assert bins.edges == (5.5,)
    comparison = [1.0] * 9 + [10.0]
    assert psi(reference, comparison, bins) == pytest.approx(0.8789, abs=1e-3)


def test_psi_proportion_length_mismatch():
    """Test that vectors of different lengths are refused."""
    with pytest.raises(EdaError):
        psi_from_proportions([0.5, 0.5], [1.0])


def test_psi_empty_sample():
    """Test that empty samples are refused."""
    bins = fit_quantile_bins([1.0, 2.0])
    with pytest.raises(EdaError):
        psi([1.0, 2.0], [], bins)


def test_quantile_bins_collapse():
    """Test bins on skewed and constant samples."""
    skewed = fit_quantile_bins([1.0] * 95 + [2.0] * 5)
    assert skewed.kind is BinKind.QUANTILE
    assert skewed.edges == (1.0,)
    assert skewed.n_bins == 2

    constant = fit_quantile_bins([3.0, 3.0, 3.0])
    assert constant.edges == (3.0,)
    assert list(constant.counts([1.0, 3.0, 7.0])) == [2.0, 1.0]


def test_quantile_bins_errors():
    """Test bin fitting errors."""
    with pytest.raises(EdaError):
        fit_quantile_bins([])
    with pytest.raises(EdaError):
        fit_quantile_bins([1.0, 2.0], n_bins=1)
    with pytest.raises(EdaError):
        fit_categorical_bins([])


def test_categorical_unseen_bin():
    """Test that unseen categories land in the extra bin."""
    bins = fit_categorical_bins(["FOOD#QUALITY", "SERVICE#GENERAL", "FOOD#QUALITY"])
    assert bins.categories == ("FOOD#QUALITY", "SERVICE#GENERAL")
    assert list(bins.counts(["AMBIENCE#GENERAL", "FOOD#QUALITY"])) == [1.0, 0.0, 1.0]
    assert psi(["FOOD#QUALITY"], ["AMBIENCE#GENERAL"], bins) > 0.2


@pytest.mark.parametrize(
    "value,level",
    [
        (0.0, PsiLevel.NONE),
        (0.0999, PsiLevel.NONE),
        (0.1, PsiLevel.MODERATE),
        (0.2, PsiLevel.MODERATE),
        (0.2001, PsiLevel.SIGNIFICANT),
    ],
)
def test_psi_level_thresholds(value, level):
    """Test the shift level boundaries."""
    assert psi_level(value) is level


def test_null_composition():
    """Test the NULL rate and its breakdown."""
    split = triplet_split(
        [
            [SentimentTuple(NULL, "bad", None, VA), SentimentTuple("tea", NULL, None, VA)],
            [SentimentTuple("tea", NULL, None, VA), SentimentTuple(NULL, NULL, None, VA)],
            [SentimentTuple("tea", "hot", None, VA)],
            [],
        ]
    )
    report = null_analysis(split)
    assert report.tuples == 5
    assert report.null_tuples == 4
    assert report.rate == pytest.approx(0.8)
    assert report.composition == pytest.approx(
        {"aspect_only": 0.25, "opinion_only": 0.5, "both": 0.25}
    )


def test_null_analysis_without_nulls():
    """Test that a split without NULLs has an empty composition."""
    report = null_analysis(triplet_split([[SentimentTuple("tea", "hot", None, VA)]]))
    assert report.null_tuples == 0 and report.composition == {}


def test_null_analysis_rejects_asr():
    """Test that regression splits have no NULL analysis."""
    with pytest.raises(EdaError):
        null_analysis(make_synthetic_split(5, seed=0))


def test_split_stats_density():
    """Test counts, lengths and density."""
    tuple_ = SentimentTuple("tea", "hot", None, VA)
    summary = split_stats(triplet_split([[tuple_], [tuple_] * 3, [tuple_] * 2]))
    assert summary.reviews == 3
    assert summary.labels == 6
    assert summary.density_mean == pytest.approx(2.0)
    assert summary.density_counts == {1: 1, 3: 1, 2: 1}
    assert (summary.length_min, summary.length_max) == (1, 3)
    assert summary.to_dict()["tuples_per_review"]["counts"] == {"1": 1, "2": 1, "3": 1}


def test_split_stats_categories_and_asr_key():
    """Test category counts for quadruplets and the DimASR density key."""
    quad = SentimentTuple("pasta", "great", "FOOD#QUALITY", VA)
    summary = split_stats(triplet_split([[quad, quad]], subtask=Subtask.ASQP))
    assert summary.category_counts == {"FOOD#QUALITY": 2}

    asr = split_stats(make_synthetic_split(10, seed=0))
    assert asr.density_key == "aspects_per_review"
    assert "aspects_per_review" in asr.to_dict()


def test_split_stats_empty():
    """Test that an empty split gives zero statistics."""
    summary = split_stats(triplet_split([]))
    assert summary.reviews == 0 and summary.density_mean == 0.0


def test_psi_matrix_cells():
    """Test one report per feature and non-reference split."""
    splits = {
        Split.TRAIN: make_synthetic_split(200, seed=1),
        Split.DEV: make_synthetic_split(50, seed=2, split=Split.DEV),
        Split.TEST: make_synthetic_split(50, seed=3, split=Split.TEST),
    }
    reports = psi_matrix(splits)
    assert [(r.feature, r.comparison) for r in reports] == [
        (Feature.REVIEW_LENGTH, Split.DEV),
        (Feature.REVIEW_LENGTH, Split.TEST),
        (Feature.DENSITY, Split.DEV),
        (Feature.DENSITY, Split.TEST),
    ]
    assert all(r.value >= 0.0 and r.level is psi_level(r.value) for r in reports)
    assert reports[0].to_dict()["reference"] == "Train"


def test_psi_matrix_needs_reference():
    """Test that a missing or empty reference split is refused."""
    with pytest.raises(EdaError):
        psi_matrix({Split.DEV: make_synthetic_split(5, seed=0, split=Split.DEV)})
    with pytest.raises(EdaError):
        psi_matrix({Split.TRAIN: triplet_split([])})


def test_category_feature_needs_categories():
    """Test that the category feature is refused for triplets."""
    split = triplet_split([[SentimentTuple("tea", "hot", None, VA)]])
    with pytest.raises(EdaError):
        psi_matrix({Split.TRAIN: split, Split.DEV: split}, features=[Feature.CATEGORY])
