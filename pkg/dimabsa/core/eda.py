"""
Dataset statistics and distribution drift between splits.

Drift is measured with the Population Stability Index over deciles of the
reference split (continuous features) or over its category set.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from dimabsa.errors import EdaError
from dimabsa.models.dataset import DatasetSplit
from dimabsa.models.record import NULL, Split, Subtask

logger = logging.getLogger(__name__)

PSI_EPSILON = 1e-6
MODERATE_SHIFT = 0.1
SIGNIFICANT_SHIFT = 0.2

Sample = Sequence[Union[float, str]]


class BinKind(Enum):
    QUANTILE = "quantile"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class BinSpec:
    """
    Bins fitted on a reference sample.

    Quantile bins are right-closed intervals between ``edges`` with open
    ends, so they cover the whole real line. Categorical bins hold one bin
    per reference category plus a final bin for unseen categories.

    Attributes:
        kind: Quantile or categorical
        edges: Interior cut points, quantile bins only
        categories: Reference categories, categorical bins only
        epsilon: Smoothing added to every proportion
    """
    kind: BinKind
    edges: Tuple[float, ...] = ()
    categories: Tuple[str, ...] = ()
    epsilon: float = PSI_EPSILON

    @property
    def n_bins(self) -> int:
        if self.kind is BinKind.QUANTILE:
            return len(self.edges) + 1
        return len(self.categories) + 1

    def counts(self, sample: Sample) -> np.ndarray:
        """Number of sample values falling in each bin."""
        if self.kind is BinKind.QUANTILE:
            values = np.asarray(sample, dtype=np.float64)
            index = np.digitize(values, np.asarray(self.edges, dtype=np.float64), right=True)
        else:
            lookup = {c: i for i, c in enumerate(self.categories)}
            index = np.array([lookup.get(str(v), len(self.categories)) for v in sample], dtype=int)
        return np.bincount(index, minlength=self.n_bins).astype(np.float64)


def fit_quantile_bins(reference: Sequence[float], n_bins: int = 10) -> BinSpec:
    """
    Fit equal-frequency bins on a reference sample.

    Repeated quantiles collapse, so skewed count data may get fewer bins.
    A constant sample still gets two bins split at its value.

    Raises:
        EdaError: If the sample is empty or ``n_bins`` is below 2
    """
    if n_bins < 2:
        raise EdaError("at least two bins are needed")
    values = np.asarray(reference, dtype=np.float64)
    if values.size == 0:
        raise EdaError("cannot fit bins on an empty sample")
    quantiles = np.quantile(values, np.linspace(0.0, 1.0, n_bins + 1)[1:-1])
    edges = np.unique(quantiles)
    # the top edge would leave its bin empty
    edges = edges[edges < values.max()]
    if edges.size == 0:
        edges = np.array([values.min()])
    return BinSpec(BinKind.QUANTILE, edges=tuple(float(e) for e in edges))


def fit_categorical_bins(reference: Sequence[str]) -> BinSpec:
    """
    One bin per reference category, plus one for categories the reference lacks.

    Raises:
        EdaError: If the sample is empty
    """
    if len(reference) == 0:
        raise EdaError("cannot fit bins on an empty sample")
    return BinSpec(BinKind.CATEGORICAL, categories=tuple(sorted({str(c) for c in reference})))


def psi_from_proportions(
    p: Sequence[float], q: Sequence[float], epsilon: float = PSI_EPSILON
) -> float:
    """
    PSI of two bin-proportion vectors.

    Each proportion is raised by ``epsilon`` and both vectors are renormalized
    before summing ``(p - q) * ln(p / q)``.
    """
    p_arr = np.asarray(p, dtype=np.float64) + epsilon
    q_arr = np.asarray(q, dtype=np.float64) + epsilon
    if p_arr.shape != q_arr.shape:
        raise EdaError(f"proportion vectors differ in length: {p_arr.size} vs {q_arr.size}")
    p_arr /= p_arr.sum()
    q_arr /= q_arr.sum()
    return float(max(0.0, np.sum((p_arr - q_arr) * np.log(p_arr / q_arr))))


def psi(reference: Sample, comparison: Sample, bins: BinSpec) -> float:
    """
    Population Stability Index of ``comparison`` against ``reference``.

    Raises:
        EdaError: If either sample is empty
    """
    if len(reference) == 0 or len(comparison) == 0:
        raise EdaError("PSI needs two nonempty samples")
    ref_counts = bins.counts(reference)
    cmp_counts = bins.counts(comparison)
    if np.count_nonzero(ref_counts) <= 1:
        logger.warning("Degenerate binning: the reference sample falls in a single bin")
    return psi_from_proportions(
        ref_counts / ref_counts.sum(), cmp_counts / cmp_counts.sum(), bins.epsilon
    )


class PsiLevel(Enum):
    NONE = "none"
    MODERATE = "moderate"
    SIGNIFICANT = "significant"


def psi_level(value: float) -> PsiLevel:
    """Shift level: below 0.1 none, 0.1 to 0.2 moderate, above 0.2 significant."""
    if value < MODERATE_SHIFT:
        return PsiLevel.NONE
    if value <= SIGNIFICANT_SHIFT:
        return PsiLevel.MODERATE
    return PsiLevel.SIGNIFICANT


class Feature(Enum):
    REVIEW_LENGTH = "review-length"
    DENSITY = "tuples-per-review"
    CATEGORY = "category"


def feature_values(split: DatasetSplit, feature: Feature) -> List[Union[float, str]]:
    """
    Per-review (or per-tuple, for categories) values of a feature.

    Raises:
        EdaError: If the category feature is asked of a split without categories
    """
    if feature is Feature.REVIEW_LENGTH:
        return [float(len(r.review.text)) for r in split.records]
    if feature is Feature.DENSITY:
        return [float(r.label_count) for r in split.records]
    if not split.subtask.has_category:
        raise EdaError(f"{split.subtask.value} splits carry no categories")
    return [t.category for r in split.records for t in r.tuples if t.category]


@dataclass
class SplitSummary:
    """
    Size and density statistics of a split.

    Attributes:
        split: Which split
        subtask: Subtask of the records
        reviews: Number of reviews
        labels: Number of tuples, or aspects for DimASR
        length_mean: Mean review length in codepoints
        length_min: Shortest review in codepoints
        length_max: Longest review in codepoints
        density_key: ``aspects_per_review`` for DimASR, ``tuples_per_review`` otherwise
        density_mean: Mean labels per review
        density_counts: Number of reviews per label count
        category_counts: Tuples per category, DimASQP only
    """
    split: Split
    subtask: Subtask
    reviews: int = 0
    labels: int = 0
    length_mean: float = 0.0
    length_min: int = 0
    length_max: int = 0
    density_key: str = "tuples_per_review"
    density_mean: float = 0.0
    density_counts: Dict[int, int] = field(default_factory=dict)
    category_counts: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {
            "split": self.split.value,
            "subtask": self.subtask.value,
            "reviews": self.reviews,
            "labels": self.labels,
            "length_mean": self.length_mean,
            "length_min": self.length_min,
            "length_max": self.length_max,
            self.density_key: {
                "mean": self.density_mean,
                "counts": {str(k): v for k, v in sorted(self.density_counts.items())},
            },
            "category_counts": dict(sorted(self.category_counts.items())),
        }


def split_stats(split: DatasetSplit) -> SplitSummary:
    """Review counts, length and density distributions, category frequencies."""
    density_key = "aspects_per_review" if split.subtask is Subtask.ASR else "tuples_per_review"
    summary = SplitSummary(split=split.split, subtask=split.subtask, density_key=density_key)
    if not split.records:
        return summary

    lengths = [len(r.review.text) for r in split.records]
    density = [r.label_count for r in split.records]
    summary.reviews = len(split.records)
    summary.labels = sum(density)
    summary.length_mean = float(np.mean(lengths))
    summary.length_min = min(lengths)
    summary.length_max = max(lengths)
    summary.density_mean = float(np.mean(density))
    summary.density_counts = dict(Counter(density))
    if split.subtask.has_category:
        summary.category_counts = dict(
            Counter(t.category for r in split.records for t in r.tuples if t.category)
        )
    return summary


@dataclass(frozen=True)
class NullReport:
    """
    NULL rate and the composition of NULL tuples.

    ``composition`` maps ``aspect_only``, ``opinion_only`` and ``both`` to
    fractions of the NULL tuples; it is empty when there are none.
    """
    tuples: int
    null_tuples: int
    rate: float
    composition: Dict[str, float]


def null_analysis(split: DatasetSplit) -> NullReport:
    """
    Count tuples with a NULL aspect or opinion.

    Raises:
        EdaError: For DimASR splits
    """
    if split.subtask is Subtask.ASR:
        raise EdaError("NULL analysis needs a DimASTE or DimASQP split")
    counts: Counter[str] = Counter()
    total = 0
    for record in split.records:
        for t in record.tuples:
            total += 1
            if t.aspect is NULL and t.opinion is NULL:
                counts["both"] += 1
            elif t.aspect is NULL:
                counts["aspect_only"] += 1
            elif t.opinion is NULL:
                counts["opinion_only"] += 1
    nulls = sum(counts.values())
    composition: Dict[str, float] = {}
    if nulls:
        composition = {k: counts[k] / nulls for k in ("aspect_only", "opinion_only", "both")}
    return NullReport(
        tuples=total,
        null_tuples=nulls,
        rate=nulls / total if total else 0.0,
        composition=composition,
    )


@dataclass(frozen=True)
class PsiReport:
    """One heatmap cell: drift of a feature between the reference and another split."""
    feature: Feature
    reference: Split
    comparison: Split
    value: float
    level: PsiLevel

    def to_dict(self) -> Dict[str, object]:
        return {
            "feature": self.feature.value,
            "reference": self.reference.value,
            "comparison": self.comparison.value,
            "value": self.value,
            "level": self.level.value,
        }


def default_features(subtask: Subtask) -> List[Feature]:
    features = [Feature.REVIEW_LENGTH, Feature.DENSITY]
    if subtask.has_category:
        features.append(Feature.CATEGORY)
    return features


def psi_matrix(
    splits: Mapping[Split, DatasetSplit],
    features: Optional[Sequence[Feature]] = None,
    reference: Split = Split.TRAIN,
    n_bins: int = 10,
) -> List[PsiReport]:
    """
    PSI of every feature between the reference split and each other split.

    Continuous features use quantile bins fitted on the reference; the
    category feature uses its category set.

    Raises:
        EdaError: If the reference split is missing or empty
    """
    if reference not in splits:
        raise EdaError(f"the {reference.value} split is needed as PSI reference")
    ref_split = splits[reference]
    if not ref_split.records:
        raise EdaError(f"the {reference.value} reference split is empty")
    if features is None:
        features = default_features(ref_split.subtask)

    reports = []
    for feature in features:
        ref_values = feature_values(ref_split, feature)
        if feature is Feature.CATEGORY:
            bins = fit_categorical_bins([str(v) for v in ref_values])
        else:
            bins = fit_quantile_bins([float(v) for v in ref_values], n_bins)
        for name in Split:
            if name is reference or name not in splits:
                continue
            cmp_values = feature_values(splits[name], feature)
            if not cmp_values:
                logger.warning(f"Skipping {feature.value} for {name.value}: no values")
                continue
            value = psi(ref_values, cmp_values, bins)
            reports.append(PsiReport(feature, reference, name, value, psi_level(value)))
            logger.debug(f"PSI {feature.value} {reference.value}->{name.value}: {value:.4f}")
    return reports


def plot_psi_heatmap(reports: Sequence[PsiReport], path: Path) -> Path:
    """
    Draw the PSI matrix as an annotated heatmap image.

    Raises:
        EdaError: If matplotlib is not installed or there is nothing to plot
    """
    if not reports:
        raise EdaError("no PSI values to plot")
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as e:
        raise EdaError("plotting needs matplotlib; install the 'plot' extra") from e

    features = list(dict.fromkeys(r.feature for r in reports))
    comparisons = list(dict.fromkeys(r.comparison for r in reports))
    grid = np.full((len(features), len(comparisons)), np.nan)
    for r in reports:
        grid[features.index(r.feature), comparisons.index(r.comparison)] = r.value

    fig, ax = plt.subplots(figsize=(1.8 * len(comparisons) + 2, 0.8 * len(features) + 1.5))
    image = ax.imshow(grid, cmap="Reds", vmin=0.0, vmax=max(0.25, float(np.nanmax(grid))))
    ax.set_xticks(range(len(comparisons)), [c.value for c in comparisons])
    ax.set_yticks(range(len(features)), [f.value for f in features])
    for i in range(len(features)):
        for j in range(len(comparisons)):
            if not np.isnan(grid[i, j]):
                ax.text(j, i, f"{grid[i, j]:.3f}", ha="center", va="center")
    ax.set_title(f"PSI against {reports[0].reference.value}")
    fig.colorbar(image, ax=ax)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    logger.info(f"Wrote PSI heatmap to {path}")
    return path
