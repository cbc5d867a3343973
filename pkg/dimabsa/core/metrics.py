"""
Evaluation metrics.

RMSE and Pearson correlation for DimASR, the concordance correlation
coefficient used as a training signal, and continuous F1 for DimASTE and
DimASQP.
"""

import logging
from collections import defaultdict
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from dimabsa.errors import MetricInputError, SubtaskMismatchError, UndefinedCorrelationError
from dimabsa.models.dataset import DatasetSplit
from dimabsa.models.record import SentimentTuple, Subtask, term_to_str
from dimabsa.models.scores import Match, MatchResult, MomentStats, ScoreReport
from dimabsa.models.va_pair import VA_SPAN, VAPair

logger = logging.getLogger(__name__)

Similarity = Callable[[VAPair, VAPair], float]


def _as_arrays(
    xs: Sequence[float], ys: Sequence[float], min_len: int = 1
) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise MetricInputError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size < min_len:
        raise MetricInputError(f"need at least {min_len} value(s), got {x.size}")
    return x, y


def _va_matrix(pairs: Sequence[VAPair]) -> np.ndarray:
    return np.array([p.as_tuple() for p in pairs], dtype=np.float64).reshape(-1, 2)


def rmse_va(preds: Sequence[VAPair], golds: Sequence[VAPair]) -> float:
    """
    Root mean squared error pooled over both dimensions.

    Computes ``sqrt(sum((v' - v)^2 + (a' - a)^2) / 2N)``.

    Raises:
        MetricInputError: If the lists are empty or of different lengths
    """
    if len(preds) != len(golds):
        raise MetricInputError(f"length mismatch: {len(preds)} predictions vs {len(golds)} gold")
    if not preds:
        raise MetricInputError("cannot compute RMSE of empty lists")
    diff = _va_matrix(preds) - _va_matrix(golds)
    return float(np.sqrt(np.mean(diff**2)))


def rmse_per_dimension(preds: Sequence[VAPair], golds: Sequence[VAPair]) -> Tuple[float, float]:
    """Return ``(RMSE_V, RMSE_A)``."""
    if len(preds) != len(golds) or not preds:
        raise MetricInputError("need equal nonempty prediction and gold lists")
    diff = _va_matrix(preds) - _va_matrix(golds)
    v, a = np.sqrt(np.mean(diff**2, axis=0))
    return float(v), float(a)


def pcc(xs: Sequence[float], ys: Sequence[float]) -> float:
    """
    Pearson correlation coefficient.

    Raises:
        MetricInputError: On length mismatch or fewer than two values
        UndefinedCorrelationError: If either vector is constant
    """
    x, y = _as_arrays(xs, ys, min_len=2)
    dx = x - x.mean()
    dy = y - y.mean()
    sx = np.sqrt(np.sum(dx**2))
    sy = np.sqrt(np.sum(dy**2))
    if sx == 0.0 or sy == 0.0:
        raise UndefinedCorrelationError("correlation is undefined for a constant vector")
    r = float(np.sum(dx * dy) / (sx * sy))
    return max(-1.0, min(1.0, r))


def moment_stats(xs: Sequence[float], partner: Sequence[float]) -> MomentStats:
    """Population mean and variance of ``xs`` and its covariance with ``partner``."""
    x, y = _as_arrays(xs, partner)
    mean = float(x.mean())
    return MomentStats(
        mean=mean,
        variance=float(np.mean((x - mean) ** 2)),
        covariance=float(np.mean((x - mean) * (y - y.mean()))),
    )


def ccc(preds: Sequence[float], golds: Sequence[float]) -> float:
    """
    Concordance correlation coefficient with population moments.

    ``2 cov / (var_p + var_g + (mean_p - mean_g)^2)``; 0 when both the
    numerator and the denominator vanish.

    Raises:
        MetricInputError: On length mismatch or fewer than two values
    """
    _as_arrays(preds, golds, min_len=2)
    p = moment_stats(preds, golds)
    g = moment_stats(golds, preds)
    numerator = 2.0 * p.covariance
    denominator = p.variance + g.variance + (p.mean - g.mean) ** 2
    if denominator == 0.0:
        return 0.0
    return numerator / denominator


def weighted_ccc(ccc_v: float, ccc_a: float, lambda_v: float, lambda_a: float) -> float:
    """Combine per-dimension CCCs as ``lambda_v * ccc_v + lambda_a * ccc_a``."""
    return lambda_v * ccc_v + lambda_a * ccc_a


def va_similarity(pred: VAPair, gold: VAPair) -> float:
    """
    Weight of a matched tuple: ``1 - (|dv| + |da|) / 16``, clipped to [0, 1].
    """
    distance = abs(pred.valence - gold.valence) + abs(pred.arousal - gold.arousal)
    return min(1.0, max(0.0, 1.0 - distance / (2 * VA_SPAN)))


def _check_shape(tuples: Sequence[SentimentTuple], mode: Subtask) -> None:
    if mode is Subtask.ASR:
        raise SubtaskMismatchError("tuple matching applies to DimASTE and DimASQP only")
    for t in tuples:
        if (t.category is not None) != mode.has_category:
            raise SubtaskMismatchError(
                f"tuple {term_to_str(t.aspect)!r} category presence does not match {mode.value}"
            )


def match_tuples(
    preds: Sequence[SentimentTuple],
    golds: Sequence[SentimentTuple],
    mode: Subtask,
    similarity: Similarity = va_similarity,
) -> MatchResult:
    """
    Align predicted and gold tuples of one review.

    Only tuples with equal categorical keys may pair. Within each group of
    equal keys the pairing maximizes the summed VA similarity.

    Args:
        preds: Predicted tuples
        golds: Gold tuples
        mode: DimASTE or DimASQP
        similarity: Weight of a pair, in [0, 1]

    Returns:
        MatchResult with matched index pairs and unmatched counts

    Raises:
        SubtaskMismatchError: If a tuple's category presence disagrees with mode
    """
    _check_shape(preds, mode)
    _check_shape(golds, mode)

    pred_groups: Dict[tuple, List[int]] = defaultdict(list)
    gold_groups: Dict[tuple, List[int]] = defaultdict(list)
    for i, t in enumerate(preds):
        pred_groups[t.key(mode)].append(i)
    for j, t in enumerate(golds):
        gold_groups[t.key(mode)].append(j)

    matches: List[Match] = []
    for key, pred_idx in pred_groups.items():
        gold_idx = gold_groups.get(key)
        if not gold_idx:
            continue
        weights = np.array(
            [[similarity(preds[i].va, golds[j].va) for j in gold_idx] for i in pred_idx],
            dtype=np.float64,
        )
        rows, cols = linear_sum_assignment(weights, maximize=True)
        for r, c in zip(rows, cols):
            matches.append(Match(pred_idx[r], gold_idx[c], float(weights[r, c])))

    matches.sort(key=lambda m: m.pred_index)
    return MatchResult(
        matches=matches,
        unmatched_pred=len(preds) - len(matches),
        unmatched_gold=len(golds) - len(matches),
    )


def continuous_f1(
    preds_by_review: Mapping[str, Sequence[SentimentTuple]],
    golds_by_review: Mapping[str, Sequence[SentimentTuple]],
    mode: Subtask,
    similarity: Similarity = va_similarity,
) -> ScoreReport:
    """
    Continuous precision, recall and F1 over a set of reviews.

    Predictions for reviews absent from gold count as unmatched. Precision
    (recall) is 0 when there are no predicted (gold) tuples.
    """
    total_weight = 0.0
    n_pred = sum(len(v) for v in preds_by_review.values())
    n_gold = sum(len(v) for v in golds_by_review.values())

    for review_id, gold in golds_by_review.items():
        pred = preds_by_review.get(review_id, ())
        total_weight += match_tuples(pred, gold, mode, similarity).total_weight
    for review_id, pred in preds_by_review.items():
        if review_id not in golds_by_review:
            _check_shape(pred, mode)

    precision = total_weight / n_pred if n_pred else 0.0
    recall = total_weight / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return ScoreReport(
        c_precision=precision, c_recall=recall, c_f1=f1, n_pred=n_pred, n_gold=n_gold
    )


def score_regression(preds: Sequence[VAPair], golds: Sequence[VAPair]) -> ScoreReport:
    """
    DimASR report: pooled RMSE, per-dimension RMSE and PCC.

    A PCC that is undefined for constant predictions is left empty and
    logged rather than reported as 0.
    """
    correlations: Dict[str, Optional[float]] = {}
    for name, index in (("v", 0), ("a", 1)):
        try:
            correlations[name] = pcc(
                [p.as_tuple()[index] for p in preds], [g.as_tuple()[index] for g in golds]
            )
        except UndefinedCorrelationError as e:
            logger.warning(f"PCC_{name.upper()} undefined: {e}")
            correlations[name] = None
    rmse_v, rmse_a = rmse_per_dimension(preds, golds)
    return ScoreReport(
        rmse_va=rmse_va(preds, golds),
        pcc_v=correlations["v"],
        pcc_a=correlations["a"],
        rmse_v=rmse_v,
        rmse_a=rmse_a,
        n_pred=len(preds),
        n_gold=len(golds),
    )


def id_mismatch(pred_ids: Sequence[str], gold_ids: Sequence[str]) -> Tuple[Set[str], Set[str]]:
    """Return ``(ids only in predictions, ids only in gold)``."""
    pred, gold = set(pred_ids), set(gold_ids)
    return pred - gold, gold - pred


def _check_aligned(pred: DatasetSplit, gold: DatasetSplit) -> None:
    extra, missing = id_mismatch(pred.ids, gold.ids)
    if extra or missing:
        parts = []
        if missing:
            parts.append(f"missing from predictions: {', '.join(sorted(missing))}")
        if extra:
            parts.append(f"not in gold: {', '.join(sorted(extra))}")
        raise MetricInputError("review IDs differ; " + "; ".join(parts))


def evaluate_splits(pred: DatasetSplit, gold: DatasetSplit) -> ScoreReport:
    """
    Score a prediction file against a gold file of the same subtask.

    Review IDs must agree. An empty DimASTE/DimASQP prediction file is
    scored as zero predictions.

    Raises:
        MetricInputError: If IDs or aspect rows differ
        SubtaskMismatchError: If the files belong to different subtasks
    """
    if pred.subtask is not gold.subtask:
        raise SubtaskMismatchError(f"{pred.subtask.value} predictions vs {gold.subtask.value} gold")

    if gold.subtask is Subtask.ASR:
        _check_aligned(pred, gold)
        by_id = {r.review.id: r for r in pred.records}
        preds: List[VAPair] = []
        golds: List[VAPair] = []
        for record in gold.records:
            predicted = by_id[record.review.id].aspect_entries
            expected = record.aspect_entries
            pred_aspects = [term_to_str(e.aspect) for e in predicted]
            if pred_aspects != [term_to_str(e.aspect) for e in expected]:
                raise MetricInputError(f"aspect lists differ for review {record.review.id!r}")
            preds.extend(e.va for e in predicted)
            golds.extend(e.va for e in expected)
        return score_regression(preds, golds)

    if len(pred) > 0:
        _check_aligned(pred, gold)
    return continuous_f1(
        {r.review.id: r.tuples for r in pred.records},
        {r.review.id: r.tuples for r in gold.records},
        gold.subtask,
    )
