"""
Test suite for evaluation metrics.
"""

import itertools
import math
import random

import numpy as np
import pytest

from dimabsa.core.dataio import load_split
from dimabsa.core.metrics import (
    ccc,
    continuous_f1,
    evaluate_splits,
    match_tuples,
    pcc,
    rmse_per_dimension,
    rmse_va,
    score_regression,
    va_similarity,
    weighted_ccc,
)
from dimabsa.errors import MetricInputError, SubtaskMismatchError, UndefinedCorrelationError
from dimabsa.models.record import NULL, SentimentTuple, Subtask
from dimabsa.models.va_pair import VAPair


def triplet(aspect, opinion, v, a):
    return SentimentTuple(aspect, opinion, None, VAPair(v, a))


def test_rmse_va_pooled():
    """Test pooled RMSE over both dimensions."""
    preds = [VAPair(5.0, 5.0), VAPair(7.0, 3.0)]
    golds = [VAPair(6.0, 5.0), VAPair(7.0, 5.0)]
    # squared errors 1, 0, 0, 4 over 2N = 4
    assert rmse_va(preds, golds) == pytest.approx(math.sqrt(5 / 4))
    assert rmse_per_dimension(preds, golds) == pytest.approx((math.sqrt(0.5), math.sqrt(2.0)))


def test_rmse_va_rejects_empty_and_mismatch():
    """Test input checks of RMSE."""
    with pytest.raises(MetricInputError):
        rmse_va([], [])
    with pytest.raises(MetricInputError):
        rmse_va([VAPair(5, 5)], [])


def test_pcc_perfect_and_undefined():
    """Test PCC of a linear relation and of a constant vector."""
    assert pcc([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert pcc([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    with pytest.raises(UndefinedCorrelationError):
        pcc([5, 5, 5], [1, 2, 3])


def test_score_regression_constant_predictions():
    """Test that undefined PCC stays empty while RMSE is reported."""
    preds = [VAPair(5.0, 5.0)] * 3
    golds = [VAPair(4.0, 5.0), VAPair(5.0, 6.0), VAPair(6.0, 4.0)]
    report = score_regression(preds, golds)
    assert report.pcc_v is None and report.pcc_a is None
    assert report.rmse_va == pytest.approx(math.sqrt(4 / 6))
    assert "PCC_V" not in report.to_dict()


def test_ccc_hand_computed():
    """Test CCC against a value worked out by hand."""
    # cov 1/3, var_p 1/6, var_g 2/3, mean gap 0.5
    assert ccc([0.0, 0.5, 1.0], [0.0, 1.0, 2.0]) == pytest.approx(0.6153846, abs=1e-6)


def test_ccc_identity_and_degenerate():
    """Test CCC of identical and of constant equal vectors."""
    assert ccc([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)
    assert ccc([2, 2, 2], [2, 2, 2]) == 0.0


def test_ccc_bounded_by_pcc():
    """Test that CCC never exceeds PCC in magnitude."""
    rng = np.random.default_rng(7)
    for _ in range(100):
        x = rng.normal(size=20)
        y = 0.5 * x + rng.normal(scale=0.5, size=20) + rng.normal()
        assert abs(ccc(x, y)) <= abs(pcc(x, y)) + 1e-12


def test_weighted_ccc():
    """Test the per-dimension combination."""
    assert weighted_ccc(0.8, 0.4, 0.5, 0.5) == pytest.approx(0.6)


def test_va_similarity():
    """Test the similarity weight of a matched pair."""
    assert va_similarity(VAPair(5, 5), VAPair(5, 5)) == 1.0
    assert va_similarity(VAPair(5, 5), VAPair(7, 3)) == pytest.approx(0.75)
    assert va_similarity(VAPair(1, 1), VAPair(9, 9)) == 0.0


def test_match_requires_equal_keys():
    """Test that tuples with different terms never pair."""
    preds = [triplet("fries", "soggy", 3, 5), triplet(NULL, "great", 7, 6)]
    golds = [triplet("Fries", "soggy", 3, 5), triplet(NULL, "great", 6, 6)]
    result = match_tuples(preds, golds, Subtask.ASTE)
    assert result.pairs == [(1, 1)]
    assert result.unmatched_pred == 1 and result.unmatched_gold == 1
    assert result.total_weight == pytest.approx(1 - 1 / 16)


def test_match_uses_category_for_quadruplets():
    """Test that quadruplets also need the same category to pair."""
    p = [SentimentTuple("pasta", "great", "FOOD#QUALITY", VAPair(7, 6))]
    g = [SentimentTuple("pasta", "great", "FOOD#PRICES", VAPair(7, 6))]
    assert match_tuples(p, g, Subtask.ASQP).matches == []


def test_match_rejects_wrong_shape():
    """Test that triplets cannot be scored as quadruplets."""
    with pytest.raises(SubtaskMismatchError):
        match_tuples([triplet("a", "b", 5, 5)], [], Subtask.ASQP)


def test_match_picks_best_pairing_within_key():
    """Test the weight-maximizing pairing among duplicate keys."""
    preds = [triplet("tea", "good", 5, 5), triplet("tea", "good", 8, 8)]
    golds = [triplet("tea", "good", 8, 8), triplet("tea", "good", 5, 5)]
    result = match_tuples(preds, golds, Subtask.ASTE)
    assert sorted(result.pairs) == [(0, 1), (1, 0)]
    assert result.total_weight == pytest.approx(2.0)


def test_continuous_f1_simple():
    """Test precision, recall and F1 on a small case."""
    preds = {"r1": [triplet("fries", "soggy", 3, 5), triplet("bun", "dry", 4, 4)]}
    golds = {"r1": [triplet("fries", "soggy", 3, 5)], "r2": [triplet("tea", "hot", 6, 6)]}
    report = continuous_f1(preds, golds, Subtask.ASTE)
    assert report.c_precision == pytest.approx(0.5)
    assert report.c_recall == pytest.approx(0.5)
    assert report.c_f1 == pytest.approx(0.5)


def test_continuous_f1_empty_predictions():
    """Test that no predictions score zero rather than failing."""
    report = continuous_f1({}, {"r1": [triplet("a", "b", 5, 5)]}, Subtask.ASTE)
    assert report.c_precision == 0.0 and report.c_f1 == 0.0
    assert report.n_gold == 1


def _brute_force_weight(preds, golds):
    best = 0.0
    options = list(range(len(golds))) + [None] * len(preds)
    for chosen in itertools.permutations(options, len(preds)):
        total = 0.0
        for i, j in enumerate(chosen):
            if j is None:
                continue
            if preds[i].key(Subtask.ASTE) != golds[j].key(Subtask.ASTE):
                break
            total += va_similarity(preds[i].va, golds[j].va)
        else:
            best = max(best, total)
    return best


def test_matching_against_exhaustive_search():
    """Test the assignment against exhaustive search on random reviews."""
    rng = random.Random(11)
    terms = ["food", "staff", NULL]
    opinions = ["good", NULL]

    def random_tuple():
        return triplet(
            rng.choice(terms),
            rng.choice(opinions),
            round(rng.uniform(1, 9), 2),
            round(rng.uniform(1, 9), 2),
        )

    for _ in range(200):
        preds = [random_tuple() for _ in range(rng.randint(0, 4))]
        golds = [random_tuple() for _ in range(rng.randint(0, 4))]
        result = match_tuples(preds, golds, Subtask.ASTE)
        assert result.total_weight == pytest.approx(_brute_force_weight(preds, golds), abs=1e-9)
        used_pred = [i for i, _ in result.pairs]
        used_gold = [j for _, j in result.pairs]
        assert len(set(used_pred)) == len(used_pred)
        assert len(set(used_gold)) == len(used_gold)

        weight = _brute_force_weight(preds, golds)
        precision = weight / len(preds) if preds else 0.0
        recall = weight / len(golds) if golds else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        report = continuous_f1({"r": preds}, {"r": golds}, Subtask.ASTE)
        assert report.c_f1 == pytest.approx(f1, abs=1e-9)
        assert report.c_precision == pytest.approx(precision, abs=1e-9)
        assert report.c_recall == pytest.approx(recall, abs=1e-9)


def test_continuous_f1_ignores_prediction_order():
    """Test that shuffling predictions within and across reviews keeps the scores."""
    rng = random.Random(5)
    terms = ["food", "staff", "price", NULL]

    def random_tuples():
        return [
            triplet(rng.choice(terms), rng.choice(["good", "bad", NULL]),
                    round(rng.uniform(1, 9), 2), round(rng.uniform(1, 9), 2))
            for _ in range(rng.randint(0, 5))
        ]

    for _ in range(50):
        golds = {f"r{i}": random_tuples() for i in range(6)}
        preds = {f"r{i}": random_tuples() for i in range(7)}
        baseline = continuous_f1(preds, golds, Subtask.ASTE)
        shuffled_ids = list(preds)
        rng.shuffle(shuffled_ids)
        shuffled = {rid: rng.sample(preds[rid], len(preds[rid])) for rid in shuffled_ids}
        report = continuous_f1(shuffled, golds, Subtask.ASTE)
        assert report.c_f1 == pytest.approx(baseline.c_f1, abs=1e-12)
        assert report.c_precision == pytest.approx(baseline.c_precision, abs=1e-12)
        assert report.c_recall == pytest.approx(baseline.c_recall, abs=1e-12)


def _asr_lines(vas):
    lines = [
        f'{{"ID": "r{i}", "Text": "The tea.", "Aspect_VA": [{{"Aspect": "tea", "VA": "{va}"}}]}}'
        for i, va in enumerate(vas)
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


def test_evaluate_splits_asr():
    """Test scoring two DimASR files."""
    gold = load_split(_asr_lines(["5.00#5.00", "7.00#3.00"]), Subtask.ASR)
    pred = load_split(_asr_lines(["6.00#5.00", "7.00#5.00"]), Subtask.ASR)
    report = evaluate_splits(pred, gold)
    assert report.is_regression
    assert report.rmse_va == pytest.approx(math.sqrt(5 / 4))


def test_evaluate_splits_id_mismatch():
    """Test that files covering different reviews are refused."""
    gold = load_split(_asr_lines(["5.00#5.00", "7.00#3.00"]), Subtask.ASR)
    pred = load_split(_asr_lines(["6.00#5.00"]), Subtask.ASR)
    with pytest.raises(MetricInputError, match="missing from predictions: r1"):
        evaluate_splits(pred, gold)
