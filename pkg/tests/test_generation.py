"""
Test suite for parsing model generations.
"""

import json
import random
import re

import pytest

from dimabsa.core.dataio import load_split, write_submission
from dimabsa.core.generation import (
    GeneratedItem,
    GenerationRecord,
    RepairKind,
    clamp_tuples,
    parse_generation,
    parse_outputs,
    read_generation_outputs,
    repairs_to_jsonl,
    to_submission_entry,
    to_submission_tuples,
)
from dimabsa.core.prompts import serialize_tuples_json
from dimabsa.errors import DataFormatError
from dimabsa.models.dataset import SubmissionEntry
from dimabsa.models.record import NULL, Subtask

VA_PATTERN = re.compile(r"^[1-9]\.\d{2}#[1-9]\.\d{2}$")

TRIPLET = '[{"Aspect":"food","Opinion":"awesome","Valence":7.67,"Arousal":7.67}]'


def kinds(rec):
    return [e.kind for e in rec.repairs]


def test_parse_plain_array():
    """Test a clean generation."""
    rec = parse_generation(TRIPLET, Subtask.ASTE)
    assert len(rec.items) == 1
    assert rec.items[0] == GeneratedItem("food", "awesome", None, 7.67, 7.67)
    assert rec.repairs == () and rec.rejected == 0


def test_parse_strips_prose():
    """Test that text around the array is dropped and recorded."""
    raw = f"Sure! Here is the answer: {TRIPLET}\nHope this helps."
    rec = parse_generation(raw, Subtask.ASTE)
    assert rec.items == parse_generation(TRIPLET, Subtask.ASTE).items
    assert kinds(rec) == [RepairKind.STRIPPED_PREFIX, RepairKind.STRIPPED_SUFFIX]
    assert rec.repairs[0].detail == "Sure! Here is the answer:"


def test_parse_skips_bracket_that_is_not_json():
    """Test that a stray bracket before the array is passed over."""
    rec = parse_generation(f"[note] {TRIPLET}", Subtask.ASTE)
    assert len(rec.items) == 1


def test_parse_empty_array():
    """Test that an empty answer is valid."""
    rec = parse_generation("[]", Subtask.ASTE)
    assert rec.items == () and rec.rejected == 0 and not rec.failed


def test_parse_without_array():
    """Test that output without JSON gives an empty, failed record."""
    rec = parse_generation("I cannot find any opinions.", Subtask.ASTE)
    assert rec.failed
    assert rec.items == ()
    assert kinds(rec) == [RepairKind.NO_ARRAY]


def test_parse_coerces_numeric_strings():
    """Test that quoted numbers are accepted and recorded."""
    raw = '[{"Aspect":"tea","Opinion":"hot","Valence":"6.5","Arousal":7}]'
    rec = parse_generation(raw, Subtask.ASTE)
    assert rec.items[0].valence == 6.5
    assert kinds(rec) == [RepairKind.COERCED_NUMERIC]


def test_parse_rejects_bad_items():
    """Test that malformed items are dropped and counted."""
    raw = json.dumps(
        [
            {"Aspect": "tea", "Opinion": "hot", "Valence": 6, "Arousal": 7},
            {"Aspect": "tea", "Valence": 6, "Arousal": 7},
            {"aspect": "tea", "opinion": "hot", "valence": 6, "arousal": 7},
            {"Aspect": "", "Opinion": "hot", "Valence": 6, "Arousal": 7},
            {"Aspect": "tea", "Opinion": "hot", "Valence": "high", "Arousal": 7},
            "tea",
        ]
    )
    rec = parse_generation(raw, Subtask.ASTE)
    assert len(rec.items) == 1
    assert rec.rejected == 5
    assert [e.item_index for e in rec.repairs] == [1, 2, 3, 4, 5]


def test_quadruplets_need_valid_category():
    """Test Category handling for DimASQP."""
    raw = json.dumps(
        [
            {"Aspect": "pasta", "Category": "FOOD#QUALITY", "Opinion": "great",
             "Valence": 8, "Arousal": 6},
            {"Aspect": "pasta", "Category": "food quality", "Opinion": "great",
             "Valence": 8, "Arousal": 6},
        ]
    )
    rec = parse_generation(raw, Subtask.ASQP)
    assert [i.category for i in rec.items] == ["FOOD#QUALITY"]
    assert rec.rejected == 1
    assert parse_generation(TRIPLET, Subtask.ASQP).rejected == 1


def test_null_terms_parse_to_sentinel():
    """Test that the NULL literal becomes the sentinel."""
    raw = '[{"Aspect":"NULL","Opinion":"great","Valence":7,"Arousal":6}]'
    assert parse_generation(raw, Subtask.ASTE).items[0].aspect is NULL


def test_clamp_bounds():
    """Test clipping of out-of-range values."""
    raw = '[{"Aspect":"a","Opinion":"b","Valence":9.5,"Arousal":0}]'
    rec = clamp_tuples(parse_generation(raw, Subtask.ASTE))
    assert (rec.items[0].valence, rec.items[0].arousal) == (9.0, 1.0)
    assert kinds(rec) == [RepairKind.CLAMPED]
    assert to_submission_tuples(rec, Subtask.ASTE)[0]["VA"] == "9.00#1.00"


def test_clamp_idempotent_and_order_preserving():
    """Test that clamping twice equals clamping once."""
    raw = json.dumps(
        [
            {"Aspect": "a", "Opinion": "b", "Valence": 7.67, "Arousal": 7.67},
            {"Aspect": "c", "Opinion": "d", "Valence": 12, "Arousal": -3},
            {"Aspect": "e", "Opinion": "f", "Valence": 4.2, "Arousal": 1.5},
        ]
    )
    once = clamp_tuples(parse_generation(raw, Subtask.ASTE))
    assert clamp_tuples(once) == once
    assert [i.aspect for i in once.items] == ["a", "c", "e"]
    assert once.items[0].valence == 7.67


def test_clamp_rejects_non_finite():
    """Test that infinite or NaN values are rejected."""
    rec = GenerationRecord(raw="", items=(GeneratedItem("a", "b", None, float("nan"), 5.0),))
    clamped = clamp_tuples(rec)
    assert clamped.items == () and clamped.rejected == 1


def test_submission_values_well_formed():
    """Test that every written VA string has the two-decimal shape."""
    raw = json.dumps(
        [
            {"Aspect": "a", "Opinion": "b", "Valence": v, "Arousal": a}
            for v, a in [(7.67, 7.67), (9, 1), (0.2, 44), ("5.555", 3.14159)]
        ]
    )
    rec = clamp_tuples(parse_generation(raw, Subtask.ASTE))
    values = [t["VA"] for t in to_submission_tuples(rec, Subtask.ASTE)]
    assert values[:2] == ["7.67#7.67", "9.00#1.00"]
    assert all(VA_PATTERN.match(v) for v in values)


def random_value(rng):
    kind = rng.randrange(6)
    if kind == 0:
        return rng.uniform(-50.0, 60.0)
    if kind == 1:
        return rng.uniform(0.99, 9.01)
    if kind == 2:
        return f"{rng.uniform(-5.0, 15.0):.{rng.randrange(6)}f}"
    if kind == 3:
        return rng.choice([float("nan"), float("inf"), -float("inf"), 1e300, -1e300])
    if kind == 4:
        return rng.randint(-20, 20)
    return rng.choice(["high", "", None, [7], {"v": 5}])


def test_submission_values_fuzz():
    """Test that random generations only ever yield on-scale two-decimal VA strings."""
    rng = random.Random(2025)
    for _ in range(10_000):
        items = [
            {"Aspect": "a", "Opinion": "b", "Valence": random_value(rng),
             "Arousal": random_value(rng)}
            for _ in range(rng.randrange(4))
        ]
        raw = rng.choice(["", "Answer: "]) + json.dumps(items) + rng.choice(["", " done"])
        rec = clamp_tuples(parse_generation(raw, Subtask.ASTE))
        assert len(rec.items) + rec.rejected == len(items)
        for entry in to_submission_tuples(rec, Subtask.ASTE):
            assert VA_PATTERN.match(entry["VA"]), entry
            valence, arousal = (float(x) for x in entry["VA"].split("#"))
            assert 1.0 <= valence <= 9.0 and 1.0 <= arousal <= 9.0


def test_gold_round_trip():
    """Test that serialized gold answers parse back to the same submission."""
    gold_lines = [
        {
            "ID": "q1",
            "Text": "Great pasta, rude waiter.",
            "Quadruplet": [
                {"Aspect": "pasta", "Category": "FOOD#QUALITY", "Opinion": "Great",
                 "VA": "7.75#6.50"},
                {"Aspect": "NULL", "Category": "SERVICE#GENERAL", "Opinion": "rude",
                 "VA": "2.10#6.90"},
            ],
        },
        {"ID": "q2", "Text": "Went there.", "Quadruplet": []},
    ]
    data = "".join(json.dumps(r) + "\n" for r in gold_lines).encode("utf-8")
    gold = load_split(data, Subtask.ASQP)

    outputs = [(r.review.id, serialize_tuples_json(r.tuples, Subtask.ASQP)) for r in gold]
    parsed, summary = parse_outputs(outputs, Subtask.ASQP)

    for (_, rec), record in zip(parsed, gold):
        assert rec.tuples(Subtask.ASQP) == record.tuples
    entries = [to_submission_entry(rid, rec, Subtask.ASQP) for rid, rec in parsed]
    expected = [SubmissionEntry(r.review.id, r.tuples) for r in gold]
    assert write_submission(entries, Subtask.ASQP) == write_submission(expected, Subtask.ASQP)
    assert summary.rejected_items == 0 and summary.tuples == 2


def test_parse_summary_counts():
    """Test the batch summary and the repairs log."""
    outputs = [
        ("r1", TRIPLET),
        ("r2", "no json here"),
        ("r3", 'Answer: [{"Aspect":"a","Opinion":"b","Valence":10,"Arousal":5}]'),
    ]
    parsed, summary = parse_outputs(outputs, Subtask.ASTE)

    assert summary.records == 3
    assert summary.tuples == 2
    assert summary.failed_outputs == 1
    assert summary.repairs == {"no_array": 1, "stripped_prefix": 1, "clamped": 1}

    lines = [json.loads(line) for line in repairs_to_jsonl(parsed).decode("utf-8").splitlines()]
    assert [line["ID"] for line in lines] == ["r2", "r3"]
    assert lines[1]["Repairs"][1]["kind"] == "clamped"


def test_read_generation_outputs():
    """Test reading the generation file."""
    data = b'{"ID": "r1", "Output": "[]"}\n\n{"ID": "r2", "Output": "x"}\n'
    assert read_generation_outputs(data) == [("r1", "[]"), ("r2", "x")]


@pytest.mark.parametrize("line", [b"not json", b'{"ID": "r1"}', b'{"Output": "x"}', b"[1]"])
def test_read_generation_outputs_errors(line):
    """Test that malformed lines name their position."""
    with pytest.raises(DataFormatError, match="line 2"):
        read_generation_outputs(b'{"ID": "r0", "Output": ""}\n' + line + b"\n")
