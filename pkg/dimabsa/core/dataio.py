"""
Task data loading, validation, flattening and submission writing.

Reads and writes the three subtask JSON formats (``Aspect_VA``, ``Triplet``,
``Quadruplet``) either as a single JSON array or as one record per line.
"""

import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from dimabsa.errors import (
    DataFormatError,
    DatasetValidationError,
    DimABSAError,
    IncompletePredictionsError,
    RecordValidationError,
    SubmissionError,
    VAFormatError,
)
from dimabsa.models.dataset import (
    Container,
    DatasetSplit,
    Payload,
    Severity,
    SubmissionEntry,
    ValidationReport,
)
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
    Term,
    parse_term,
    term_to_str,
)
from dimabsa.models.va_pair import VAPair, denormalize_clip, normalize_va
from dimabsa.utils.helpers import format_two_decimals

logger = logging.getLogger(__name__)

Source = Union[bytes, str, IO[bytes]]


def parse_va_string(s: str) -> VAPair:
    """
    Parse a ``V#A`` string such as ``"7.25#6.75"``.

    Raises:
        VAFormatError: If the string is not two numbers joined by one ``#``
        VARangeError: If a value is outside [1.00, 9.00]
    """
    if not isinstance(s, str) or s.count("#") != 1:
        raise VAFormatError(f"VA must be 'V#A' with exactly one '#', got {s!r}")
    values = []
    for side in s.split("#"):
        try:
            values.append(float(side.strip()))
        except ValueError:
            raise VAFormatError(f"non-numeric VA component {side!r} in {s!r}") from None
    return VAPair(valence=values[0], arousal=values[1])


def format_va_string(va: VAPair) -> str:
    """Format a pair as ``V#A`` with exactly two decimals per side."""
    return f"{format_two_decimals(va.valence)}#{format_two_decimals(va.arousal)}"


def _decode(source: Source) -> str:
    if isinstance(source, str):
        return source
    raw = source if isinstance(source, bytes) else source.read()
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        raise DataFormatError(f"input is not valid UTF-8 ({e.reason})", f"byte {e.start}") from e


def _read_container(text: str, report: ValidationReport) -> Tuple[Container, List[Tuple[str, Any]]]:
    """Split a document into ``(locator, raw record)`` pairs."""
    stripped = text.lstrip()
    if stripped.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise DataFormatError(e.msg, f"line {e.lineno}, column {e.colno}") from e
        return Container.ARRAY, [(f"record {i + 1}", obj) for i, obj in enumerate(data)]

    # a lone pretty-printed object is one record
    if stripped.startswith("{"):
        try:
            whole = json.loads(text)
        except json.JSONDecodeError:
            whole = None
        if isinstance(whole, dict):
            first_line = text[: len(text) - len(stripped)].count("\n") + 1
            return Container.LINES, [(f"line {first_line}", whole)]

    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append((f"line {lineno}", json.loads(line)))
        except json.JSONDecodeError as e:
            report.add(
                Severity.ERROR, f"line {lineno}", f"invalid JSON: {e.msg} at column {e.colno}"
            )
    return Container.LINES, records


def _require(obj: Dict[str, Any], key: str) -> Any:
    if key not in obj:
        raise RecordValidationError(f"missing field {key!r}", key)
    return obj[key]


def _parse_va_field(item: Dict[str, Any]) -> VAPair:
    value = _require(item, "VA")
    try:
        return parse_va_string(value)
    except DimABSAError as e:
        raise RecordValidationError(str(e), "VA") from e


def _parse_labels(obj: Dict[str, Any], subtask: Subtask, require_labels: bool) -> Tuple[list, list]:
    key = subtask.payload_key
    if key not in obj:
        if require_labels or subtask is Subtask.ASR:
            raise RecordValidationError(f"missing field {key!r}", key)
        return [], []
    items = obj[key]
    if not isinstance(items, list):
        raise RecordValidationError(f"{key} must be a list", key)

    entries, tuples = [], []
    for item in items:
        if not isinstance(item, dict):
            raise RecordValidationError(f"{key} items must be objects", key)
        aspect = parse_term(_require(item, "Aspect"), "Aspect")
        va = _parse_va_field(item)
        if subtask is Subtask.ASR:
            entries.append(AspectEntry(aspect=aspect, va=va))
            continue
        opinion = parse_term(_require(item, "Opinion"), "Opinion")
        category = None
        if subtask.has_category:
            category = _require(item, "Category")
            if not isinstance(category, str):
                raise RecordValidationError("Category must be a string", "Category")
        tuples.append(SentimentTuple(aspect=aspect, opinion=opinion, category=category, va=va))
    return entries, tuples


def _parse_review(
    obj: Dict[str, Any], language: Optional[Language], domain: Optional[Domain]
) -> Review:
    review_id = _require(obj, "ID")
    if not isinstance(review_id, str):
        raise RecordValidationError("ID must be a string", "ID")
    text = obj.get("Text", "")
    if not isinstance(text, str):
        raise RecordValidationError("Text must be a string", "Text")
    return Review(
        id=review_id, text=text, language=language, domain=domain, has_text="Text" in obj
    )


def _substring_warnings(record: AnnotatedRecord, locator: str, report: ValidationReport) -> None:
    text = record.review.text
    if not text:
        return
    terms: List[Tuple[str, Term]] = [("Aspect", e.aspect) for e in record.aspect_entries]
    for t in record.tuples:
        terms.extend([("Aspect", t.aspect), ("Opinion", t.opinion)])
    for field_name, term in terms:
        if term is not NULL and term_to_str(term) not in text:
            report.add(
                Severity.WARNING,
                locator,
                f"{term_to_str(term)!r} does not occur in the text",
                field_name,
            )


def load_split(
    source: Source,
    subtask: Subtask,
    split: Split = Split.TRAIN,
    language: Optional[Language] = None,
    domain: Optional[Domain] = None,
    require_labels: bool = True,
    strict: bool = False,
) -> DatasetSplit:
    """
    Load and validate one data file.

    Invalid records are left out of the split and described in its report.

    Args:
        source: JSON array or line-delimited JSON, as bytes, text or a binary stream
        subtask: Expected subtask shape of every record
        split: Partition the file belongs to
        language: Data language, stamped on every review
        domain: Review domain, stamped on every review
        require_labels: If False, DimASTE/DimASQP records without tuples are accepted
        strict: Raise instead of reporting when hard errors are found

    Returns:
        DatasetSplit with its ValidationReport

    Raises:
        DataFormatError: If a JSON array document cannot be parsed
        DatasetValidationError: In strict mode, if any record is invalid
    """
    report = ValidationReport()
    container, raw_records = _read_container(_decode(source), report)
    records: List[AnnotatedRecord] = []
    seen_ids: set = set()

    for locator, obj in raw_records:
        report.records_seen += 1
        if not isinstance(obj, dict):
            report.add(Severity.ERROR, locator, "record must be a JSON object")
            continue
        where = f"{locator} (id={obj.get('ID')!r})" if "ID" in obj else locator
        try:
            review = _parse_review(obj, language, domain)
            entries, tuples = _parse_labels(obj, subtask, require_labels)
            record = AnnotatedRecord(
                review=review, subtask=subtask, aspect_entries=tuple(entries), tuples=tuple(tuples)
            )
        except RecordValidationError as e:
            report.add(Severity.ERROR, where, str(e), e.field)
            continue
        except DimABSAError as e:
            report.add(Severity.ERROR, where, str(e))
            continue
        if review.id in seen_ids:
            report.add(Severity.ERROR, where, f"duplicate ID {review.id!r}", "ID")
            continue
        seen_ids.add(review.id)
        _substring_warnings(record, where, report)
        records.append(record)

    for issue in report.errors:
        logger.warning(f"Rejected {issue}")
    if strict and report.has_errors:
        first = "; ".join(str(i) for i in report.errors[:3])
        raise DatasetValidationError(f"{len(report.errors)} invalid record(s): {first}")

    return DatasetSplit(
        records=records, split=split, subtask=subtask, container=container, report=report
    )


def read_split(path: Path, subtask: Subtask, **kwargs: Any) -> DatasetSplit:
    """Load a split from a file path; keyword arguments go to :func:`load_split`."""
    return load_split(Path(path).read_bytes(), subtask, **kwargs)


def read_asr_queries(source: Source) -> List[RegressionExample]:
    """
    Read DimASR inputs, labeled or not, as flattened regression rows.

    Records may carry ``Aspect_VA`` (rows get targets) or a plain ``Aspect``
    list (rows are target-less, as in test inputs).

    Raises:
        DataFormatError: If a record cannot be read
    """
    report = ValidationReport()
    _, raw_records = _read_container(_decode(source), report)
    if report.has_errors:
        raise DataFormatError(str(report.errors[0]))

    rows: List[RegressionExample] = []
    for locator, obj in raw_records:
        try:
            if not isinstance(obj, dict):
                raise RecordValidationError("record must be a JSON object")
            review = _parse_review(obj, None, None)
            if "Aspect_VA" in obj:
                entries, _ = _parse_labels(obj, Subtask.ASR, True)
                pairs = [(e.aspect, normalize_va(e.va)) for e in entries]
            else:
                aspects = _require(obj, "Aspect")
                if not isinstance(aspects, list) or not aspects:
                    raise RecordValidationError("Aspect must be a nonempty list", "Aspect")
                pairs = [(parse_term(a, "Aspect"), None) for a in aspects]
        except DimABSAError as e:
            raise DataFormatError(str(e), locator) from e
        rows.extend(_flatten_review(review, pairs))
    return rows


def _flatten_review(review: Review, pairs: Iterable[Tuple[Term, Any]]) -> List[RegressionExample]:
    counts: Dict[str, int] = defaultdict(int)
    rows = []
    for aspect, target in pairs:
        label = term_to_str(aspect)
        rows.append(
            RegressionExample(
                review_id=review.id,
                review_text=review.text,
                aspect=aspect,
                target=target,
                occurrence=counts[label],
            )
        )
        counts[label] += 1
    return rows


def flatten_asr(split: DatasetSplit) -> List[RegressionExample]:
    """
    Flatten a DimASR split into one row per review/aspect pair.

    Rows follow review order, then aspect order. Repeated aspect strings
    in a review get increasing ``occurrence`` indices.
    """
    if split.subtask is not Subtask.ASR:
        raise RecordValidationError(f"cannot flatten a {split.subtask.value} split", "subtask")
    rows: List[RegressionExample] = []
    for record in split.records:
        pairs = [(e.aspect, normalize_va(e.va)) for e in record.aspect_entries]
        rows.extend(_flatten_review(record.review, pairs))
    return rows


@dataclass(frozen=True)
class PredictionRow:
    """A predicted VA pair for one flattened review/aspect row."""
    review_id: str
    aspect: Term
    va: VAPair
    occurrence: Optional[int] = None


RowLike = Union[PredictionRow, Tuple[str, Term, VAPair]]


def group_predictions(
    rows: Sequence[RowLike],
    reference: Sequence[RegressionExample],
) -> List[SubmissionEntry]:
    """
    Group per-aspect predictions back into per-review submission entries.

    Rows may arrive in any order. A row without an explicit occurrence index
    takes the next free index for its (review, aspect) pair, in row order.

    Args:
        rows: Predictions as PredictionRow or ``(review id, aspect, VAPair)``
        reference: The flattened rows the predictions were made for

    Returns:
        One entry per review, in reference order, aspects in original order

    Raises:
        IncompletePredictionsError: If a reference row has no prediction or a
            prediction has no reference row
    """
    predicted: Dict[Tuple[str, str, int], VAPair] = {}
    next_occurrence: Dict[Tuple[str, str], int] = defaultdict(int)
    unexpected: List[Tuple[str, str]] = []
    expected_keys = {row.key for row in reference}

    for raw in rows:
        row = raw if isinstance(raw, PredictionRow) else PredictionRow(*raw)
        label = term_to_str(row.aspect)
        if row.occurrence is None:
            occurrence = next_occurrence[(row.review_id, label)]
            next_occurrence[(row.review_id, label)] += 1
        else:
            occurrence = row.occurrence
        key = (row.review_id, label, occurrence)
        if key not in expected_keys or key in predicted:
            unexpected.append((row.review_id, label))
            continue
        predicted[key] = row.va

    missing = [(r.review_id, term_to_str(r.aspect)) for r in reference if r.key not in predicted]
    if missing or unexpected:
        raise IncompletePredictionsError(missing, unexpected)

    grouped: Dict[str, List[AspectEntry]] = {}
    for r in reference:
        entry = AspectEntry(aspect=r.aspect, va=predicted[r.key])
        grouped.setdefault(r.review_id, []).append(entry)
    return [SubmissionEntry(id=rid, payload=tuple(entries)) for rid, entries in grouped.items()]


def entries_from_split(split: DatasetSplit) -> List[SubmissionEntry]:
    """Convert gold records into submission entries, keeping any text they had."""
    entries = []
    for record in split.records:
        payload: Payload = record.aspect_entries if split.subtask is Subtask.ASR else record.tuples
        text = record.review.text if record.review.has_text else None
        entries.append(SubmissionEntry(id=record.review.id, payload=payload, text=text))
    return entries


def payload_item_to_json(
    item: Union[AspectEntry, SentimentTuple], subtask: Subtask
) -> Dict[str, str]:
    """
    Serialize one aspect entry or tuple in task field order.

    Raises:
        SubmissionError: If the item does not fit the subtask
    """
    if subtask is Subtask.ASR:
        if not isinstance(item, AspectEntry):
            raise SubmissionError(
                f"DimASR payload items must be aspect entries, got {type(item).__name__}"
            )
        return {"Aspect": term_to_str(item.aspect), "VA": format_va_string(item.va)}

    if not isinstance(item, SentimentTuple):
        raise SubmissionError(f"{subtask.payload_key} items must be sentiment tuples")
    if subtask.has_category != (item.category is not None):
        raise SubmissionError(f"category presence does not match {subtask.value}")
    obj = {"Aspect": term_to_str(item.aspect)}
    if item.category is not None:
        obj["Category"] = item.category
    obj["Opinion"] = term_to_str(item.opinion)
    obj["VA"] = format_va_string(item.va)
    return obj


def entry_to_json(entry: SubmissionEntry, subtask: Subtask) -> Dict[str, Any]:
    """Serialize a submission entry as an ordered JSON object."""
    if not entry.id:
        raise SubmissionError("submission entry without ID")
    obj: Dict[str, Any] = {"ID": entry.id}
    if entry.text is not None:
        obj["Text"] = entry.text
    obj[subtask.payload_key] = [payload_item_to_json(item, subtask) for item in entry.payload]
    return obj


def write_submission(
    entries: Sequence[SubmissionEntry],
    subtask: Subtask,
    container: Container = Container.LINES,
) -> bytes:
    """
    Serialize entries in task format as UTF-8, keeping input order.

    Raises:
        SubmissionError: If an entry violates the subtask format
    """
    objects = [entry_to_json(entry, subtask) for entry in entries]
    if container is Container.ARRAY:
        return (json.dumps(objects, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    return "".join(json.dumps(obj, ensure_ascii=False) + "\n" for obj in objects).encode("utf-8")


def write_split(split: DatasetSplit) -> bytes:
    """Serialize a loaded split in the container shape it was read from."""
    return write_submission(entries_from_split(split), split.subtask, split.container)


def examples_to_jsonl(rows: Sequence[RegressionExample]) -> bytes:
    """Serialize flattened rows, one JSON object per line."""
    lines = []
    for row in rows:
        obj: Dict[str, Any] = {
            "ID": row.review_id,
            "Aspect": term_to_str(row.aspect),
            "Occurrence": row.occurrence,
            "Text": row.review_text,
        }
        if row.target is not None:
            obj["VA"] = format_va_string(denormalize_clip(row.target))
        lines.append(json.dumps(obj, ensure_ascii=False) + "\n")
    return "".join(lines).encode("utf-8")
