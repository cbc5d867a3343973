"""
Parsing of model generations into sentiment tuples.

The repair policy is minimal: prose around the first JSON array is dropped,
numeric strings become numbers and items with missing keys or unusable
values are rejected. Every repair is recorded on the result.
"""

import json
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import IO, Any, Dict, List, Optional, Sequence, Tuple, Union

from dimabsa.core.dataio import payload_item_to_json
from dimabsa.errors import DataFormatError, RecordValidationError
from dimabsa.models.dataset import SubmissionEntry
from dimabsa.models.record import SentimentTuple, Subtask, Term, is_valid_category, parse_term
from dimabsa.models.va_pair import VA_MAX, VA_MIN, VAPair
from dimabsa.utils.helpers import coerce_float, truncate_string

logger = logging.getLogger(__name__)


class RepairKind(Enum):
    """Kinds of repairs applied to a generation."""
    STRIPPED_PREFIX = "stripped_prefix"
    STRIPPED_SUFFIX = "stripped_suffix"
    COERCED_NUMERIC = "coerced_numeric"
    CLAMPED = "clamped"
    REJECTED_ITEM = "rejected_item"
    NO_ARRAY = "no_array"


@dataclass(frozen=True)
class RepairEvent:
    """One repair, with the index of the affected item when there is one."""
    kind: RepairKind
    detail: str = ""
    item_index: Optional[int] = None


@dataclass(frozen=True)
class GeneratedItem:
    """A parsed tuple whose VA values are not yet clamped."""
    aspect: Term
    opinion: Term
    category: Optional[str]
    valence: float
    arousal: float


@dataclass(frozen=True)
class GenerationRecord:
    """
    Result of parsing one model output.

    Attributes:
        raw: The model output as given
        items: Accepted items in output order
        repairs: Repairs applied, in order
        rejected: Number of items that could not be recovered
    """
    raw: str
    items: Tuple[GeneratedItem, ...] = ()
    repairs: Tuple[RepairEvent, ...] = ()
    rejected: int = 0

    @property
    def failed(self) -> bool:
        """Check if no JSON array was found at all."""
        return any(e.kind is RepairKind.NO_ARRAY for e in self.repairs)

    def tuples(self, subtask: Subtask) -> Tuple[SentimentTuple, ...]:
        """
        Convert items into sentiment tuples.

        Raises:
            VARangeError: If the record was not clamped and a value is out of range
        """
        return tuple(
            SentimentTuple(
                aspect=item.aspect,
                opinion=item.opinion,
                category=item.category if subtask.has_category else None,
                va=VAPair(item.valence, item.arousal),
            )
            for item in self.items
        )


def _find_array(raw: str) -> Tuple[Optional[List[Any]], int, int]:
    decoder = json.JSONDecoder()
    start = raw.find("[")
    while start != -1:
        try:
            value, end = decoder.raw_decode(raw, start)
        except json.JSONDecodeError:
            value = None
        if isinstance(value, list):
            return value, start, end
        start = raw.find("[", start + 1)
    return None, -1, -1


def _required_keys(subtask: Subtask) -> Tuple[str, ...]:
    if subtask.has_category:
        return ("Aspect", "Category", "Opinion", "Valence", "Arousal")
    return ("Aspect", "Opinion", "Valence", "Arousal")


def _parse_item(
    index: int, obj: Any, subtask: Subtask, events: List[RepairEvent]
) -> Optional[GeneratedItem]:
    if not isinstance(obj, dict):
        events.append(RepairEvent(RepairKind.REJECTED_ITEM, "item is not an object", index))
        return None
    missing = [k for k in _required_keys(subtask) if k not in obj]
    if missing:
        events.append(
            RepairEvent(RepairKind.REJECTED_ITEM, f"missing keys {', '.join(missing)}", index)
        )
        return None
    try:
        aspect = parse_term(obj["Aspect"], "Aspect")
        opinion = parse_term(obj["Opinion"], "Opinion")
    except RecordValidationError as e:
        events.append(RepairEvent(RepairKind.REJECTED_ITEM, str(e), index))
        return None
    category = None
    if subtask.has_category:
        category = obj["Category"]
        if not isinstance(category, str) or not is_valid_category(category):
            events.append(
                RepairEvent(RepairKind.REJECTED_ITEM, f"invalid category {category!r}", index)
            )
            return None

    values = []
    for key in ("Valence", "Arousal"):
        value = coerce_float(obj[key])
        if value is None:
            events.append(
                RepairEvent(RepairKind.REJECTED_ITEM, f"non-numeric {key} {obj[key]!r}", index)
            )
            return None
        if isinstance(obj[key], str):
            events.append(RepairEvent(RepairKind.COERCED_NUMERIC, f"{key} {obj[key]!r}", index))
        values.append(value)
    return GeneratedItem(aspect, opinion, category, values[0], values[1])


def parse_generation(raw: str, subtask: Subtask) -> GenerationRecord:
    """
    Parse a model output into unclamped items.

    Never raises on malformed output: when no JSON array is found the
    result is empty and carries a ``NO_ARRAY`` event.

    Args:
        raw: Model output text
        subtask: DimASTE or DimASQP; decides whether Category is required
    """
    array, start, end = _find_array(raw)
    if array is None:
        logger.debug("No JSON array in generation")
        return GenerationRecord(raw=raw, repairs=(RepairEvent(RepairKind.NO_ARRAY),))

    events: List[RepairEvent] = []
    prefix, suffix = raw[:start].strip(), raw[end:].strip()
    if prefix:
        events.append(RepairEvent(RepairKind.STRIPPED_PREFIX, truncate_string(prefix, 80)))
    if suffix:
        events.append(RepairEvent(RepairKind.STRIPPED_SUFFIX, truncate_string(suffix, 80)))

    items = []
    rejected = 0
    for index, obj in enumerate(array):
        item = _parse_item(index, obj, subtask, events)
        if item is None:
            rejected += 1
        else:
            items.append(item)
    if rejected:
        logger.debug(f"Rejected {rejected} of {len(array)} generated items")
    return GenerationRecord(raw=raw, items=tuple(items), repairs=tuple(events), rejected=rejected)


def _clip(value: float) -> float:
    return min(VA_MAX, max(VA_MIN, value))


def clamp_tuples(rec: GenerationRecord) -> GenerationRecord:
    """
    Clip Valence and Arousal into [1.00, 9.00], rejecting non-finite values.

    Order-preserving and idempotent.
    """
    items = []
    events = list(rec.repairs)
    rejected = rec.rejected
    for index, item in enumerate(rec.items):
        if not (math.isfinite(item.valence) and math.isfinite(item.arousal)):
            events.append(RepairEvent(RepairKind.REJECTED_ITEM, "non-finite VA", index))
            rejected += 1
            continue
        clipped = replace(item, valence=_clip(item.valence), arousal=_clip(item.arousal))
        if clipped != item:
            events.append(
                RepairEvent(
                    RepairKind.CLAMPED, f"{item.valence:g}#{item.arousal:g} clipped", index
                )
            )
        items.append(clipped)
    return GenerationRecord(
        raw=rec.raw, items=tuple(items), repairs=tuple(events), rejected=rejected
    )


def to_submission_tuples(rec: GenerationRecord, subtask: Subtask) -> List[Dict[str, str]]:
    """Clamped items as task-format objects with ``V#A`` strings."""
    return [payload_item_to_json(t, subtask) for t in rec.tuples(subtask)]


def to_submission_entry(review_id: str, rec: GenerationRecord, subtask: Subtask) -> SubmissionEntry:
    """Wrap a clamped record as one review's submission entry."""
    return SubmissionEntry(id=review_id, payload=rec.tuples(subtask))


@dataclass
class ParseSummary:
    """Counts over a batch of parsed generations."""
    records: int = 0
    tuples: int = 0
    rejected_items: int = 0
    failed_outputs: int = 0
    repairs: Dict[str, int] = field(default_factory=dict)

    def add(self, rec: GenerationRecord) -> None:
        self.records += 1
        self.tuples += len(rec.items)
        self.rejected_items += rec.rejected
        self.failed_outputs += int(rec.failed)
        for event in rec.repairs:
            self.repairs[event.kind.value] = self.repairs.get(event.kind.value, 0) + 1


def read_generation_outputs(source: Union[bytes, IO[bytes]]) -> List[Tuple[str, str]]:
    """
    Read ``{"ID", "Output"}`` lines.

    Raises:
        DataFormatError: If a line is not a JSON object with both fields
    """
    raw = source if isinstance(source, bytes) else source.read()
    rows = []
    for lineno, line in enumerate(raw.decode("utf-8-sig").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise DataFormatError(e.msg, f"line {lineno}") from e
        if not isinstance(obj, dict) or not isinstance(obj.get("ID"), str):
            raise DataFormatError("expected an object with a string ID", f"line {lineno}")
        output = obj.get("Output")
        if not isinstance(output, str):
            raise DataFormatError("expected a string Output", f"line {lineno}")
        rows.append((obj["ID"], output))
    return rows


def parse_outputs(
    outputs: Sequence[Tuple[str, str]], subtask: Subtask
) -> Tuple[List[Tuple[str, GenerationRecord]], ParseSummary]:
    """Parse and clamp a batch of ``(review id, output)`` pairs, in order."""
    summary = ParseSummary()
    parsed = []
    for review_id, raw in outputs:
        rec = clamp_tuples(parse_generation(raw, subtask))
        summary.add(rec)
        parsed.append((review_id, rec))
    if summary.failed_outputs:
        logger.warning(f"{summary.failed_outputs} of {summary.records} outputs held no JSON array")
    return parsed, summary


def repairs_to_jsonl(parsed: Sequence[Tuple[str, GenerationRecord]]) -> bytes:
    """One line per repaired output, for error analysis."""
    lines = []
    for review_id, rec in parsed:
        if not rec.repairs:
            continue
        repairs = [
            {"kind": e.kind.value, "item": e.item_index, "detail": e.detail} for e in rec.repairs
        ]
        line = {"ID": review_id, "Rejected": rec.rejected, "Repairs": repairs}
        lines.append(json.dumps(line, ensure_ascii=False) + "\n")
    return "".join(lines).encode("utf-8")
