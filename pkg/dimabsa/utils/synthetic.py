"""
Synthetic DimASR data with planted sentiment cues.

Every review mentions one aspect followed by a cue word, optionally
intensified. The gold VA is a fixed function of the cue and intensifier,
so a working regressor can learn it while a mean predictor cannot.
"""

from typing import Dict, List, Tuple

import numpy as np

from dimabsa.models.dataset import Container, DatasetSplit
from dimabsa.models.record import (
    AnnotatedRecord,
    AspectEntry,
    Domain,
    Language,
    Review,
    Split,
    Subtask,
)
from dimabsa.models.va_pair import VA_MAX, VA_MIN, VAPair

CUES: Dict[str, Tuple[float, float]] = {
    "thrilling": (8.5, 8.5),
    "wonderful": (8.0, 7.0),
    "pleasant": (7.0, 4.0),
    "calm": (6.0, 2.5),
    "mediocre": (4.5, 4.0),
    "boring": (3.5, 2.5),
    "awful": (2.0, 7.5),
    "disgusting": (1.5, 8.0),
}

ASPECTS = ("food", "service", "staff", "price", "ambience", "dessert", "wine", "view")

FILLERS = (
    "honestly",
    "overall",
    "last week",
    "on our visit",
    "as expected",
    "to be fair",
    "this time",
    "again",
)

INTENSIFIER = "very"


def _clip(value: float) -> float:
    return round(min(VA_MAX, max(VA_MIN, value)), 2)


def cue_va(cue: str, intensified: bool) -> VAPair:
    """Gold VA of a cue; the intensifier pushes valence away from neutral and raises arousal."""
    valence, arousal = CUES[cue]
    if intensified:
        valence += 0.5 if valence >= 5.0 else -0.5
        arousal += 0.5
    return VAPair(_clip(valence), _clip(arousal))


def make_synthetic_split(n_reviews: int, seed: int, split: Split = Split.TRAIN) -> DatasetSplit:
    """
    Generate a labeled DimASR split.

    Args:
        n_reviews: Number of single-aspect reviews
        seed: Generator seed; equal seeds give equal splits
        split: Partition name used in review IDs
    """
    rng = np.random.default_rng(seed)
    cues = sorted(CUES)
    records: List[AnnotatedRecord] = []
    for i in range(n_reviews):
        aspect = ASPECTS[rng.integers(len(ASPECTS))]
        cue = cues[rng.integers(len(cues))]
        intensified = bool(rng.random() < 0.5)
        lead = FILLERS[rng.integers(len(FILLERS))]
        tail = FILLERS[rng.integers(len(FILLERS))]
        modifier = f"{INTENSIFIER} " if intensified else ""
        text = f"{lead.capitalize()} the {aspect} was {modifier}{cue} {tail}."
        review = Review(
            id=f"syn_{split.value.lower()}_{i:04d}",
            text=text,
            language=Language.ENG,
            domain=Domain.RESTAURANT,
        )
        entry = AspectEntry(aspect=aspect, va=cue_va(cue, intensified))
        records.append(AnnotatedRecord(review=review, subtask=Subtask.ASR, aspect_entries=(entry,)))
    return DatasetSplit(
        records=records, split=split, subtask=Subtask.ASR, container=Container.LINES
    )
