"""
Instruction prompts for DimASTE and DimASQP generation.

Prompts follow the native chat template of the backbone family, carry a
language-specific instruction, the domain category list for quadruplets,
an optional NULL policy, and optional few-shot demonstrations.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from dimabsa.errors import DemoSamplingError, PromptError
from dimabsa.models.dataset import DatasetSplit
from dimabsa.models.record import Domain, Language, SentimentTuple, Subtask, term_to_str
from dimabsa.utils.helpers import format_two_decimals

logger = logging.getLogger(__name__)


class ProfileFamily(Enum):
    """Chat-template families of the supported backbones."""
    LLAMA = "llama"
    QWEN = "qwen"


@dataclass(frozen=True)
class PromptProfile:
    """
    Turn delimiters of a chat template.

    Attributes:
        family: Template family
        prefix: Text opening the whole prompt
        header: Turn opener with a ``{role}`` placeholder
        turn_end: Text closing each turn
        decoding: Generation setting the prompts are meant for
    """
    family: ProfileFamily
    prefix: str
    header: str
    turn_end: str
    decoding: str = "greedy"

    def turn(self, role: str, content: str) -> str:
        """Render one closed turn."""
        return self.open_turn(role) + content + self.turn_end

    def open_turn(self, role: str) -> str:
        """Render the opener of a turn left for the model to complete."""
        return self.header.replace("{role}", role)


LLAMA_PROFILE = PromptProfile(
    family=ProfileFamily.LLAMA,
    prefix="<|begin_of_text|>",
    header="<|start_header_id|>{role}<|end_header_id|>\n\n",
    turn_end="<|eot_id|>",
)

QWEN_PROFILE = PromptProfile(
    family=ProfileFamily.QWEN,
    prefix="",
    header="<|im_start|>{role}\n",
    turn_end="<|im_end|>\n",
)

PROFILES: Dict[str, PromptProfile] = {p.family.value: p for p in (LLAMA_PROFILE, QWEN_PROFILE)}

# Llama 3.1 8B for English, Qwen 2.5 for every other language
DEFAULT_PROFILE_FAMILY: Dict[Language, ProfileFamily] = {
    lang: ProfileFamily.LLAMA if lang is Language.ENG else ProfileFamily.QWEN for lang in Language
}


def get_profile(name: str) -> PromptProfile:
    """Look up a profile by family name (``llama`` or ``qwen``)."""
    try:
        return PROFILES[name.strip().lower()]
    except KeyError:
        raise PromptError(
            f"unknown prompt profile {name!r} (expected one of: {', '.join(PROFILES)})"
        ) from None


def default_profile(language: Language) -> PromptProfile:
    """Profile of the backbone used for a language."""
    return PROFILES[DEFAULT_PROFILE_FAMILY[language].value]


@dataclass(frozen=True)
class Demonstration:
    """A review and its gold tuples shown to the model as an example."""
    review_id: str
    text: str
    tuples: Tuple[SentimentTuple, ...]


@dataclass(frozen=True)
class PromptSpec:
    """
    Everything a prompt is built from.

    Attributes:
        language: Data and instruction language
        domain: Review domain
        subtask: DimASTE or DimASQP
        instruction: Task instruction in the data language
        category_label: Heading of the category list
        categories: Valid categories, DimASQP only
        null_policy: Text discouraging NULL answers, None to omit
        demonstrations: Few-shot examples in sampled order
    """
    language: Language
    domain: Domain
    subtask: Subtask
    instruction: str
    category_label: str = ""
    categories: Tuple[str, ...] = ()
    null_policy: Optional[str] = None
    demonstrations: Tuple[Demonstration, ...] = field(default_factory=tuple)

    def validate(self) -> None:
        """
        Raises:
            PromptError: If the spec is inconsistent with its subtask
        """
        if self.subtask is Subtask.ASR:
            raise PromptError("prompts are built for DimASTE and DimASQP only")
        if not self.instruction.strip():
            raise PromptError(f"empty instruction for {self.language.value}/{self.subtask.value}")
        if self.subtask.has_category and not self.categories:
            raise PromptError("DimASQP prompts need a category list")
        if not self.subtask.has_category and self.categories:
            raise PromptError("DimASTE prompts carry no category list")


class InstructionRegistry:
    """
    Instruction texts keyed by language and subtask, NULL policies by
    language and category lists by domain.
    """

    def __init__(self, data: Dict[str, Any]) -> None:
        self._data = data

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "InstructionRegistry":
        """
        Load a registry file, or the packaged one when ``path`` is None.

        Raises:
            PromptError: If the file is missing or not valid JSON
        """
        try:
            if path is None:
                text = resources.files("dimabsa.templates").joinpath("instructions.json").read_text(
                    encoding="utf-8"
                )
            else:
                text = Path(path).read_text(encoding="utf-8")
            return cls(json.loads(text))
        except (OSError, json.JSONDecodeError) as e:
            raise PromptError(f"cannot load instruction registry: {e}") from e

    def _lookup(self, section: str, *keys: str) -> Any:
        node: Any = self._data.get(section, {})
        for key in keys:
            if not isinstance(node, dict) or key not in node:
                raise PromptError(f"no {section} entry for {'/'.join(keys)}")
            node = node[key]
        return node

    def instruction(self, language: Language, subtask: Subtask) -> str:
        return str(self._lookup("instructions", language.value, subtask.value))

    def category_label(self, language: Language) -> str:
        return str(self._lookup("category_labels", language.value))

    def null_policy(self, language: Language) -> str:
        return str(self._lookup("null_policy", language.value))

    def categories(self, domain: Domain) -> Tuple[str, ...]:
        return tuple(self._lookup("categories", domain.value))


def categories_from_split(split: DatasetSplit) -> Tuple[str, ...]:
    """Sorted set of categories used in a DimASQP split."""
    return tuple(sorted({t.category for r in split.records for t in r.tuples if t.category}))


def partition_has_nulls(split: DatasetSplit) -> bool:
    """Check if any tuple of the split has a NULL aspect or opinion."""
    return any(t.has_null for r in split.records for t in r.tuples)


def make_prompt_spec(
    registry: InstructionRegistry,
    language: Language,
    domain: Domain,
    subtask: Subtask,
    demonstrations: Sequence[Demonstration] = (),
    categories: Optional[Sequence[str]] = None,
    include_null_policy: bool = False,
) -> PromptSpec:
    """
    Assemble and validate a PromptSpec from registry entries.

    Args:
        registry: Instruction registry
        language: Data language
        domain: Review domain
        subtask: DimASTE or DimASQP
        demonstrations: Few-shot examples
        categories: Category list overriding the registry's (DimASQP)
        include_null_policy: Add the NULL policy, for partitions with NULL labels

    Raises:
        PromptError: If an entry is missing for the combination
    """
    if subtask is Subtask.ASR:
        raise PromptError("prompts are built for DimASTE and DimASQP only")
    cats: Tuple[str, ...] = ()
    label = ""
    if subtask.has_category:
        cats = tuple(categories) if categories else registry.categories(domain)
        label = registry.category_label(language)
    spec = PromptSpec(
        language=language,
        domain=domain,
        subtask=subtask,
        instruction=registry.instruction(language, subtask),
        category_label=label,
        categories=cats,
        null_policy=registry.null_policy(language) if include_null_policy else None,
        demonstrations=tuple(demonstrations),
    )
    spec.validate()
    return spec


def serialize_tuples_json(tuples: Sequence[SentimentTuple], subtask: Subtask) -> str:
    """
    Render tuples as the JSON answer the model is trained to produce.

    Valence and Arousal are numbers written with exactly two decimals.
    """
    items = []
    for t in tuples:
        fields = [("Aspect", json.dumps(term_to_str(t.aspect), ensure_ascii=False))]
        if subtask.has_category:
            fields.append(("Category", json.dumps(t.category or "", ensure_ascii=False)))
        fields.append(("Opinion", json.dumps(term_to_str(t.opinion), ensure_ascii=False)))
        fields.append(("Valence", format_two_decimals(t.va.valence)))
        fields.append(("Arousal", format_two_decimals(t.va.arousal)))
        items.append("{" + ", ".join(f'"{k}": {v}' for k, v in fields) + "}")
    return "[" + ", ".join(items) + "]"


def _system_content(spec: PromptSpec) -> str:
    parts = [spec.instruction]
    if spec.categories:
        parts.append(f"{spec.category_label}: {', '.join(spec.categories)}")
    if spec.null_policy:
        parts.append(spec.null_policy)
    return "\n\n".join(parts)


def build_prompt(
    spec: PromptSpec,
    profile: PromptProfile,
    review_text: str,
    answer: Optional[Sequence[SentimentTuple]] = None,
) -> str:
    """
    Render a prompt for one review.

    The prompt holds a system turn with the instruction, one user/assistant
    turn pair per demonstration, the user turn with the review and an open
    assistant turn. With ``answer`` the assistant turn is filled and closed,
    giving a training prompt.

    Raises:
        PromptError: If the spec is invalid
    """
    spec.validate()
    pieces = [profile.prefix, profile.turn("system", _system_content(spec))]
    for demo in spec.demonstrations:
        pieces.append(profile.turn("user", demo.text))
        pieces.append(profile.turn("assistant", serialize_tuples_json(demo.tuples, spec.subtask)))
    pieces.append(profile.turn("user", review_text))
    if answer is None:
        pieces.append(profile.open_turn("assistant"))
    else:
        pieces.append(profile.turn("assistant", serialize_tuples_json(answer, spec.subtask)))
    return "".join(pieces)


def sample_demos(train: DatasetSplit, k: int = 3, seed: int = 0) -> List[Demonstration]:
    """
    Draw ``k`` distinct training records uniformly without replacement.

    Raises:
        DemoSamplingError: If ``k`` is negative or exceeds the split size
    """
    if k < 0:
        raise DemoSamplingError(f"cannot sample {k} demonstrations")
    if k > len(train):
        raise DemoSamplingError(f"cannot sample {k} demonstrations from {len(train)} records")
    if k == 0:
        return []
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(train), size=k, replace=False)
    demos = []
    for index in picks:
        record = train.records[int(index)]
        demos.append(Demonstration(record.review.id, record.review.text, record.tuples))
    logger.debug(f"Sampled demonstrations {[d.review_id for d in demos]} with seed {seed}")
    return demos


def prompts_to_jsonl(prompts: Sequence[Tuple[str, str]]) -> bytes:
    """Serialize ``(review id, prompt)`` pairs as ``{"ID", "Prompt"}`` lines."""
    return "".join(
        json.dumps({"ID": review_id, "Prompt": prompt}, ensure_ascii=False) + "\n"
        for review_id, prompt in prompts
    ).encode("utf-8")
