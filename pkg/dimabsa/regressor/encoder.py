"""
Encoder interface and implementations.

An encoder turns input strings into token ids and token ids into contextual
representations. The regressor only depends on this interface; the toy
encoder makes every part of the objective testable on a CPU, and the
pretrained adapter wraps a Hugging Face backbone when ``transformers`` is
installed.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Dict, Sequence, Tuple, Type

import torch
from torch import nn

from dimabsa.errors import EncoderUnavailableError
from dimabsa.models.record import Language
from dimabsa.regressor.tokenizer import HashTokenizer

logger = logging.getLogger(__name__)

DEFAULT_BACKBONES: Dict[Language, str] = {
    Language.ENG: "yangheng/deberta-v3-base-absa-v1.1",
    Language.JPN: "ku-nlp/deberta-v3-base-japanese",
    Language.ZHO: "hfl/chinese-roberta-wwm-ext",
    Language.RUS: "DeepPavlov/rubert-base-cased",
    Language.UKR: "FacebookAI/xlm-roberta-base",
    Language.TAT: "FacebookAI/xlm-roberta-base",
}


@dataclass
class EncoderOutput:
    """
    Contextual token representations of a batch.

    Attributes:
        hidden: ``[B, T, d]`` token vectors
        mask: ``[B, T]`` booleans, True for real tokens
    """
    hidden: torch.Tensor
    mask: torch.Tensor


class Encoder(nn.Module, ABC):
    """Base class for pluggable encoders."""

    name: str = ""

    @property
    @abstractmethod
    def hidden_size(self) -> int:
        """Width d of the token representations."""

    @abstractmethod
    def tokenize(self, texts: Sequence[str]) -> Tuple[torch.Tensor, torch.Tensor]:
        """Return padded ``(input_ids, mask)`` tensors for a batch of strings."""

    @abstractmethod
    def forward(self, input_ids: torch.Tensor, mask: torch.Tensor) -> EncoderOutput:
        """Encode a padded batch."""

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """Constructor arguments needed to rebuild this encoder, plus its name."""


class ToyEncoder(Encoder):
    """
    Small trainable encoder: hashed embeddings, learned positions and one
    self-attention block with a residual connection.
    """

    name = "toy"

    def __init__(
        self,
        vocab_size: int = 8192,
        hidden_size: int = 32,
        num_heads: int = 2,
        max_seq_len: int = 128,
    ) -> None:
        super().__init__()
        self.tokenizer = HashTokenizer(vocab_size=vocab_size, max_seq_len=max_seq_len)
        self._hidden_size = hidden_size
        self._num_heads = num_heads
        self.embedding = nn.Embedding(vocab_size, hidden_size, padding_idx=0)
        self.position = nn.Embedding(max_seq_len, hidden_size)
        self.attention = nn.MultiheadAttention(hidden_size, num_heads, batch_first=True)
        self.norm = nn.LayerNorm(hidden_size)

    @property
    def hidden_size(self) -> int:
        return self._hidden_size

    def tokenize(self, texts: Sequence[str]) -> Tuple[torch.Tensor, torch.Tensor]:
        return self.tokenizer.batch_encode(texts)

    def forward(self, input_ids: torch.Tensor, mask: torch.Tensor) -> EncoderOutput:
        positions = torch.arange(input_ids.shape[1], device=input_ids.device)
        x = self.embedding(input_ids) + self.position(positions).unsqueeze(0)
        attended, _ = self.attention(x, x, x, key_padding_mask=~mask, need_weights=False)
        return EncoderOutput(hidden=self.norm(x + attended), mask=mask)

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "vocab_size": self.tokenizer.vocab_size,
            "hidden_size": self._hidden_size,
            "num_heads": self._num_heads,
            "max_seq_len": self.tokenizer.max_seq_len,
            "tokenizer": self.tokenizer.describe(),
        }


class PretrainedEncoder(Encoder):
    """Adapter around a Hugging Face encoder backbone."""

    name = "hf"

    def __init__(self, model_name: str, max_seq_len: int = 128) -> None:
        super().__init__()
        try:
            from transformers import AutoModel, AutoTokenizer
        except ImportError as e:
            raise EncoderUnavailableError(
                "the 'hf' encoder needs transformers; install dimabsa[hf]"
            ) from e
        from dimabsa.core.config import cache_dir

        cache = str(cache_dir())
        try:
            self.backbone = AutoModel.from_pretrained(model_name, cache_dir=cache)
            self.hf_tokenizer = AutoTokenizer.from_pretrained(model_name, cache_dir=cache)
        except OSError as e:
            raise EncoderUnavailableError(f"cannot load backbone {model_name!r}: {e}") from e
        self.model_name = model_name
        self.max_seq_len = max_seq_len
        logger.info(f"Loaded backbone {model_name}")

    @property
    def hidden_size(self) -> int:
        return int(self.backbone.config.hidden_size)

    def tokenize(self, texts: Sequence[str]) -> Tuple[torch.Tensor, torch.Tensor]:
        batch = self.hf_tokenizer(
            list(texts),
            padding=True,
            truncation=True,
            max_length=self.max_seq_len,
            return_tensors="pt",
        )
        return batch["input_ids"], batch["attention_mask"].bool()

    def forward(self, input_ids: torch.Tensor, mask: torch.Tensor) -> EncoderOutput:
        outputs = self.backbone(input_ids=input_ids, attention_mask=mask.long())
        return EncoderOutput(hidden=outputs.last_hidden_state, mask=mask)

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name, "model_name": self.model_name, "max_seq_len": self.max_seq_len}


ENCODERS: Dict[str, Type[Encoder]] = {
    ToyEncoder.name: ToyEncoder,
    PretrainedEncoder.name: PretrainedEncoder,
}


def create_encoder(name: str, **kwargs: Any) -> Encoder:
    """
    Build a registered encoder by name.

    Raises:
        EncoderUnavailableError: If the name is unknown or construction fails
    """
    factory: Callable[..., Encoder]
    try:
        factory = ENCODERS[name]
    except KeyError:
        raise EncoderUnavailableError(
            f"unknown encoder {name!r} (available: {', '.join(sorted(ENCODERS))})"
        ) from None
    return factory(**kwargs)


def encoder_from_description(description: Dict[str, Any]) -> Encoder:
    """Rebuild an encoder from the output of :meth:`Encoder.describe`."""
    kwargs = {k: v for k, v in description.items() if k not in ("name", "tokenizer")}
    return create_encoder(description["name"], **kwargs)
