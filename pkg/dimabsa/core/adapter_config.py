"""
Adapter-tuning configuration for the generative subtasks.

The toolkit does not run adapter training; it writes the configuration a
training harness consumes, with 4-bit loading and low-rank adapters on the
attention and MLP projections.
"""

import json
import logging
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Optional, Tuple, Union

from dimabsa.errors import AdapterConfigError

logger = logging.getLogger(__name__)

DEFAULT_TARGET_MODULES: Tuple[str, ...] = (
    "q_proj",
    "k_proj",
    "v_proj",
    "o_proj",
    "gate_proj",
    "up_proj",
    "down_proj",
)

QUANTIZATION_CHOICES = ("4bit", "8bit", "none")
PRECISION_CHOICES = ("bf16", "fp16", "fp32")


@dataclass(frozen=True)
class AdapterTuneConfig:
    """
    Settings of one adapter-tuning run.

    Attributes:
        epochs: Passes over the training prompts
        per_device_batch: Batch size per device
        grad_accum: Gradient accumulation steps
        learning_rate: Peak learning rate
        weight_decay: Decoupled weight decay
        warmup_ratio: Share of steps spent warming up
        lr_scheduler: Scheduler name understood by the harness
        optim: Optimizer name understood by the harness
        max_seq_length: Longest prompt plus answer, in tokens
        quantization: Base-model load precision
        precision: Compute precision
        max_grad_norm: Gradient clipping norm
        lora_r: Adapter rank
        lora_alpha: Adapter scaling numerator
        lora_dropout: Dropout on adapter inputs
        target_modules: Projection layers receiving adapters
        base_model: Backbone identifier, None to let the harness decide
    """
    epochs: int = 1
    per_device_batch: int = 2
    grad_accum: int = 4
    learning_rate: float = 2e-4
    weight_decay: float = 1e-4
    warmup_ratio: float = 0.03
    lr_scheduler: str = "linear"
    optim: str = "paged_adamw_32bit"
    max_seq_length: int = 2048
    quantization: str = "4bit"
    precision: str = "bf16"
    max_grad_norm: float = 0.3
    lora_r: int = 16
    lora_alpha: int = 32
    lora_dropout: float = 0.2
    target_modules: Tuple[str, ...] = DEFAULT_TARGET_MODULES
    base_model: Optional[str] = None

    @property
    def effective_batch_size(self) -> int:
        """Prompts per optimizer step on one device."""
        return self.per_device_batch * self.grad_accum

    def validate(self) -> None:
        """
        Raises:
            AdapterConfigError: If a field is out of range
        """
        positive = ("epochs", "per_device_batch", "grad_accum", "max_seq_length", "lora_r")
        for name in positive:
            if getattr(self, name) < 1:
                raise AdapterConfigError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.lora_alpha <= 0:
            raise AdapterConfigError("lora_alpha must be positive")
        if self.learning_rate <= 0 or self.max_grad_norm <= 0:
            raise AdapterConfigError("learning_rate and max_grad_norm must be positive")
        if self.weight_decay < 0:
            raise AdapterConfigError("weight_decay must be non-negative")
        if not 0.0 <= self.lora_dropout < 1.0:
            raise AdapterConfigError("lora_dropout must lie in [0, 1)")
        if not 0.0 <= self.warmup_ratio <= 1.0:
            raise AdapterConfigError("warmup_ratio must lie in [0, 1]")
        if self.quantization not in QUANTIZATION_CHOICES:
            raise AdapterConfigError(
                f"quantization must be one of {', '.join(QUANTIZATION_CHOICES)}"
            )
        if self.precision not in PRECISION_CHOICES:
            raise AdapterConfigError(f"precision must be one of {', '.join(PRECISION_CHOICES)}")
        named = all(isinstance(m, str) and m for m in self.target_modules)
        if not self.target_modules or not named:
            raise AdapterConfigError("target_modules must list at least one module name")
        if not self.lr_scheduler or not self.optim:
            raise AdapterConfigError("lr_scheduler and optim must be named")


def serialize_adapter_config(cfg: AdapterTuneConfig) -> bytes:
    """
    Render a validated config as an indented JSON document.

    Keys follow field order; equal configs give identical bytes.

    Raises:
        AdapterConfigError: If the config is invalid
    """
    cfg.validate()
    data: Dict[str, Any] = asdict(cfg)
    data["target_modules"] = list(cfg.target_modules)
    data["effective_batch_size"] = cfg.effective_batch_size
    return (json.dumps(data, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def parse_adapter_config(source: Union[bytes, str]) -> AdapterTuneConfig:
    """
    Read a document written by :func:`serialize_adapter_config`.

    Missing keys take their defaults; ``effective_batch_size`` is derived
    and ignored on input.

    Raises:
        AdapterConfigError: If the document is malformed, has unknown keys or
            violates a field range
    """
    text = source.decode("utf-8-sig") if isinstance(source, bytes) else source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise AdapterConfigError(f"adapter config is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise AdapterConfigError("adapter config must be a JSON object")

    data.pop("effective_batch_size", None)
    known = {f.name for f in fields(AdapterTuneConfig)}
    unknown = set(data) - known
    if unknown:
        raise AdapterConfigError(f"unknown adapter config keys: {', '.join(sorted(unknown))}")
    if "target_modules" in data:
        if not isinstance(data["target_modules"], list):
            raise AdapterConfigError("target_modules must be a list")
        data["target_modules"] = tuple(data["target_modules"])
    try:
        cfg = AdapterTuneConfig(**data)
        cfg.validate()
    except TypeError as e:
        raise AdapterConfigError(f"malformed adapter config: {e}") from e
    logger.debug(f"Parsed adapter config with rank {cfg.lora_r}")
    return cfg
