"""
Run configuration shared by the CLI commands.
"""

import json
import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

from dimabsa.errors import ConfigError, DimABSAError
from dimabsa.models.record import Domain, Language, Subtask
from dimabsa.regressor.config import LossConfig, TrainConfig

logger = logging.getLogger(__name__)

CACHE_ENV_VAR = "DIMABSA_CACHE_DIR"
PATH_FIELDS = ("train_path", "dev_path", "test_path", "output_dir")


def cache_dir() -> Path:
    """Cache directory from ``DIMABSA_CACHE_DIR``, or ``~/.dimabsa/cache``."""
    configured = os.environ.get(CACHE_ENV_VAR)
    if configured:
        return Path(configured).expanduser()
    return Path.home() / ".dimabsa" / "cache"


@dataclass
class RunConfig:
    """
    Effective settings of one command run.

    Attributes:
        subtask: DimASR, DimASTE or DimASQP
        language: Data language
        domain: Review domain
        train_path: Training split
        dev_path: Validation split
        test_path: Split to predict or prompt for
        output_dir: Directory receiving artifacts and the manifest
        seed: Seed of every stochastic step; no default, stochastic commands require it
        profile: Prompt profile family, None for the language default
        encoder: Encoder registry name
        backbone: Pretrained model id for the ``hf`` encoder
        hidden_size: Width of the toy encoder
        demos: Few-shot demonstrations per prompt
        train: Regressor optimization settings
        loss: Regressor objective weights
    """
    subtask: Subtask = Subtask.ASR
    language: Language = Language.ENG
    domain: Domain = Domain.RESTAURANT
    train_path: Optional[Path] = None
    dev_path: Optional[Path] = None
    test_path: Optional[Path] = None
    output_dir: Path = Path("runs")
    seed: Optional[int] = None
    profile: Optional[str] = None
    encoder: str = "toy"
    backbone: Optional[str] = None
    hidden_size: int = 32
    demos: int = 3
    train: TrainConfig = field(default_factory=TrainConfig)
    loss: LossConfig = field(default_factory=LossConfig)

    @property
    def train_config(self) -> TrainConfig:
        """
        Training settings seeded with the run seed.

        Raises:
            ConfigError: If no seed is set
        """
        return replace(self.train, seed=self.require_seed())

    def require_seed(self) -> int:
        """
        The run seed, for commands with a stochastic step.

        Raises:
            ConfigError: If no seed is set
        """
        if self.seed is None:
            raise ConfigError("--seed is required for this command")
        return self.seed

    def validate(self) -> None:
        """
        Raises:
            ConfigError: If a field is out of range
        """
        if self.domain is Domain.FINANCE and self.subtask is not Subtask.ASR:
            raise ConfigError("the Finance domain exists only for DimASR")
        if self.hidden_size < 2:
            raise ConfigError("hidden_size must be at least 2")
        if self.demos < 0:
            raise ConfigError("demos must be non-negative")
        self.train.validate()
        self.loss.validate()

    def require_paths(self, *names: str) -> None:
        """
        Check that the named input paths are set and exist.

        Raises:
            ConfigError: If a path is unset or missing
        """
        for name in names:
            value = getattr(self, name)
            flag = "--" + name.replace("_path", "")
            if value is None:
                raise ConfigError(f"{flag} is required for this command")
            if not Path(value).exists():
                raise ConfigError(f"{flag} file not found: {value}")

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("train", "loss"):
                data[f.name] = value.to_dict()
            elif isinstance(value, (Subtask, Language, Domain)):
                data[f.name] = value.value
            elif isinstance(value, Path):
                data[f.name] = str(value)
            else:
                data[f.name] = value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """
        Build a config from a plain mapping with nested ``train``/``loss`` sections.

        Raises:
            ConfigError: If a key is unknown or a value cannot be parsed
        """
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        values = dict(data)
        try:
            for key, enum in (("subtask", Subtask), ("language", Language), ("domain", Domain)):
                if isinstance(values.get(key), str):
                    values[key] = enum.parse(values[key])
            for key in PATH_FIELDS:
                if values.get(key) is not None:
                    values[key] = Path(values[key])
            values["train"] = TrainConfig.from_dict(values.get("train", {}))
            values["loss"] = LossConfig.from_dict(values.get("loss", {}))
            config = cls(**values)
        except ConfigError:
            raise
        except (DimABSAError, TypeError, ValueError) as e:
            raise ConfigError(f"invalid config: {e}") from e
        config.validate()
        return config

    @classmethod
    def load(cls, path: Path) -> "RunConfig":
        """
        Load a JSON config file.

        Raises:
            ConfigError: If the file is missing or invalid
        """
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError as e:
            raise ConfigError(f"config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        logger.debug(f"Loaded run config from {path}")
        return cls.from_dict(data)

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """
        Copy with command-line values applied; ``None`` leaves a field unchanged.

        Raises:
            ConfigError: If an override names an unknown field or breaks validation
        """
        known = {f.name for f in fields(self)}
        applied = {}
        for key, value in overrides.items():
            if key not in known:
                raise ConfigError(f"unknown config field {key!r}")
            if value is not None:
                applied[key] = value
        config = replace(self, **applied)
        config.validate()
        return config


def resolve_run_config(config_path: Optional[Path], **overrides: Any) -> RunConfig:
    """Load ``config_path`` (or defaults) and apply flag overrides."""
    base = RunConfig.load(config_path) if config_path is not None else RunConfig()
    return base.with_overrides(**overrides)
