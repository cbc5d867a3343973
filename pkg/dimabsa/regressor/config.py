"""
Regression training and loss configuration.
"""

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Type, TypeVar

from dimabsa.errors import ConfigError

_C = TypeVar("_C", bound="_DictConfig")


class _DictConfig:
    """Round-trips a dataclass through plain dictionaries, rejecting unknown keys."""

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)  # type: ignore[call-overload]

    @classmethod
    def from_dict(cls: Type[_C], data: Dict[str, Any]) -> _C:
        known = {f.name for f in fields(cls)}  # type: ignore[arg-type]
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown {cls.__name__} keys: {', '.join(sorted(unknown))}")
        config = cls(**data)
        config.validate()
        return config

    def validate(self) -> None:
        pass


@dataclass
class LossConfig(_DictConfig):
    """
    Weights of the composite regression objective.

    Attributes:
        gamma: Share of MSE in the base loss; the rest goes to the CCC loss
        beta: Share of the triplet regularizer in the total loss
        lambda_v: Valence weight of the combined CCC
        lambda_a: Arousal weight of the combined CCC
        margin: Triplet hinge margin
        pos_radius: Max VA distance of a positive, normalized scale
        neg_radius: Distance a negative must exceed, normalized scale
    """
    gamma: float = 0.3
    beta: float = 0.05
    lambda_v: float = 0.3
    lambda_a: float = 0.7
    margin: float = 0.2
    pos_radius: float = 0.1
    neg_radius: float = 0.4

    def validate(self) -> None:
        for name in ("gamma", "beta"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.lambda_v < 0 or self.lambda_a < 0:
            raise ConfigError("CCC weights must be non-negative")
        if self.margin <= 0 or self.pos_radius <= 0 or self.neg_radius <= 0:
            raise ConfigError("margin and sampling radii must be positive")
        if self.pos_radius >= self.neg_radius:
            raise ConfigError(
                f"pos_radius ({self.pos_radius}) must be below neg_radius ({self.neg_radius})"
            )


@dataclass
class TrainConfig(_DictConfig):
    """
    Optimization settings for the aspect regressor.

    Defaults follow the published DimASR setup.
    """
    learning_rate: float = 2e-5
    batch_size: int = 16
    dropout: float = 0.3
    warmup_ratio: float = 0.1
    plateau_factor: float = 0.5
    plateau_patience: int = 2
    early_stop_patience: int = 5
    max_epochs: int = 30
    max_seq_len: int = 128
    weight_decay: float = 0.01
    seed: int = 42

    def validate(self) -> None:
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.batch_size < 2:
            raise ConfigError("batch_size must be at least 2 for the CCC loss")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must lie in [0, 1)")
        if not 0.0 <= self.warmup_ratio <= 1.0:
            raise ConfigError("warmup_ratio must lie in [0, 1]")
        if not 0.0 < self.plateau_factor <= 1.0:
            raise ConfigError("plateau_factor must lie in (0, 1]")
        if self.plateau_patience < 1 or self.early_stop_patience < 1:
            raise ConfigError("patience values must be at least 1")
        if self.max_epochs < 0:
            raise ConfigError("max_epochs must be non-negative")
        if self.max_seq_len < 1:
            raise ConfigError("max_seq_len must be positive")
