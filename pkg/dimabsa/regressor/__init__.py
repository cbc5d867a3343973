"""Aspect-conditioned valence-arousal regression."""

from dimabsa.regressor.config import LossConfig, TrainConfig
from dimabsa.regressor.encoder import (
    DEFAULT_BACKBONES,
    Encoder,
    EncoderOutput,
    PretrainedEncoder,
    ToyEncoder,
    create_encoder,
)
from dimabsa.regressor.heads import (
    AspectVARegressor,
    RegressionHeads,
    attention_pool,
    build_input,
    predict_va,
)
from dimabsa.regressor.losses import (
    ccc_loss,
    mse_loss,
    sample_triplets,
    total_loss,
    triplet_loss,
)
from dimabsa.regressor.schedule import WarmupPlateauScheduler, lr_schedule
from dimabsa.regressor.trainer import EpochRecord, TrainResult, predict, train

__all__ = [
    "DEFAULT_BACKBONES",
    "AspectVARegressor",
    "Encoder",
    "EncoderOutput",
    "EpochRecord",
    "LossConfig",
    "PretrainedEncoder",
    "RegressionHeads",
    "ToyEncoder",
    "TrainConfig",
    "TrainResult",
    "WarmupPlateauScheduler",
    "attention_pool",
    "build_input",
    "ccc_loss",
    "create_encoder",
    "lr_schedule",
    "mse_loss",
    "predict",
    "predict_va",
    "sample_triplets",
    "total_loss",
    "train",
    "triplet_loss",
]
