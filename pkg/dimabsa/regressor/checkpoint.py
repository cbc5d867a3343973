"""
Self-describing model archives.

An archive stores the encoder description (including the hash vocabulary
spec of the toy encoder), the input template, both configurations, named
parameter shapes and the parameter tensors.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import torch

from dimabsa import __version__
from dimabsa.errors import CheckpointError, DimABSAError
from dimabsa.regressor.config import LossConfig, TrainConfig
from dimabsa.regressor.encoder import encoder_from_description
from dimabsa.regressor.heads import AspectVARegressor

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass
class LoadedModel:
    """A restored regressor with the configuration it was trained with."""
    model: AspectVARegressor
    train_config: TrainConfig
    loss_config: LossConfig
    metadata: Dict[str, Any]


def save_checkpoint(
    path: Path,
    model: AspectVARegressor,
    train_config: TrainConfig,
    loss_config: LossConfig,
    extra: Optional[Dict[str, Any]] = None,
) -> None:
    """
    Write a model archive.

    Raises:
        CheckpointError: If the file cannot be written
    """
    state = {name: tensor.detach().cpu() for name, tensor in model.state_dict().items()}
    archive = {
        "format_version": FORMAT_VERSION,
        "toolkit_version": __version__,
        "encoder": model.encoder.describe(),
        "template": model.template,
        "null_surface": model.null_surface,
        "train_config": train_config.to_dict(),
        "loss_config": loss_config.to_dict(),
        "shapes": {name: list(t.shape) for name, t in state.items()},
        "extra": extra or {},
        "state_dict": state,
    }
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        torch.save(archive, path)
    except OSError as e:
        raise CheckpointError(f"cannot write checkpoint {path}: {e}") from e
    logger.info(f"Saved checkpoint to {path}")


def load_checkpoint(path: Path) -> LoadedModel:
    """
    Restore a regressor from an archive written by :func:`save_checkpoint`.

    Raises:
        CheckpointError: If the file is missing, unreadable or inconsistent
    """
    try:
        archive = torch.load(path, map_location="cpu", weights_only=True)
    except (OSError, RuntimeError, ValueError) as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    if not isinstance(archive, dict) or archive.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"{path} is not a version {FORMAT_VERSION} model archive")

    try:
        train_config = TrainConfig.from_dict(archive["train_config"])
        loss_config = LossConfig.from_dict(archive["loss_config"])
        encoder = encoder_from_description(archive["encoder"])
        model = AspectVARegressor(
            encoder, train_config.dropout, archive["template"], archive["null_surface"]
        )
        shapes = {name: list(t.shape) for name, t in model.state_dict().items()}
        if shapes != archive["shapes"]:
            raise CheckpointError(f"parameter shapes in {path} do not match the encoder")
        model.load_state_dict(archive["state_dict"])
    except KeyError as e:
        raise CheckpointError(f"checkpoint {path} lacks field {e}") from e
    except CheckpointError:
        raise
    except DimABSAError as e:
        raise CheckpointError(f"cannot rebuild model from {path}: {e}") from e
    model.eval()
    metadata = {k: archive[k] for k in ("toolkit_version", "encoder", "extra") if k in archive}
    return LoadedModel(model, train_config, loss_config, metadata)
