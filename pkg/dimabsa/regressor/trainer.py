"""
Training and inference loops for the aspect VA regressor.
"""

import copy
import csv
import io
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
import torch

from dimabsa.core.metrics import rmse_va
from dimabsa.errors import DatasetValidationError, TrainingDivergedError
from dimabsa.models.record import RegressionExample
from dimabsa.models.va_pair import NormalizedVA, VAPair, denormalize_clip
from dimabsa.regressor.config import LossConfig, TrainConfig
from dimabsa.regressor.encoder import Encoder
from dimabsa.regressor.heads import DEFAULT_NULL_SURFACE, DEFAULT_TEMPLATE, AspectVARegressor
from dimabsa.regressor.losses import total_loss
from dimabsa.regressor.schedule import WarmupPlateauScheduler
from dimabsa.utils.helpers import seed_everything

logger = logging.getLogger(__name__)

HISTORY_FIELDS = ("epoch", "train_loss", "val_rmse_va", "lr_multiplier")


@dataclass(frozen=True)
class EpochRecord:
    """One row of the training history."""
    epoch: int
    train_loss: float
    val_rmse_va: float
    lr_multiplier: float


@dataclass
class TrainResult:
    """
    Outcome of a training run.

    Attributes:
        model: Regressor holding the best-on-validation parameters
        history: Per-epoch rows, empty when no epoch ran
        best_epoch: Epoch of the returned parameters, 0 for the initial ones
        best_val_rmse_va: Validation RMSE_VA of the returned parameters
    """
    model: AspectVARegressor
    history: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_val_rmse_va: Optional[float] = None


def make_batches(n_items: int, batch_size: int, generator: torch.Generator) -> List[List[int]]:
    """
    Shuffle ``range(n_items)`` and cut it into batches.

    A trailing batch of one item is merged into the previous batch since the
    CCC term needs at least two instances.
    """
    order = torch.randperm(n_items, generator=generator).tolist()
    batches = [order[i : i + batch_size] for i in range(0, n_items, batch_size)]
    if len(batches) > 1 and len(batches[-1]) == 1:
        batches[-2].extend(batches.pop())
    return batches


def _targets_tensor(rows: Sequence[RegressionExample], dtype: torch.dtype) -> torch.Tensor:
    targets = []
    for row in rows:
        if row.target is None:
            raise DatasetValidationError(f"row {row.key} has no gold VA")
        targets.append(row.target.as_tuple())
    return torch.tensor(targets, dtype=dtype)


def _param_dtype(model: torch.nn.Module) -> torch.dtype:
    return next(model.parameters()).dtype


@torch.no_grad()
def predict_normalized(
    model: AspectVARegressor, examples: Sequence[RegressionExample], batch_size: int = 64
) -> List[NormalizedVA]:
    """Raw head outputs on the normalized scale, in example order."""
    model.eval()
    outputs: List[NormalizedVA] = []
    for start in range(0, len(examples), batch_size):
        chunk = examples[start : start + batch_size]
        input_ids, mask = model.inputs([e.aspect for e in chunk], [e.review_text for e in chunk])
        preds, _ = model(input_ids, mask)
        outputs.extend(NormalizedVA(float(v), float(a)) for v, a in preds.double().tolist())
    return outputs


def predict(
    model: AspectVARegressor, examples: Sequence[RegressionExample], batch_size: int = 64
) -> List[VAPair]:
    """Predict VA pairs on the [1, 9] scale, rescaled and clipped."""
    return [denormalize_clip(nv) for nv in predict_normalized(model, examples, batch_size)]


def validation_rmse(model: AspectVARegressor, examples: Sequence[RegressionExample]) -> float:
    """RMSE_VA of the model on labeled rows, in label space."""
    golds = [denormalize_clip(e.target) for e in examples if e.target is not None]
    if len(golds) != len(examples):
        raise DatasetValidationError("validation rows need gold VA")
    return rmse_va(predict(model, examples), golds)


def mean_baseline_rmse(
    train_data: Sequence[RegressionExample], val_data: Sequence[RegressionExample]
) -> float:
    """RMSE_VA of always predicting the training-set mean VA."""
    train_targets = np.array([e.target.as_tuple() for e in train_data if e.target is not None])
    mean = denormalize_clip(tuple(train_targets.mean(axis=0)))
    golds = [denormalize_clip(e.target) for e in val_data if e.target is not None]
    return rmse_va([mean] * len(golds), golds)


def train(
    train_data: Sequence[RegressionExample],
    val_data: Sequence[RegressionExample],
    encoder: Encoder,
    cfg: TrainConfig,
    loss_cfg: LossConfig,
    template: str = DEFAULT_TEMPLATE,
    null_surface: str = DEFAULT_NULL_SURFACE,
    on_epoch: Optional[Callable[[EpochRecord], None]] = None,
) -> TrainResult:
    """
    Fine-tune an aspect regressor on top of ``encoder``.

    Uses AdamW with warmup and reduce-on-plateau, keeps the parameters with
    the lowest validation RMSE_VA and stops after ``early_stop_patience``
    epochs without improvement. Runs are deterministic for a given seed.

    Args:
        train_data: Labeled flattened training rows
        val_data: Labeled flattened validation rows
        encoder: Encoder to fine-tune along with the heads
        cfg: Optimization settings
        loss_cfg: Objective weights
        template: Input template
        null_surface: Rendering of NULL aspects
        on_epoch: Called with each finished epoch's history row

    Returns:
        TrainResult with the best model and the history

    Raises:
        DatasetValidationError: If a split is empty or unlabeled, or the training
            split has fewer than two rows
        TrainingDivergedError: If the loss becomes non-finite
    """
    if not train_data or not val_data:
        raise DatasetValidationError("training needs nonempty train and validation sets")
    if len(train_data) < 2:
        raise DatasetValidationError(
            f"training needs at least 2 training rows for the CCC loss, got {len(train_data)}"
        )
    cfg.validate()
    loss_cfg.validate()
    seed_everything(cfg.seed)

    model = AspectVARegressor(encoder, cfg.dropout, template, null_surface)
    dtype = _param_dtype(model)
    generator = torch.Generator().manual_seed(cfg.seed)
    batches_per_epoch = len(make_batches(len(train_data), cfg.batch_size, torch.Generator()))
    total_steps = batches_per_epoch * cfg.max_epochs

    optimizer = torch.optim.AdamW(
        model.parameters(), lr=cfg.learning_rate, weight_decay=cfg.weight_decay
    )
    scheduler = WarmupPlateauScheduler(optimizer, total_steps, cfg)
    result = TrainResult(model=model)
    best_state = copy.deepcopy(model.state_dict())
    best_rmse = math.inf
    stale_epochs = 0

    logger.info(
        f"Training on {len(train_data)} rows, validating on {len(val_data)}, "
        f"{batches_per_epoch} batches per epoch for up to {cfg.max_epochs} epochs"
    )
    for epoch in range(1, cfg.max_epochs + 1):
        model.train()
        losses = []
        for batch in make_batches(len(train_data), cfg.batch_size, generator):
            rows = [train_data[i] for i in batch]
            scheduler.batch_step()
            input_ids, mask = model.inputs([r.aspect for r in rows], [r.review_text for r in rows])
            preds, z = model(input_ids, mask)
            targets = _targets_tensor(rows, dtype)
            loss = total_loss(preds, targets, z, loss_cfg, seed=cfg.seed + scheduler.step_count)
            if not torch.isfinite(loss.total):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, step {scheduler.step_count} "
                    f"(mse={loss.mse}, ccc={loss.ccc}, triplet={loss.triplet})"
                )
            optimizer.zero_grad()
            loss.total.backward()
            optimizer.step()
            losses.append(float(loss.total.detach()))

        multiplier = scheduler.multiplier
        val_rmse = validation_rmse(model, val_data)
        scheduler.epoch_step(val_rmse)
        record = EpochRecord(epoch, float(np.mean(losses)), val_rmse, multiplier)
        result.history.append(record)
        logger.info(
            f"Epoch {epoch}: train_loss={record.train_loss:.4f} "
            f"val_RMSE_VA={val_rmse:.4f} lr_x={multiplier:.4f}"
        )
        if on_epoch is not None:
            on_epoch(record)

        if val_rmse < best_rmse:
            best_rmse = val_rmse
            best_state = copy.deepcopy(model.state_dict())
            result.best_epoch = epoch
            stale_epochs = 0
        else:
            stale_epochs += 1
            if stale_epochs >= cfg.early_stop_patience:
                logger.info(f"Early stopping after epoch {epoch}")
                break

    model.load_state_dict(best_state)
    model.eval()
    result.best_val_rmse_va = best_rmse if result.history else None
    return result


def history_to_csv(history: Sequence[EpochRecord]) -> str:
    """Serialize history rows as CSV with a header line."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=HISTORY_FIELDS, lineterminator="\n")
    writer.writeheader()
    for record in history:
        row = asdict(record)
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buffer.getvalue()
