"""
Learning-rate schedule: linear warmup per mini-batch, then reduce-on-plateau
per validation epoch.
"""

import logging
import math
from typing import List, Sequence

from torch.optim.optimizer import Optimizer

from dimabsa.regressor.config import TrainConfig

logger = logging.getLogger(__name__)


def warmup_steps(total_steps: int, warmup_ratio: float) -> int:
    """Number of warmup steps: ``ceil(warmup_ratio * total_steps)``."""
    return int(math.ceil(warmup_ratio * total_steps))


def warmup_multiplier(step: int, total_steps: int, warmup_ratio: float) -> float:
    """Linear ramp reaching 1 at the last warmup step; ``step`` counts from 1."""
    n_warmup = warmup_steps(total_steps, warmup_ratio)
    if n_warmup == 0:
        return 1.0
    return min(1.0, max(0, step) / n_warmup)


def plateau_multiplier(history: Sequence[float], factor: float, patience: int) -> float:
    """
    Product of plateau reductions implied by a validation metric history.

    An epoch improves only if its metric is strictly below the best so far.
    After ``patience`` consecutive non-improving epochs the multiplier is
    scaled by ``factor`` and the counter restarts.
    """
    best = math.inf
    bad_epochs = 0
    multiplier = 1.0
    for value in history:
        if value < best:
            best = value
            bad_epochs = 0
            continue
        bad_epochs += 1
        if bad_epochs >= patience:
            multiplier *= factor
            bad_epochs = 0
    return multiplier


def lr_schedule(
    step: int,
    epoch_metric_history: Sequence[float],
    cfg: TrainConfig,
    total_steps: int,
) -> float:
    """
    Learning-rate multiplier at an optimizer step.

    Args:
        step: 1-based mini-batch step
        epoch_metric_history: Validation RMSE_VA of the finished epochs
        cfg: Supplies warmup ratio, plateau factor and patience
        total_steps: Number of optimizer steps of the whole run

    Returns:
        Warmup ramp times the plateau reductions so far
    """
    ramp = warmup_multiplier(step, total_steps, cfg.warmup_ratio)
    return ramp * plateau_multiplier(epoch_metric_history, cfg.plateau_factor, cfg.plateau_patience)


class WarmupPlateauScheduler:
    """
    Applies :func:`lr_schedule` to an optimizer.

    Example:
        >>> scheduler = WarmupPlateauScheduler(optimizer, total_steps, cfg)
        >>> for epoch in range(cfg.max_epochs):
        >>>     for batch in batches:
        >>>         scheduler.batch_step()
        >>>         ...
        >>>         optimizer.step()
        >>>     scheduler.epoch_step(val_rmse_va)
    """

    def __init__(self, optimizer: Optimizer, total_steps: int, cfg: TrainConfig) -> None:
        self.optimizer = optimizer
        self.total_steps = total_steps
        self.cfg = cfg
        self.base_lrs = [group["lr"] for group in optimizer.param_groups]
        self.step_count = 0
        self.history: List[float] = []
        self._apply()

    @property
    def multiplier(self) -> float:
        """Current learning-rate multiplier."""
        return lr_schedule(self.step_count, self.history, self.cfg, self.total_steps)

    def batch_step(self) -> None:
        """Advance one mini-batch; call before ``optimizer.step()``."""
        self.step_count += 1
        self._apply()

    def epoch_step(self, metric: float) -> None:
        """Record a validation metric at the end of an epoch."""
        factor, patience = self.cfg.plateau_factor, self.cfg.plateau_patience
        before = plateau_multiplier(self.history, factor, patience)
        self.history.append(metric)
        after = plateau_multiplier(self.history, factor, patience)
        if after < before:
            logger.info(f"Validation plateau: learning-rate multiplier reduced to {after:g}")
        self._apply()

    def _apply(self) -> None:
        multiplier = self.multiplier
        for group, base_lr in zip(self.optimizer.param_groups, self.base_lrs):
            group["lr"] = base_lr * multiplier
