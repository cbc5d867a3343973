"""
Test suite for the learning-rate schedule.
"""

import random

import pytest
import torch

from dimabsa.regressor.config import TrainConfig
from dimabsa.regressor.schedule import (
    WarmupPlateauScheduler,
    lr_schedule,
    plateau_multiplier,
    warmup_multiplier,
    warmup_steps,
)


def test_warmup_ramp():
    """Test the linear ramp and its end."""
    assert warmup_steps(100, 0.1) == 10
    assert warmup_steps(95, 0.1) == 10
    assert warmup_multiplier(1, 100, 0.1) == pytest.approx(0.1)
    assert warmup_multiplier(5, 100, 0.1) == pytest.approx(0.5)
    assert warmup_multiplier(10, 100, 0.1) == 1.0
    assert warmup_multiplier(50, 100, 0.1) == 1.0


def test_no_warmup():
    """Test that a zero ratio starts at the full rate."""
    assert warmup_multiplier(1, 100, 0.0) == 1.0


def test_plateau_trace():
    """Test the multiplier after improve, stall, stall, improve."""
    history = [0.9, 0.95, 0.91, 0.8]
    multipliers = [plateau_multiplier(history[: i + 1], 0.5, 2) for i in range(len(history))]
    assert multipliers == [1.0, 1.0, 0.5, 0.5]


def test_plateau_equal_value_is_not_improvement():
    """Test that matching the best value counts as a stall."""
    assert plateau_multiplier([0.5, 0.5, 0.5], 0.5, 2) == 0.5


def test_plateau_repeated_reductions():
    """Test that the counter restarts after each reduction."""
    history = [1.0, 1.1, 1.2, 1.3, 1.4]
    assert plateau_multiplier(history, 0.5, 2) == 0.25


def test_lr_schedule_combines_both():
    """Test that warmup and plateau factors multiply."""
    cfg = TrainConfig(warmup_ratio=0.1, plateau_factor=0.5, plateau_patience=2)
    assert lr_schedule(5, [0.9, 0.95, 0.91], cfg, 100) == pytest.approx(0.25)


def test_lr_never_rises_after_warmup():
    """Test that the rate only falls or stays once warmup is over."""
    rng = random.Random(3)
    for _ in range(200):
        cfg = TrainConfig(
            warmup_ratio=rng.choice([0.0, 0.1, 0.3]),
            plateau_factor=rng.choice([0.1, 0.5, 0.9]),
            plateau_patience=rng.randint(1, 3),
        )
        steps_per_epoch, epochs = rng.randint(1, 6), rng.randint(1, 10)
        total_steps = steps_per_epoch * epochs
        n_warmup = warmup_steps(total_steps, cfg.warmup_ratio)
        history = []
        rates = []
        for step in range(1, total_steps + 1):
            rates.append((step, lr_schedule(step, history, cfg, total_steps)))
            if step % steps_per_epoch == 0:
                history.append(rng.uniform(0.1, 1.0))
        after = [rate for step, rate in rates if step >= n_warmup]
        assert all(b <= a for a, b in zip(after, after[1:]))
        assert all(0.0 < rate <= 1.0 for _, rate in rates)


def test_scheduler_sets_optimizer_rate():
    """Test that the scheduler writes the rate into the optimizer."""
    cfg = TrainConfig(learning_rate=1e-3, warmup_ratio=0.5, plateau_patience=1)
    param = torch.nn.Parameter(torch.zeros(1))
    optimizer = torch.optim.SGD([param], lr=cfg.learning_rate)
    scheduler = WarmupPlateauScheduler(optimizer, total_steps=4, cfg=cfg)

    scheduler.batch_step()
    assert optimizer.param_groups[0]["lr"] == pytest.approx(5e-4)
    scheduler.batch_step()
    assert optimizer.param_groups[0]["lr"] == pytest.approx(1e-3)

    scheduler.epoch_step(0.8)
    scheduler.epoch_step(0.9)
    assert scheduler.multiplier == pytest.approx(0.5)
    assert optimizer.param_groups[0]["lr"] == pytest.approx(5e-4)
