"""
Test suite for training, prediction and model archives.
"""

import pytest
import torch

from dimabsa.core.dataio import flatten_asr
from dimabsa.errors import CheckpointError, DatasetValidationError, EncoderUnavailableError
from dimabsa.models.record import Split
from dimabsa.regressor.checkpoint import load_checkpoint, save_checkpoint
from dimabsa.regressor.config import LossConfig, TrainConfig
from dimabsa.regressor.encoder import ToyEncoder, create_encoder
from dimabsa.regressor.trainer import (
    history_to_csv,
    make_batches,
    mean_baseline_rmse,
    predict,
    train,
)
from dimabsa.utils.synthetic import cue_va, make_synthetic_split


@pytest.fixture(scope="module")
def synthetic_rows():
    train_rows = flatten_asr(make_synthetic_split(400, seed=1))
    dev_rows = flatten_asr(make_synthetic_split(100, seed=2, split=Split.DEV))
    return train_rows, dev_rows


def small_config(**overrides):
    values = {"learning_rate": 5e-3, "batch_size": 16, "dropout": 0.0, "max_epochs": 30, "seed": 7}
    values.update(overrides)
    return TrainConfig(**values)


def test_synthetic_split_is_deterministic():
    """Test that equal seeds give equal synthetic data."""
    a = make_synthetic_split(20, seed=5)
    b = make_synthetic_split(20, seed=5)
    assert [r.review.text for r in a] == [r.review.text for r in b]
    assert a.ids[0] == "syn_train_0000"


def test_cue_intensifier():
    """Test that the intensifier moves valence away from neutral."""
    assert cue_va("pleasant", True).as_tuple() == (7.5, 4.5)
    assert cue_va("boring", True).as_tuple() == (3.0, 3.0)
    assert cue_va("thrilling", True).as_tuple() == (9.0, 9.0)


def test_make_batches_merges_singleton():
    """Test that no batch of one is produced."""
    batches = make_batches(17, 8, torch.Generator().manual_seed(0))
    assert [len(b) for b in batches] == [8, 9]
    assert sorted(i for b in batches for i in b) == list(range(17))


def test_training_beats_mean_baseline(synthetic_rows):
    """Test that training learns the planted cues."""
    train_rows, dev_rows = synthetic_rows
    torch.manual_seed(0)
    result = train(train_rows, dev_rows, ToyEncoder(hidden_size=32), small_config(), LossConfig())

    baseline = mean_baseline_rmse(train_rows, dev_rows)
    assert result.best_val_rmse_va <= 0.8 * baseline
    assert result.best_epoch >= 1
    assert len(result.history) >= result.best_epoch


def test_training_is_deterministic(synthetic_rows):
    """Test that a fixed seed reproduces the history."""
    train_rows, dev_rows = synthetic_rows
    cfg = small_config(max_epochs=2)

    def run():
        torch.manual_seed(0)
        encoder = ToyEncoder(hidden_size=16)
        return train(train_rows[:64], dev_rows[:32], encoder, cfg, LossConfig())

    first, second = run(), run()
    assert [r.val_rmse_va for r in first.history] == [r.val_rmse_va for r in second.history]


def test_zero_epochs_returns_initial_model(synthetic_rows):
    """Test that a run without epochs has an empty history."""
    train_rows, dev_rows = synthetic_rows
    result = train(
        train_rows[:8], dev_rows[:4], ToyEncoder(hidden_size=8), small_config(max_epochs=0),
        LossConfig(),
    )
    assert result.history == []
    assert result.best_epoch == 0
    assert result.best_val_rmse_va is None
    assert history_to_csv(result.history) == "epoch,train_loss,val_rmse_va,lr_multiplier\n"


def test_training_rejects_empty_split(synthetic_rows):
    """Test that empty inputs are refused."""
    train_rows, _ = synthetic_rows
    with pytest.raises(DatasetValidationError):
        train(train_rows, [], ToyEncoder(), small_config(), LossConfig())


def test_training_needs_two_rows(synthetic_rows):
    """Test that a single training row is refused and two rows train."""
    train_rows, dev_rows = synthetic_rows
    with pytest.raises(DatasetValidationError, match="at least 2 training rows"):
        train(train_rows[:1], dev_rows[:4], ToyEncoder(hidden_size=8), small_config(), LossConfig())
    result = train(
        train_rows[:2], dev_rows[:4], ToyEncoder(hidden_size=8), small_config(max_epochs=2),
        LossConfig(),
    )
    assert len(result.history) == 2


def test_predictions_stay_on_scale(synthetic_rows):
    """Test that predictions are clipped into the label scale."""
    train_rows, dev_rows = synthetic_rows
    result = train(
        train_rows[:32], dev_rows[:16], ToyEncoder(hidden_size=8), small_config(max_epochs=1),
        LossConfig(),
    )
    for va in predict(result.model, dev_rows[:16]):
        assert 1.0 <= va.valence <= 9.0 and 1.0 <= va.arousal <= 9.0


def test_history_csv_rows(synthetic_rows):
    """Test the history file layout."""
    train_rows, dev_rows = synthetic_rows
    result = train(
        train_rows[:32], dev_rows[:16], ToyEncoder(hidden_size=8), small_config(max_epochs=2),
        LossConfig(),
    )
    lines = history_to_csv(result.history).splitlines()
    assert lines[0] == "epoch,train_loss,val_rmse_va,lr_multiplier"
    assert [line.split(",")[0] for line in lines[1:]] == ["1", "2"]


def test_checkpoint_round_trip(synthetic_rows, tmp_path):
    """Test that a restored model predicts exactly like the saved one."""
    train_rows, dev_rows = synthetic_rows
    cfg = small_config(max_epochs=1)
    result = train(train_rows[:32], dev_rows[:16], ToyEncoder(hidden_size=8), cfg, LossConfig())
    path = tmp_path / "model.pt"

    save_checkpoint(path, result.model, cfg, LossConfig(), {"best_epoch": result.best_epoch})
    loaded = load_checkpoint(path)

    assert loaded.train_config == cfg
    assert loaded.metadata["extra"] == {"best_epoch": result.best_epoch}
    assert predict(loaded.model, dev_rows[:16]) == predict(result.model, dev_rows[:16])


def test_checkpoint_errors(tmp_path):
    """Test unreadable and foreign archives."""
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "missing.pt")
    foreign = tmp_path / "foreign.pt"
    torch.save({"format_version": 99}, foreign)
    with pytest.raises(CheckpointError):
        load_checkpoint(foreign)


def test_unknown_encoder():
    """Test the encoder registry error."""
    with pytest.raises(EncoderUnavailableError):
        create_encoder("lstm")
