"""Regressor commands: training and DimASR prediction."""

from dataclasses import replace
from pathlib import Path
from typing import Optional

import typer

from dimabsa.cli.common import (
    config_option,
    fail,
    finish,
    lang_option,
    out_option,
    resolve,
    seed_option,
    write_output,
)
from dimabsa.core.config import RunConfig
from dimabsa.errors import DimABSAError
from dimabsa.regressor.encoder import Encoder

app = typer.Typer()

CHECKPOINT_NAME = "model.pt"
HISTORY_NAME = "history.csv"
PREDICTIONS_NAME = "predictions.jsonl"


def build_encoder(cfg: RunConfig) -> Encoder:
    """Create the encoder a run config names."""
    from dimabsa.regressor.encoder import DEFAULT_BACKBONES, create_encoder
    from dimabsa.utils.helpers import seed_everything

    # encoder weights are drawn before training seeds the heads
    seed_everything(cfg.require_seed())
    max_seq_len = cfg.train.max_seq_len
    if cfg.encoder == "hf":
        backbone = cfg.backbone or DEFAULT_BACKBONES[cfg.language]
        return create_encoder("hf", model_name=backbone, max_seq_len=max_seq_len)
    return create_encoder(cfg.encoder, hidden_size=cfg.hidden_size, max_seq_len=max_seq_len)


@app.command("train")
def train_model(
    train_path: Optional[Path] = typer.Option(None, "--train", help="DimASR training file"),
    dev_path: Optional[Path] = typer.Option(None, "--dev", help="DimASR validation file"),
    lang: Optional[str] = lang_option(),
    config: Optional[Path] = config_option(),
    seed: Optional[int] = seed_option(),
    out: Optional[Path] = out_option(),
    encoder: Optional[str] = typer.Option(None, "--encoder", help="Encoder: toy or hf"),
    backbone: Optional[str] = typer.Option(None, "--backbone", help="Pretrained model id"),
    epochs: Optional[int] = typer.Option(None, "--epochs", help="Maximum epochs"),
    learning_rate: Optional[float] = typer.Option(None, "--lr", help="Peak learning rate"),
    batch_size: Optional[int] = typer.Option(None, "--batch-size", help="Mini-batch size"),
) -> None:
    """Train an aspect VA regressor and save checkpoint and history."""
    from dimabsa.core.dataio import flatten_asr, read_split
    from dimabsa.models.record import Split
    from dimabsa.regressor.checkpoint import save_checkpoint
    from dimabsa.regressor.trainer import history_to_csv, mean_baseline_rmse, train
    from dimabsa.utils.formatter import format_history

    try:
        cfg = resolve(
            config,
            "asr",
            lang,
            train_path=train_path,
            dev_path=dev_path,
            seed=seed,
            output_dir=out,
            encoder=encoder,
            backbone=backbone,
        )
        train_overrides = {
            "max_epochs": epochs,
            "learning_rate": learning_rate,
            "batch_size": batch_size,
        }
        applied = {k: v for k, v in train_overrides.items() if v is not None}
        train_cfg = replace(cfg.train, **applied)
        cfg = cfg.with_overrides(train=train_cfg)
        cfg.require_paths("train_path", "dev_path")
        cfg.require_seed()

        assert cfg.train_path is not None and cfg.dev_path is not None
        train_split = read_split(cfg.train_path, cfg.subtask, strict=True)
        dev_split = read_split(cfg.dev_path, cfg.subtask, split=Split.DEV, strict=True)
        train_rows, dev_rows = flatten_asr(train_split), flatten_asr(dev_split)
        result = train(train_rows, dev_rows, build_encoder(cfg), cfg.train_config, cfg.loss)
        baseline = mean_baseline_rmse(train_rows, dev_rows)

        checkpoint = cfg.output_dir / CHECKPOINT_NAME
        extra = {"best_epoch": result.best_epoch, "best_val_rmse_va": result.best_val_rmse_va}
        save_checkpoint(checkpoint, result.model, cfg.train_config, cfg.loss, extra)
        history = write_output(
            cfg.output_dir / HISTORY_NAME, history_to_csv(result.history).encode("utf-8")
        )
    except (DimABSAError, OSError) as e:
        fail(e)

    typer.echo(format_history(result.history, result.best_epoch))
    if result.best_val_rmse_va is not None:
        typer.echo(
            f"Best validation RMSE_VA {result.best_val_rmse_va:.4f} at epoch {result.best_epoch} "
            f"(mean baseline {baseline:.4f})"
        )
    typer.secho("✓ Training finished", fg=typer.colors.GREEN)
    finish(cfg, "model train", [checkpoint, history], {"mean_baseline_rmse_va": baseline})


@app.command("predict")
def predict_file(
    checkpoint: Path = typer.Option(..., "--checkpoint", help="Model archive from model train"),
    test_path: Optional[Path] = typer.Option(None, "--test", help="DimASR input file"),
    config: Optional[Path] = config_option(),
    out: Optional[Path] = out_option(),
) -> None:
    """Predict VA for every aspect of a DimASR input file."""
    from dimabsa.core.dataio import (
        PredictionRow,
        group_predictions,
        read_asr_queries,
        write_submission,
    )
    from dimabsa.models.record import Subtask
    from dimabsa.regressor.checkpoint import load_checkpoint
    from dimabsa.regressor.trainer import predict

    try:
        cfg = resolve(config, "asr", test_path=test_path, output_dir=out)
        cfg.require_paths("test_path")
        assert cfg.test_path is not None
        queries = read_asr_queries(cfg.test_path.read_bytes())
        loaded = load_checkpoint(checkpoint)
        vas = predict(loaded.model, queries)
        rows = [
            PredictionRow(q.review_id, q.aspect, va, q.occurrence) for q, va in zip(queries, vas)
        ]
        entries = group_predictions(rows, queries)
        path = write_output(
            cfg.output_dir / PREDICTIONS_NAME, write_submission(entries, Subtask.ASR)
        )
    except (DimABSAError, OSError) as e:
        fail(e)

    typer.secho(
        f"✓ Predicted {len(rows)} aspects in {len(entries)} reviews", fg=typer.colors.GREEN
    )
    finish(cfg, "model predict", [path], {"checkpoint": checkpoint}, seeded=False)
