"""Data commands: validation, flattening, scoring and synthetic data."""

import json
from pathlib import Path
from typing import Optional

import typer

from dimabsa.cli.common import (
    config_option,
    domain_option,
    fail,
    finish,
    lang_option,
    out_option,
    resolve,
    seed_option,
    subtask_option,
    write_output,
)
from dimabsa.errors import DimABSAError

app = typer.Typer()


@app.command("validate")
def validate_file(
    input_path: Path = typer.Argument(..., help="Data file to validate"),
    subtask: Optional[str] = subtask_option(),
    lang: Optional[str] = lang_option(),
    domain: Optional[str] = domain_option(),
    config: Optional[Path] = config_option(),
    unlabeled: bool = typer.Option(
        False, "--unlabeled", help="Accept DimASTE/DimASQP records without tuples"
    ),
) -> None:
    """Check a data file against the task format."""
    from dimabsa.core.dataio import read_split
    from dimabsa.utils.formatter import format_validation_report

    try:
        cfg = resolve(config, subtask, lang, domain)
        split = read_split(
            input_path,
            cfg.subtask,
            language=cfg.language,
            domain=cfg.domain,
            require_labels=not unlabeled,
        )
    except (DimABSAError, OSError) as e:
        fail(e)

    typer.echo(format_validation_report(split.report, len(split)))
    if split.report.has_errors:
        typer.secho(f"✗ {input_path} has invalid records", fg=typer.colors.RED, err=True)
        raise typer.Exit(1)
    typer.secho(f"✓ {len(split)} records valid", fg=typer.colors.GREEN)


@app.command("flatten")
def flatten_file(
    input_path: Path = typer.Argument(..., help="DimASR data file"),
    out: Optional[Path] = out_option(),
    config: Optional[Path] = config_option(),
) -> None:
    """Flatten DimASR reviews into one row per aspect."""
    from dimabsa.core.dataio import examples_to_jsonl, flatten_asr, read_split
    from dimabsa.models.record import Subtask

    try:
        cfg = resolve(config, "asr", output_dir=out)
        split = read_split(input_path, Subtask.ASR, strict=True)
        rows = flatten_asr(split)
        path = write_output(cfg.output_dir / "flattened.jsonl", examples_to_jsonl(rows))
    except (DimABSAError, OSError) as e:
        fail(e)

    typer.secho(f"✓ Flattened {len(split)} reviews into {len(rows)} rows", fg=typer.colors.GREEN)
    finish(cfg, "data flatten", [path], {"input": input_path}, seeded=False)


@app.command("eval")
def evaluate(
    pred_path: Path = typer.Argument(..., help="Prediction file"),
    gold_path: Path = typer.Argument(..., help="Gold file"),
    subtask: Optional[str] = subtask_option(),
    config: Optional[Path] = config_option(),
    out: Optional[Path] = typer.Option(
        None, "--out", "-o", help="Also write scores.json and a manifest here"
    ),
) -> None:
    """Score predictions: RMSE/PCC for DimASR, cP/cR/cF1 otherwise."""
    from dimabsa.core.dataio import read_split
    from dimabsa.core.metrics import evaluate_splits
    from dimabsa.errors import DatasetValidationError
    from dimabsa.models.record import Split
    from dimabsa.utils.formatter import format_score_report

    try:
        cfg = resolve(config, subtask, output_dir=out)
        gold = read_split(gold_path, cfg.subtask, split=Split.TEST)
        pred = read_split(pred_path, cfg.subtask, split=Split.TEST, require_labels=False)
        for name, loaded in (("gold", gold), ("prediction", pred)):
            if loaded.report.has_errors:
                first = loaded.report.errors[0]
                raise DatasetValidationError(f"invalid {name} file: {first}")
        report = evaluate_splits(pred, gold)
    except (DimABSAError, OSError) as e:
        fail(e)

    typer.echo(format_score_report(report))
    if out is not None:
        document = json.dumps(report.to_dict(), indent=2) + "\n"
        path = write_output(cfg.output_dir / "scores.json", document.encode("utf-8"))
        options = {"predictions": pred_path, "gold": gold_path}
        finish(cfg, "data eval", [path], options, seeded=False)


@app.command("synth")
def synthesize(
    out: Optional[Path] = out_option(),
    seed: Optional[int] = seed_option(),
    n_train: int = typer.Option(400, "--n-train", help="Training reviews"),
    n_dev: int = typer.Option(100, "--n-dev", help="Validation reviews"),
) -> None:
    """Write planted-cue synthetic DimASR train and dev files."""
    from dimabsa.core.dataio import write_split
    from dimabsa.models.record import Split
    from dimabsa.utils.synthetic import make_synthetic_split

    try:
        cfg = resolve(None, "asr", seed=seed, output_dir=out)
        seed_value = cfg.require_seed()
        train = make_synthetic_split(n_train, seed_value, Split.TRAIN)
        dev = make_synthetic_split(n_dev, seed_value + 1, Split.DEV)
        paths = [
            write_output(cfg.output_dir / "train.jsonl", write_split(train)),
            write_output(cfg.output_dir / "dev.jsonl", write_split(dev)),
        ]
    except (DimABSAError, OSError) as e:
        fail(e)

    typer.secho(f"✓ Wrote {n_train} train and {n_dev} dev reviews", fg=typer.colors.GREEN)
    finish(cfg, "data synth", paths, {"n_train": n_train, "n_dev": n_dev})
