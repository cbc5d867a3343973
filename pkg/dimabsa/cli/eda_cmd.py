"""Exploratory data analysis commands."""

import json
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import typer

from dimabsa.cli.common import (
    config_option,
    fail,
    finish,
    out_option,
    resolve,
    subtask_option,
    write_output,
)
from dimabsa.errors import DimABSAError

app = typer.Typer()

REPORT_NAME = "eda.json"
HEATMAP_NAME = "psi_heatmap.png"


@app.command("report")
def eda_report(
    train_path: Optional[Path] = typer.Option(None, "--train", help="Reference split"),
    dev_path: Optional[Path] = typer.Option(None, "--dev", help="Validation split"),
    test_path: Optional[Path] = typer.Option(None, "--test", help="Test split"),
    subtask: Optional[str] = subtask_option(),
    config: Optional[Path] = config_option(),
    out: Optional[Path] = out_option(),
    bins: int = typer.Option(10, "--bins", help="Quantile bins for continuous features"),
    plot: bool = typer.Option(False, "--plot", help="Also draw the PSI heatmap (needs matplotlib)"),
) -> None:
    """Split statistics, NULL analysis and PSI drift against Train."""
    from rich.console import Console

    from dimabsa.core.dataio import read_split
    from dimabsa.core.eda import null_analysis, plot_psi_heatmap, psi_matrix, split_stats
    from dimabsa.models.record import Split, Subtask
    from dimabsa.utils.formatter import format_split_summary, psi_table

    try:
        cfg = resolve(
            config,
            subtask,
            train_path=train_path,
            dev_path=dev_path,
            test_path=test_path,
            output_dir=out,
        )
        cfg.require_paths("train_path")
        sources = {Split.TRAIN: cfg.train_path, Split.DEV: cfg.dev_path, Split.TEST: cfg.test_path}
        splits = {}
        for name, path in sources.items():
            if path is None:
                continue
            cfg.require_paths(f"{name.value.lower()}_path")
            splits[name] = read_split(path, cfg.subtask, split=name, strict=True)

        summaries = []
        for split in splits.values():
            stats = split_stats(split)
            nulls = null_analysis(split) if cfg.subtask is not Subtask.ASR else None
            summaries.append((stats, nulls))
        reports = psi_matrix(splits, n_bins=bins) if len(splits) > 1 else []

        document = {
            "splits": [
                {**stats.to_dict(), "nulls": None if nulls is None else asdict(nulls)}
                for stats, nulls in summaries
            ],
            "psi": [r.to_dict() for r in reports],
        }
        outputs = [
            write_output(
                cfg.output_dir / REPORT_NAME,
                (json.dumps(document, indent=2, ensure_ascii=False) + "\n").encode("utf-8"),
            )
        ]
        if plot and reports:
            outputs.append(plot_psi_heatmap(reports, cfg.output_dir / HEATMAP_NAME))
    except (DimABSAError, OSError) as e:
        fail(e)

    for stats, nulls in summaries:
        typer.echo(format_split_summary(stats, nulls))
    if reports:
        Console().print(psi_table(reports))
    else:
        typer.echo("Only one split given; no PSI computed")
    finish(cfg, "eda report", outputs, {"bins": bins, "plot": plot}, seeded=False)
