"""Generation commands: prompt files, output parsing and adapter configs."""

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

PROMPTS_NAME = "prompts.jsonl"
SUBMISSION_NAME = "submission.jsonl"
REPAIRS_NAME = "repairs.jsonl"
ADAPTER_CONFIG_NAME = "adapter_config.json"


@app.command("prompts")
def make_prompts(
    test_path: Optional[Path] = typer.Option(None, "--test", help="Reviews to build prompts for"),
    train_path: Optional[Path] = typer.Option(
        None, "--train", help="Labeled split for demonstrations, categories and NULL policy"
    ),
    subtask: Optional[str] = subtask_option(),
    lang: Optional[str] = lang_option(),
    domain: Optional[str] = domain_option(),
    config: Optional[Path] = config_option(),
    seed: Optional[int] = seed_option(),
    out: Optional[Path] = out_option(),
    demos: Optional[int] = typer.Option(None, "--demos", "-k", help="Few-shot demonstrations"),
    profile: Optional[str] = typer.Option(None, "--profile", help="Chat template: llama or qwen"),
    registry_path: Optional[Path] = typer.Option(
        None, "--registry", help="Instruction registry JSON (default: packaged)"
    ),
    with_answers: bool = typer.Option(
        False, "--with-answers", help="Close each prompt with its gold answer (training prompts)"
    ),
) -> None:
    """Build one chat prompt per review of a DimASTE/DimASQP file."""
    from dimabsa.core.dataio import read_split
    from dimabsa.core.prompts import (
        InstructionRegistry,
        build_prompt,
        categories_from_split,
        default_profile,
        get_profile,
        make_prompt_spec,
        partition_has_nulls,
        prompts_to_jsonl,
        sample_demos,
    )
    from dimabsa.models.record import Split

    try:
        cfg = resolve(
            config,
            subtask,
            lang,
            domain,
            test_path=test_path,
            train_path=train_path,
            seed=seed,
            output_dir=out,
            demos=demos,
            profile=profile,
        )
        cfg.require_paths("test_path")
        assert cfg.test_path is not None
        target = read_split(
            cfg.test_path,
            cfg.subtask,
            split=Split.TEST,
            language=cfg.language,
            domain=cfg.domain,
            require_labels=with_answers,
            strict=True,
        )
        train = None
        if cfg.train_path is not None:
            cfg.require_paths("train_path")
            train = read_split(
                cfg.train_path, cfg.subtask, language=cfg.language, domain=cfg.domain, strict=True
            )
        n_demos = cfg.demos if train is not None else 0
        if train is None and cfg.demos:
            typer.secho(
                "No --train file given; building zero-shot prompts", fg=typer.colors.YELLOW
            )

        registry = InstructionRegistry.load(registry_path)
        demonstrations = (
            sample_demos(train, n_demos, cfg.require_seed())
            if train is not None and n_demos
            else []
        )
        categories = categories_from_split(train) if train is not None else None
        spec = make_prompt_spec(
            registry,
            cfg.language,
            cfg.domain,
            cfg.subtask,
            demonstrations,
            categories=categories or None,
            include_null_policy=train is not None and partition_has_nulls(train),
        )
        chat = get_profile(cfg.profile) if cfg.profile else default_profile(cfg.language)
        prompts = [
            (
                record.review.id,
                build_prompt(
                    spec, chat, record.review.text, record.tuples if with_answers else None
                ),
            )
            for record in target.records
        ]
        path = write_output(cfg.output_dir / PROMPTS_NAME, prompts_to_jsonl(prompts))
    except (DimABSAError, OSError) as e:
        fail(e)

    typer.secho(
        f"✓ Built {len(prompts)} {chat.family.value} prompts with {len(demonstrations)} "
        f"demonstrations (decode {chat.decoding})",
        fg=typer.colors.GREEN,
    )
    options = {
        "registry": registry_path,
        "with_answers": with_answers,
        "demonstration_ids": [d.review_id for d in demonstrations],
    }
    finish(cfg, "gen prompts", [path], options)


@app.command("parse")
def parse_outputs_file(
    outputs_path: Path = typer.Argument(..., help='Generations as {"ID", "Output"} lines'),
    subtask: Optional[str] = subtask_option(),
    config: Optional[Path] = config_option(),
    out: Optional[Path] = out_option(),
) -> None:
    """Parse model generations into a submission file."""
    from dimabsa.core.dataio import write_submission
    from dimabsa.core.generation import (
        parse_outputs,
        read_generation_outputs,
        repairs_to_jsonl,
        to_submission_entry,
    )
    from dimabsa.errors import ConfigError
    from dimabsa.models.record import Subtask
    from dimabsa.utils.formatter import format_parse_summary

    try:
        cfg = resolve(config, subtask, output_dir=out)
        if cfg.subtask is Subtask.ASR:
            raise ConfigError("generation parsing is for --subtask aste or asqp")
        outputs = read_generation_outputs(outputs_path.read_bytes())
        parsed, summary = parse_outputs(outputs, cfg.subtask)
        entries = [to_submission_entry(rid, rec, cfg.subtask) for rid, rec in parsed]
        paths = [
            write_output(cfg.output_dir / SUBMISSION_NAME, write_submission(entries, cfg.subtask)),
            write_output(cfg.output_dir / REPAIRS_NAME, repairs_to_jsonl(parsed)),
        ]
    except (DimABSAError, OSError) as e:
        fail(e)

    typer.echo(format_parse_summary(summary))
    typer.secho(f"✓ Parsed {summary.records} generations", fg=typer.colors.GREEN)
    finish(cfg, "gen parse", paths, {"outputs": outputs_path}, seeded=False)


@app.command("adapter-config")
def adapter_config(
    out: Optional[Path] = out_option(),
    config: Optional[Path] = config_option(),
    base_model: Optional[str] = typer.Option(None, "--base-model", help="Backbone identifier"),
    rank: Optional[int] = typer.Option(None, "--rank", help="Adapter rank"),
    alpha: Optional[int] = typer.Option(None, "--alpha", help="Adapter alpha"),
    dropout: Optional[float] = typer.Option(None, "--dropout", help="Adapter dropout"),
    learning_rate: Optional[float] = typer.Option(None, "--lr", help="Learning rate"),
    epochs: Optional[int] = typer.Option(None, "--epochs", help="Training epochs"),
    max_seq_length: Optional[int] = typer.Option(
        None, "--max-seq-length", help="Maximum sequence length"
    ),
) -> None:
    """Write the adapter-tuning configuration for a training harness."""
    from dataclasses import replace

    from dimabsa.core.adapter_config import AdapterTuneConfig, serialize_adapter_config

    overrides = {
        "base_model": base_model,
        "lora_r": rank,
        "lora_alpha": alpha,
        "lora_dropout": dropout,
        "learning_rate": learning_rate,
        "epochs": epochs,
        "max_seq_length": max_seq_length,
    }
    try:
        cfg = resolve(config, output_dir=out)
        adapter = replace(
            AdapterTuneConfig(), **{k: v for k, v in overrides.items() if v is not None}
        )
        path = write_output(cfg.output_dir / ADAPTER_CONFIG_NAME, serialize_adapter_config(adapter))
    except (DimABSAError, OSError) as e:
        fail(e)

    typer.secho(
        f"✓ Adapter config: rank {adapter.lora_r}, alpha {adapter.lora_alpha}, "
        f"effective batch {adapter.effective_batch_size}",
        fg=typer.colors.GREEN,
    )
    finish(cfg, "gen adapter-config", [path], seeded=False)
