"""Options and helpers shared by the command groups."""

import logging
from pathlib import Path
from typing import Any, Dict, List, NoReturn, Optional, Sequence

import typer

from dimabsa.core.config import RunConfig, resolve_run_config
from dimabsa.core.manifest import write_manifest
from dimabsa.errors import ConfigError
from dimabsa.models.record import Domain, Language, Subtask

logger = logging.getLogger(__name__)


def subtask_option() -> Any:
    return typer.Option(None, "--subtask", "-s", help="Subtask: asr, aste or asqp")


def lang_option() -> Any:
    return typer.Option(None, "--lang", "-l", help="Data language, e.g. eng or zho")


def domain_option() -> Any:
    return typer.Option(None, "--domain", "-d", help="Review domain, e.g. restaurant")


def config_option() -> Any:
    return typer.Option(None, "--config", "-c", help="JSON run config; flags override it")


def seed_option() -> Any:
    return typer.Option(None, "--seed", help="Seed for every stochastic step")


def out_option() -> Any:
    return typer.Option(None, "--out", "-o", help="Output directory")


def fail(error: Exception) -> NoReturn:
    """Print an error in red and exit with status 1."""
    typer.secho(f"Error: {error}", fg=typer.colors.RED, err=True)
    raise typer.Exit(1)


def resolve(
    config: Optional[Path],
    subtask: Optional[str] = None,
    lang: Optional[str] = None,
    domain: Optional[str] = None,
    **overrides: Any,
) -> RunConfig:
    """
    Build the effective run config from a config file and command-line flags.

    Raises:
        ConfigError: If a flag value cannot be parsed
    """
    try:
        parsed = {
            "subtask": Subtask.parse(subtask) if subtask else None,
            "language": Language.parse(lang) if lang else None,
            "domain": Domain.parse(domain) if domain else None,
        }
    except ValueError as e:
        raise ConfigError(str(e)) from e
    return resolve_run_config(config, **parsed, **overrides)


def write_output(path: Path, data: bytes) -> Path:
    """Write bytes, creating parent directories."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    logger.debug(f"Wrote {len(data)} bytes to {path}")
    return path


def finish(
    cfg: RunConfig,
    command: str,
    outputs: Sequence[Path],
    options: Optional[Dict[str, Any]] = None,
    seeded: bool = True,
) -> Path:
    """Write the run manifest and report the produced files."""
    snapshot = cfg.to_dict()
    if options:
        snapshot["options"] = {k: str(v) if isinstance(v, Path) else v for k, v in options.items()}
    files: List[Path] = list(outputs)
    seed = cfg.seed if seeded else None
    manifest = write_manifest(cfg.output_dir, command, snapshot, seed, files)
    for path in files:
        typer.echo(f"  {path}")
    typer.echo(f"  {manifest}")
    return manifest
