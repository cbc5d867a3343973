"""
Run manifests recording what produced a set of artifacts.
"""

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from dimabsa import __version__

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def build_manifest(
    command: str,
    config: Dict[str, Any],
    seed: Optional[int],
    outputs: Sequence[Path],
    timestamp: Optional[datetime] = None,
) -> Dict[str, Any]:
    """
    Assemble a manifest document.

    Args:
        command: Command name, such as ``model train``
        config: Effective configuration snapshot
        seed: Run seed, None for deterministic commands
        outputs: Files the run produced
        timestamp: Completion time, now (UTC) when omitted
    """
    when = timestamp or datetime.now(timezone.utc)
    return {
        "command": command,
        "toolkit_version": __version__,
        "seed": seed,
        "timestamp": when.isoformat(timespec="seconds"),
        "config": config,
        "outputs": [str(p) for p in outputs],
    }


def write_manifest(
    output_dir: Path,
    command: str,
    config: Dict[str, Any],
    seed: Optional[int],
    outputs: Sequence[Path],
) -> Path:
    """Write ``manifest.json`` into ``output_dir`` and return its path."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / MANIFEST_NAME
    manifest = build_manifest(command, config, seed, outputs)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, ensure_ascii=False)
        f.write("\n")
    logger.debug(f"Wrote manifest {path}")
    return path
