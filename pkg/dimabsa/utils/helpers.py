"""Helper utility functions."""

import random
import zlib
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from typing import Optional


def format_two_decimals(value: float) -> str:
    """
    Format a number with exactly two decimals, rounding half away from zero.

    Rounding works on the shortest decimal representation of the float, so
    ``2.675`` gives ``"2.68"`` rather than the binary-artifact ``"2.67"``.

    Args:
        value: Number to format

    Returns:
        Formatted string such as ``"7.67"``
    """
    try:
        quantized = Decimal(repr(float(value))).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    except InvalidOperation as e:
        raise ValueError(f"cannot format {value!r} with two decimals") from e
    text = f"{quantized:.2f}"
    return "0.00" if text == "-0.00" else text


def stable_hash(token: str, buckets: int, offset: int = 0) -> int:
    """
    Map a string to a bucket in ``[offset, offset + buckets)``.

    Uses CRC32 of the UTF-8 bytes so the mapping does not depend on
    Python's per-process hash salt.
    """
    return offset + zlib.crc32(token.encode("utf-8")) % buckets


def seed_everything(seed: int) -> None:
    """Seed Python, NumPy and torch generators."""
    import numpy as np
    import torch

    random.seed(seed)
    np.random.seed(seed % (2**32))
    torch.manual_seed(seed)


def is_cjk_char(char: str) -> bool:
    """Check if a character belongs to a script written without spaces."""
    code = ord(char)
    return (
        0x3040 <= code <= 0x30FF  # kana
        or 0x3400 <= code <= 0x4DBF
        or 0x4E00 <= code <= 0x9FFF
        or 0xF900 <= code <= 0xFAFF
        or 0xFF66 <= code <= 0xFF9F
    )


def truncate_string(s: str, max_length: int, suffix: str = "...") -> str:
    """Cut a string to at most ``max_length`` characters, marking the cut with ``suffix``."""
    if len(s) <= max_length:
        return s
    return s[:max_length - len(suffix)] + suffix


def coerce_float(value: object) -> Optional[float]:
    """Return ``value`` as a float when it is a number or numeric string, else None."""
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.strip())
        except ValueError:
            return None
    return None
