"""
Valence-arousal value models.

This module defines the continuous sentiment label of the task and the
linear map between the [1, 9] label scale and the [0, 1] training scale.
"""

import math
from dataclasses import dataclass
from typing import Tuple, Union

from dimabsa.errors import VARangeError

VA_MIN = 1.0
VA_MAX = 9.0
VA_SPAN = VA_MAX - VA_MIN


@dataclass(frozen=True)
class VAPair:
    """
    A valence-arousal score pair.

    Values are kept as binary floats; rounding to two decimals happens only
    when the pair is written out as a ``V#A`` string.

    Attributes:
        valence: Sentiment positivity in [1.00, 9.00]
        arousal: Activation intensity in [1.00, 9.00]
    """
    valence: float
    arousal: float

    def __post_init__(self) -> None:
        for name in ("valence", "arousal"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or not VA_MIN <= value <= VA_MAX:
                raise VARangeError(
                    f"{name} {getattr(self, name)!r} outside [{VA_MIN:.2f}, {VA_MAX:.2f}]"
                )
            object.__setattr__(self, name, value)

    def as_tuple(self) -> Tuple[float, float]:
        """Return ``(valence, arousal)``."""
        return (self.valence, self.arousal)

    def __str__(self) -> str:
        return f"{self.valence:.2f}#{self.arousal:.2f}"


@dataclass(frozen=True)
class NormalizedVA:
    """
    A valence-arousal pair on the [0, 1] training scale.

    Model outputs live on this scale too and may leave the unit interval,
    so construction does not range-check.
    """
    v: float
    a: float

    @property
    def in_unit_range(self) -> bool:
        """Check if both components lie in [0, 1]."""
        return 0.0 <= self.v <= 1.0 and 0.0 <= self.a <= 1.0

    def as_tuple(self) -> Tuple[float, float]:
        """Return ``(v, a)``."""
        return (self.v, self.a)


VALike = Union[VAPair, Tuple[float, float]]
NormalizedLike = Union[NormalizedVA, Tuple[float, float]]


def normalize_va(va: VALike) -> NormalizedVA:
    """
    Map a VA pair from [1, 9] onto [0, 1] with ``(x - 1) / 8``.

    Args:
        va: A VAPair or a ``(valence, arousal)`` tuple

    Returns:
        The normalized pair

    Raises:
        VARangeError: If either component is outside [1.00, 9.00]
    """
    pair = va if isinstance(va, VAPair) else VAPair(*va)
    return NormalizedVA(
        v=(pair.valence - VA_MIN) / VA_SPAN,
        a=(pair.arousal - VA_MIN) / VA_SPAN,
    )


def denormalize_clip(nv: NormalizedLike) -> VAPair:
    """
    Map a normalized pair back with ``8x + 1`` and clip into [1, 9].

    Args:
        nv: A NormalizedVA or a ``(v, a)`` tuple; any finite reals accepted

    Returns:
        The rescaled, clipped VAPair
    """
    v, a = nv.as_tuple() if isinstance(nv, NormalizedVA) else nv
    return VAPair(valence=_rescale_clip(v), arousal=_rescale_clip(a))


def _rescale_clip(x: float) -> float:
    value = VA_SPAN * float(x) + VA_MIN
    if math.isnan(value):
        raise VARangeError("cannot rescale a NaN prediction")
    return min(VA_MAX, max(VA_MIN, value))
