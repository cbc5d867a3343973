"""
Aspect-conditioned regression model: input construction, attention pooling
and the valence/arousal heads.
"""

from typing import Sequence, Tuple

import torch
from torch import nn

from dimabsa.errors import DimensionMismatchError, PoolingError, TemplateError
from dimabsa.models.record import NullTarget, Term
from dimabsa.regressor.encoder import Encoder, EncoderOutput

DEFAULT_TEMPLATE = "Aspect: {aspect}. Sentence: {sentence}."
DEFAULT_NULL_SURFACE = "overall"


def build_input(
    aspect: Term,
    sentence: str,
    template: str = DEFAULT_TEMPLATE,
    null_surface: str = DEFAULT_NULL_SURFACE,
) -> str:
    """
    Join an aspect and its review into one encoder input.

    Args:
        aspect: Aspect term or NULL
        sentence: Review text
        template: Format string with ``{aspect}`` and ``{sentence}`` placeholders
        null_surface: Text used in place of a NULL aspect

    Raises:
        TemplateError: If a placeholder is missing or the sentence is empty
    """
    for placeholder in ("{aspect}", "{sentence}"):
        if placeholder not in template:
            raise TemplateError(f"template lacks the {placeholder} placeholder: {template!r}")
    if not sentence or not sentence.strip():
        raise TemplateError("cannot build an input from an empty sentence")
    surface = null_surface if isinstance(aspect, NullTarget) else aspect
    # braces in the review text stay literal
    return template.replace("{aspect}", surface).replace("{sentence}", sentence)


def attention_pool(out: EncoderOutput, w: torch.Tensor) -> torch.Tensor:
    """
    Softmax-weighted sum of token vectors scored by ``w``.

    Padding positions get zero weight.

    Args:
        out: Encoder output with ``hidden [B, T, d]`` and ``mask [B, T]``
        w: Scoring vector of length d

    Returns:
        Pooled representations ``[B, d]``

    Raises:
        PoolingError: If a sequence has no unmasked token
        DimensionMismatchError: If ``w`` does not match the hidden width
    """
    if w.shape[-1] != out.hidden.shape[-1]:
        raise DimensionMismatchError(
            f"scoring vector width {w.shape[-1]} != hidden width {out.hidden.shape[-1]}"
        )
    mask = out.mask.bool()
    if not bool(mask.any(dim=1).all()):
        raise PoolingError("attention pooling needs at least one unmasked token per sequence")
    scores = torch.matmul(out.hidden, w)
    scores = scores.masked_fill(~mask, float("-inf"))
    alpha = torch.softmax(scores, dim=1)
    hidden = out.hidden.masked_fill(~mask.unsqueeze(-1), 0.0)
    return torch.sum(alpha.unsqueeze(-1) * hidden, dim=1)


class RegressionHeads(nn.Module):
    """Two affine maps from the pooled vector to valence and arousal."""

    def __init__(self, hidden_size: int) -> None:
        super().__init__()
        self.valence = nn.Linear(hidden_size, 1)
        self.arousal = nn.Linear(hidden_size, 1)

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        return predict_va(z, self)


def predict_va(z: torch.Tensor, heads: RegressionHeads) -> torch.Tensor:
    """
    Apply both heads; outputs stay unclipped on the normalized scale.

    Returns:
        ``[B, 2]`` tensor of ``(v, a)`` predictions

    Raises:
        DimensionMismatchError: If ``z`` does not match the head width
    """
    if z.shape[-1] != heads.valence.in_features:
        raise DimensionMismatchError(
            f"pooled width {z.shape[-1]} != head width {heads.valence.in_features}"
        )
    return torch.cat([heads.valence(z), heads.arousal(z)], dim=-1)


class AspectVARegressor(nn.Module):
    """
    Encoder, attention pooling, dropout and VA heads.

    Attributes:
        encoder: Any :class:`Encoder`
        template: Input template for :func:`build_input`
        null_surface: Rendering of NULL aspects
    """

    def __init__(
        self,
        encoder: Encoder,
        dropout: float = 0.3,
        template: str = DEFAULT_TEMPLATE,
        null_surface: str = DEFAULT_NULL_SURFACE,
    ) -> None:
        super().__init__()
        self.encoder = encoder
        self.template = template
        self.null_surface = null_surface
        self.w = nn.Parameter(torch.empty(encoder.hidden_size).normal_(std=0.02))
        self.dropout = nn.Dropout(dropout)
        self.heads = RegressionHeads(encoder.hidden_size)

    def inputs(
        self, aspects: Sequence[Term], sentences: Sequence[str]
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """Build and tokenize the inputs of a batch."""
        texts = [
            build_input(a, s, self.template, self.null_surface) for a, s in zip(aspects, sentences)
        ]
        return self.encoder.tokenize(texts)

    def forward(
        self, input_ids: torch.Tensor, mask: torch.Tensor
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """
        Returns:
            ``(predictions [B, 2], pooled z [B, d])``
        """
        z = attention_pool(self.encoder(input_ids, mask), self.w)
        return predict_va(self.dropout(z), self.heads), z
