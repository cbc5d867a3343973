"""
Composite regression objective.

Total loss is ``(1 - beta) * (gamma * MSE + (1 - gamma) * (1 - CCC)) + beta * triplet``,
where CCC combines the per-dimension batch CCCs with weights ``lambda_v`` and
``lambda_a`` and the triplet term is a hinge over VA-guided triples.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
import torch

from dimabsa.errors import BatchTooSmallError, DimensionMismatchError, MetricInputError
from dimabsa.models.va_pair import NormalizedVA
from dimabsa.regressor.config import LossConfig

Triple = Tuple[int, int, int]
TargetsLike = Union[torch.Tensor, np.ndarray, Sequence[NormalizedVA]]


def _check_pair(preds: torch.Tensor, targets: torch.Tensor) -> None:
    if preds.shape != targets.shape or preds.ndim != 2 or preds.shape[1] != 2:
        raise DimensionMismatchError(
            f"expected matching [B, 2] tensors, got {tuple(preds.shape)} and {tuple(targets.shape)}"
        )
    if preds.shape[0] == 0:
        raise MetricInputError("empty batch")


def mse_loss(preds: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    """Mean over the batch of the squared L2 norm of each 2-d residual."""
    _check_pair(preds, targets)
    return torch.mean(torch.sum((preds - targets) ** 2, dim=1))


def batch_ccc(preds: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    """CCC of two vectors with population moments; 0 when it is 0/0."""
    mean_p, mean_t = preds.mean(), targets.mean()
    var_p = torch.mean((preds - mean_p) ** 2)
    var_t = torch.mean((targets - mean_t) ** 2)
    cov = torch.mean((preds - mean_p) * (targets - mean_t))
    denominator = var_p + var_t + (mean_p - mean_t) ** 2
    safe = torch.where(denominator > 0, denominator, torch.ones_like(denominator))
    return torch.where(denominator > 0, 2 * cov / safe, torch.zeros_like(cov))


def ccc_loss(preds: torch.Tensor, targets: torch.Tensor, cfg: LossConfig) -> torch.Tensor:
    """
    ``1 - (lambda_v * CCC_v + lambda_a * CCC_a)`` over the batch.

    Raises:
        BatchTooSmallError: If the batch holds fewer than two instances
    """
    _check_pair(preds, targets)
    if preds.shape[0] < 2:
        raise BatchTooSmallError(f"CCC needs a batch of at least 2, got {preds.shape[0]}")
    ccc_v = batch_ccc(preds[:, 0], targets[:, 0])
    ccc_a = batch_ccc(preds[:, 1], targets[:, 1])
    return 1 - (cfg.lambda_v * ccc_v + cfg.lambda_a * ccc_a)


def _targets_array(targets: TargetsLike) -> np.ndarray:
    if isinstance(targets, torch.Tensor):
        return targets.detach().cpu().double().numpy().reshape(-1, 2)
    if isinstance(targets, np.ndarray):
        return targets.astype(np.float64).reshape(-1, 2)
    return np.array([t.as_tuple() for t in targets], dtype=np.float64).reshape(-1, 2)


def sample_triplets(targets: TargetsLike, cfg: LossConfig, seed: int) -> Tuple[Triple, ...]:
    """
    Draw one (anchor, positive, negative) triple per eligible anchor.

    A positive lies within ``pos_radius`` of the anchor's gold VA (distance
    equal to the radius included); a negative lies strictly beyond
    ``neg_radius``. Anchors lacking either are skipped.

    Returns:
        Triples ordered by anchor index; empty for batches smaller than 3
    """
    points = _targets_array(targets)
    if len(points) < 3:
        return ()
    distances = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    rng = np.random.default_rng(seed)
    triples = []
    for anchor in range(len(points)):
        positives = [
            j for j in range(len(points)) if j != anchor and distances[anchor, j] <= cfg.pos_radius
        ]
        negatives = [j for j in range(len(points)) if distances[anchor, j] > cfg.neg_radius]
        if not positives or not negatives:
            continue
        positive = positives[int(rng.integers(len(positives)))]
        negative = negatives[int(rng.integers(len(negatives)))]
        triples.append((anchor, positive, negative))
    return tuple(triples)


def triplet_loss(z: torch.Tensor, triples: Sequence[Triple], margin: float) -> torch.Tensor:
    """
    Mean hinge ``max(0, |z_a - z_p| - |z_a - z_n| + margin)`` on detached embeddings.

    Returns 0 for an empty triple set. The term carries no gradient.
    """
    if not triples:
        return torch.zeros((), dtype=z.dtype, device=z.device)
    detached = z.detach()
    index = torch.tensor(triples, dtype=torch.long, device=z.device)
    anchors, positives, negatives = (detached[index[:, k]] for k in range(3))
    d_pos = torch.linalg.vector_norm(anchors - positives, dim=1)
    d_neg = torch.linalg.vector_norm(anchors - negatives, dim=1)
    return torch.clamp(d_pos - d_neg + margin, min=0.0).mean()


@dataclass
class LossBreakdown:
    """
    Total loss and its parts for one batch.

    Attributes:
        total: Differentiable total loss
        mse: MSE term value
        ccc: ``1 - CCC`` term value
        triplet: Triplet term value
        n_triples: Size of the sampled triple set
    """
    total: torch.Tensor
    mse: float
    ccc: float
    triplet: float
    n_triples: int


def combine_losses(
    mse: torch.Tensor, ccc: torch.Tensor, tri: torch.Tensor, cfg: LossConfig
) -> torch.Tensor:
    """``(1 - beta) * (gamma * mse + (1 - gamma) * ccc) + beta * tri``."""
    base = cfg.gamma * mse + (1 - cfg.gamma) * ccc
    return (1 - cfg.beta) * base + cfg.beta * tri


def total_loss(
    preds: torch.Tensor,
    targets: torch.Tensor,
    z: torch.Tensor,
    cfg: LossConfig,
    seed: int = 0,
) -> LossBreakdown:
    """
    Full training objective of a batch.

    Args:
        preds: ``[B, 2]`` normalized predictions
        targets: ``[B, 2]`` normalized gold values
        z: ``[B, d]`` pooled representations used by the triplet term
        cfg: Loss weights
        seed: Seed of the triple sampler for this batch

    Raises:
        BatchTooSmallError: If the batch holds fewer than two instances
    """
    mse = mse_loss(preds, targets)
    ccc = ccc_loss(preds, targets, cfg)
    triples = sample_triplets(targets, cfg, seed)
    tri = triplet_loss(z, triples, cfg.margin)
    return LossBreakdown(
        total=combine_losses(mse, ccc, tri, cfg),
        mse=float(mse.detach()),
        ccc=float(ccc.detach()),
        triplet=float(tri),
        n_triples=len(triples),
    )
