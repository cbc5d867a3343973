"""
Evaluation result models.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple


@dataclass(frozen=True)
class MomentStats:
    """
    Population moments of a prediction vector against its partner.

    Attributes:
        mean: Mean of the vector
        variance: Population (1/N) variance
        covariance: Population covariance with the partner vector
    """
    mean: float
    variance: float
    covariance: float


@dataclass(frozen=True)
class Match:
    """A paired prediction and gold tuple with its VA similarity weight."""
    pred_index: int
    gold_index: int
    weight: float


@dataclass
class MatchResult:
    """
    One-to-one alignment of predicted and gold tuples within a review.

    Attributes:
        matches: Matched pairs, no index used twice
        unmatched_pred: Predictions left without a partner
        unmatched_gold: Gold tuples left without a partner
    """
    matches: List[Match] = field(default_factory=list)
    unmatched_pred: int = 0
    unmatched_gold: int = 0

    @property
    def total_weight(self) -> float:
        """Sum of match weights."""
        return sum(m.weight for m in self.matches)

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        """Matched ``(pred index, gold index)`` pairs."""
        return [(m.pred_index, m.gold_index) for m in self.matches]


@dataclass(frozen=True)
class ScoreReport:
    """
    Scores in the column names of the results tables.

    DimASR reports fill the RMSE/PCC fields; extraction reports fill the
    continuous precision/recall/F1 fields.
    """
    rmse_va: Optional[float] = None
    pcc_v: Optional[float] = None
    pcc_a: Optional[float] = None
    rmse_v: Optional[float] = None
    rmse_a: Optional[float] = None
    c_precision: Optional[float] = None
    c_recall: Optional[float] = None
    c_f1: Optional[float] = None
    n_pred: int = 0
    n_gold: int = 0

    @property
    def is_regression(self) -> bool:
        """Check if this is a DimASR report."""
        return self.rmse_va is not None

    def to_dict(self) -> Dict[str, float]:
        """Serialize the populated fields under their table names."""
        names = {
            "RMSE_VA": self.rmse_va,
            "PCC_V": self.pcc_v,
            "PCC_A": self.pcc_a,
            "RMSE_V": self.rmse_v,
            "RMSE_A": self.rmse_a,
            "cP": self.c_precision,
            "cR": self.c_recall,
            "cF1": self.c_f1,
        }
        return {k: v for k, v in names.items() if v is not None}
