"""
DimABSA - A toolkit for dimensional aspect-based sentiment analysis.

This library loads and validates valence-arousal annotated review data,
scores predictions, trains aspect-conditioned VA regressors, builds and
parses instruction-tuning prompts, and reports split drift.
"""

__version__ = "0.1.0"

from dimabsa.errors import DimABSAError
from dimabsa.models import AnnotatedRecord, DatasetSplit, SentimentTuple, Subtask, VAPair

__all__ = ["AnnotatedRecord", "DatasetSplit", "DimABSAError", "SentimentTuple", "Subtask", "VAPair"]
