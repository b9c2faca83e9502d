"""Condense in-the-wild speech into a labeled QA evaluation set.

The pipeline: plan sliding windows over voiced audio, fuse per-model
emotion and gender outputs into label streams, condense streams into a
multi-label dataset, align labels to transcript words, generate QA pairs
with a text LLM, and score speech models with an LLM judge.
"""

from .labels import (
    CategoricalLabel,
    CondensedSample,
    DimensionalLabel,
    EmotionCategory,
    Gender,
    GenderLabel,
    GenderSegment,
    LabelError,
    LabelStream,
    SentimentClass,
    SubSegmentLabel,
    ThresholdConfig,
)
from .aligner import AlignedTranscript, EnrichedWord, Word, align
from .condenser import balanced_sample, condense, consistency_relabel, length_filter, occurrence_assign
from .fusion import ensemble_average, is_consistent, metrics, sentiment_of, sweep_thresholds
from .qagen import QAPair
from .segmenter import plan_windows

__version__ = "0.1.0"

__all__ = [
    "AlignedTranscript",
    "CategoricalLabel",
    "CondensedSample",
    "DimensionalLabel",
    "EmotionCategory",
    "EnrichedWord",
    "Gender",
    "GenderLabel",
    "GenderSegment",
    "LabelError",
    "LabelStream",
    "QAPair",
    "SentimentClass",
    "SubSegmentLabel",
    "ThresholdConfig",
    "Word",
    "align",
    "balanced_sample",
    "condense",
    "consistency_relabel",
    "ensemble_average",
    "is_consistent",
    "length_filter",
    "metrics",
    "occurrence_assign",
    "plan_windows",
    "sentiment_of",
    "sweep_thresholds",
    "__version__",
]
