"""Core label types shared by every stage of the pipeline.

Timestamped model outputs (categorical posteriors, valence/arousal/dominance
values, gender labels) are immutable values; JSON-Lines readers and writers
live in :mod:`paraqa.manifest`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

# Posteriors arrive through float serialization; strict sum-to-one would
# reject valid model output.
POSTERIOR_SUM_TOL = 1e-6

# Slack for span comparisons on deserialized floats.
SPAN_EPS = 1e-9


class LabelError(ValueError):
    """A label value violates one of its invariants."""


class EmotionCategory(str, Enum):
    """Discrete emotion classes produced by the categorical recognizer.

    Declaration order doubles as the deterministic tie-break order whenever
    a single category must be chosen among equals.
    """

    ANGRY = "angry"
    DISGUSTED = "disgusted"
    FEARFUL = "fearful"
    HAPPY = "happy"
    NEUTRAL = "neutral"
    OTHER = "other"
    SAD = "sad"
    SURPRISED = "surprised"
    UNKNOWN = "unknown"

    @classmethod
    def parse(cls, text: str) -> "EmotionCategory":
        """Case-insensitive lookup; raises LabelError for unknown names."""
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise LabelError(f"unknown emotion category: {text!r}") from None


class SentimentClass(str, Enum):
    """Sentiment polarity buckets the emotion categories map onto."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    AMBIGUOUS = "ambiguous"


class Gender(str, Enum):
    MALE = "male"
    FEMALE = "female"
    UNKNOWN = "unknown"

    @classmethod
    def parse(cls, text: str) -> "Gender":
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise LabelError(f"unknown gender: {text!r}") from None


def posterior_argmax(posterior: Mapping[EmotionCategory, float]) -> EmotionCategory:
    """Category with the highest probability; ties go to declaration order."""
    if not posterior:
        raise LabelError("posterior is empty")
    best: EmotionCategory | None = None
    best_p = -math.inf
    for cat in EmotionCategory:
        p = posterior.get(cat)
        if p is not None and p > best_p:
            best, best_p = cat, p
    assert best is not None
    return best


@dataclass(frozen=True)
class CategoricalLabel:
    """Posterior over emotion categories plus its (stable) argmax."""

    posterior: Mapping[EmotionCategory, float]
    argmax: EmotionCategory

    def __post_init__(self) -> None:
        object.__setattr__(self, "posterior", dict(self.posterior))
        total = 0.0
        for cat, p in self.posterior.items():
            if not isinstance(cat, EmotionCategory):
                raise LabelError(f"posterior key {cat!r} is not an EmotionCategory")
            if not 0.0 <= p <= 1.0:
                raise LabelError(f"posterior[{cat.value}] = {p} outside [0, 1]")
            total += p
        if abs(total - 1.0) > POSTERIOR_SUM_TOL:
            raise LabelError(f"posterior sums to {total}, expected 1 within {POSTERIOR_SUM_TOL}")
        expected = posterior_argmax(self.posterior)
        if not isinstance(self.argmax, EmotionCategory) or self.argmax is not expected:
            raise LabelError(
                f"stored argmax {self.argmax!r} does not match posterior argmax {expected.value}"
            )

    @classmethod
    def from_posterior(cls, posterior: Mapping[EmotionCategory, float]) -> "CategoricalLabel":
        return cls(posterior=posterior, argmax=posterior_argmax(posterior))


@dataclass(frozen=True)
class DimensionalLabel:
    """Continuous emotion representation; only valence feeds the filters."""

    valence: float
    arousal: float
    dominance: float

    def __post_init__(self) -> None:
        for name in ("valence", "arousal", "dominance"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise LabelError(f"{name} = {v} outside [0, 1]")


@dataclass(frozen=True)
class GenderLabel:
    gender: Gender
    confidence: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise LabelError(f"gender confidence = {self.confidence} outside [0, 1]")


def _check_span(start: float, end: float, what: str) -> None:
    if not start < end:
        raise LabelError(f"{what}: start {start} must be < end {end}")


@dataclass(frozen=True)
class SubSegmentLabel:
    """Labels for one core span, inferred from a context-padded window.

    ``category`` is the effective emotion label used by downstream filters.
    It starts as the posterior argmax and may be relabeled (to ``unknown``)
    by consistency filtering; it is an in-memory field and is not part of
    the serialized record.
    """

    core_start_s: float
    core_end_s: float
    window_start_s: float
    window_end_s: float
    categorical: CategoricalLabel
    dimensional: DimensionalLabel
    category: EmotionCategory = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.category is None:
            object.__setattr__(self, "category", self.categorical.argmax)
        _check_span(self.core_start_s, self.core_end_s, "core span")
        if self.window_start_s > self.core_start_s + SPAN_EPS:
            raise LabelError(
                f"window_start_s {self.window_start_s} exceeds core_start_s {self.core_start_s}"
            )
        if self.window_end_s < self.core_end_s - SPAN_EPS:
            raise LabelError(
                f"window_end_s {self.window_end_s} is before core_end_s {self.core_end_s}"
            )

    @property
    def valence(self) -> float:
        return self.dimensional.valence


@dataclass(frozen=True)
class GenderSegment:
    """A core span with the gender label inferred for it."""

    core_start_s: float
    core_end_s: float
    label: GenderLabel

    def __post_init__(self) -> None:
        _check_span(self.core_start_s, self.core_end_s, "gender core span")


def _check_sorted_disjoint(
    spans: Sequence[tuple[float, float]], duration_s: float, field_name: str
) -> None:
    prev_end = None
    for start, end in spans:
        if start < -SPAN_EPS or end > duration_s + SPAN_EPS:
            raise LabelError(f"{field_name}: span [{start}, {end}] outside [0, {duration_s}]")
        if prev_end is not None:
            if start < prev_end - SPAN_EPS:
                raise LabelError(
                    f"{field_name}: core spans overlap or are unsorted near {start}"
                )
        prev_end = end


@dataclass(frozen=True)
class LabelStream:
    """All timestamped model outputs for one speech sample."""

    sample_id: str
    duration_s: float
    emotion_subsegments: tuple[SubSegmentLabel, ...] = ()
    gender_subsegments: tuple[GenderSegment, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "emotion_subsegments", tuple(self.emotion_subsegments))
        object.__setattr__(self, "gender_subsegments", tuple(self.gender_subsegments))
        if not self.sample_id:
            raise LabelError("sample_id must be non-empty")
        if self.duration_s <= 0:
            raise LabelError(f"duration_s = {self.duration_s} must be positive")
        _check_sorted_disjoint(
            [(s.core_start_s, s.core_end_s) for s in self.emotion_subsegments],
            self.duration_s,
            "emotion_subsegments",
        )
        for s in self.emotion_subsegments:
            if s.window_start_s < -SPAN_EPS or s.window_end_s > self.duration_s + SPAN_EPS:
                raise LabelError(
                    f"emotion_subsegments: window [{s.window_start_s}, {s.window_end_s}] "
                    f"outside [0, {self.duration_s}]"
                )
        _check_sorted_disjoint(
            [(s.core_start_s, s.core_end_s) for s in self.gender_subsegments],
            self.duration_s,
            "gender_subsegments",
        )


@dataclass(frozen=True)
class CondensedSample:
    """A sample that survived filtering, with its assigned labels.

    ``assigned_labels`` pairs each category with the number of consistent
    sub-segments that supported it.
    """

    sample_id: str
    duration_s: float
    assigned_labels: tuple[tuple[EmotionCategory, int], ...]
    audio_uri: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "assigned_labels", tuple(tuple(x) for x in self.assigned_labels))
        if not self.assigned_labels:
            raise LabelError(f"{self.sample_id}: assigned_labels must be non-empty")
        if self.duration_s <= 0:
            raise LabelError(f"{self.sample_id}: duration_s must be positive")
        for cat, count in self.assigned_labels:
            if not isinstance(cat, EmotionCategory):
                raise LabelError(f"{self.sample_id}: assigned label {cat!r} is not a category")
            if count < 1:
                raise LabelError(f"{self.sample_id}: occurrence count {count} must be >= 1")

    @property
    def categories(self) -> tuple[EmotionCategory, ...]:
        return tuple(cat for cat, _ in self.assigned_labels)


# Occurrence thresholds may cover any assignable category; unknown and other
# are filter residue, never assignable labels.
_UNASSIGNABLE = frozenset({EmotionCategory.OTHER, EmotionCategory.UNKNOWN})


@dataclass(frozen=True)
class ThresholdConfig:
    """All tunable filter parameters.

    The valence bands follow the one-knob-per-polarity parameterization:
    ``v_pos_min = x``, ``v_neg_max = 1 - x``, ``v_neu_min = y``,
    ``v_neu_max = 1 - y`` (see :meth:`from_xy`). Bands are allowed to
    overlap; disjointness is not enforced. For y > 0.5 the neutral band is
    empty (v_neu_min > v_neu_max) and no neutral prediction is consistent —
    the sweep grid deliberately covers that regime.
    """

    v_pos_min: float
    v_neg_max: float
    v_neu_min: float
    v_neu_max: float
    alpha: Mapping[EmotionCategory, int] = field(default_factory=dict)
    tau_s: float = 30.0
    t_s: float = 2.0
    delta_t_s: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", dict(self.alpha))
        for name in ("v_pos_min", "v_neg_max", "v_neu_min", "v_neu_max"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise LabelError(f"{name} = {v} outside [0, 1]")
        for cat, a in self.alpha.items():
            if not isinstance(cat, EmotionCategory):
                raise LabelError(f"alpha key {cat!r} is not an EmotionCategory")
            if cat in _UNASSIGNABLE:
                raise LabelError(f"alpha must not cover {cat.value}")
            if not isinstance(a, int) or a < 1:
                raise LabelError(f"alpha[{cat.value}] = {a} must be an integer >= 1")
        if self.tau_s <= 0:
            raise LabelError(f"tau_s = {self.tau_s} must be positive")
        if self.t_s <= 0:
            raise LabelError(f"t_s = {self.t_s} must be positive")
        if self.delta_t_s < 0:
            raise LabelError(f"delta_t_s = {self.delta_t_s} must be >= 0")

    @classmethod
    def from_xy(
        cls,
        x: float,
        y: float,
        alpha: Mapping[EmotionCategory, int] | None = None,
        tau_s: float = 30.0,
        t_s: float = 2.0,
        delta_t_s: float = 1.0,
    ) -> "ThresholdConfig":
        return cls(
            v_pos_min=x,
            v_neg_max=1.0 - x,
            v_neu_min=y,
            v_neu_max=1.0 - y,
            alpha=dict(alpha or {}),
            tau_s=tau_s,
            t_s=t_s,
            delta_t_s=delta_t_s,
        )
