"""Shared builders for label streams and posteriors."""

from __future__ import annotations

import pytest

from paraqa.labels import (
    CategoricalLabel,
    DimensionalLabel,
    EmotionCategory,
    Gender,
    GenderLabel,
    GenderSegment,
    LabelStream,
    SubSegmentLabel,
)

ALL_CATEGORIES = list(EmotionCategory)


def make_posterior(top: EmotionCategory, p: float = 0.6) -> dict[EmotionCategory, float]:
    """Full posterior with mass p on top and the rest spread uniformly."""
    rest = (1.0 - p) / (len(ALL_CATEGORIES) - 1)
    if rest >= p:
        raise ValueError(f"p = {p} too small to dominate")
    return {cat: (p if cat is top else rest) for cat in ALL_CATEGORIES}


def make_subsegment(
    category: EmotionCategory,
    valence: float,
    core_start: float,
    core_end: float,
    duration: float,
    delta_t: float = 1.0,
    p: float = 0.6,
) -> SubSegmentLabel:
    return SubSegmentLabel(
        core_start_s=core_start,
        core_end_s=core_end,
        window_start_s=max(0.0, core_start - delta_t),
        window_end_s=min(duration, core_end + delta_t),
        categorical=CategoricalLabel.from_posterior(make_posterior(category, p)),
        dimensional=DimensionalLabel(valence=valence, arousal=0.5, dominance=0.5),
    )


def make_stream(
    sample_id: str,
    labels: list[tuple[EmotionCategory, float]],
    t: float = 2.0,
    delta_t: float = 1.0,
    duration: float | None = None,
    genders: list[Gender] | None = None,
) -> LabelStream:
    """Tiles cores of length t, one per (category, valence) pair."""
    if duration is None:
        duration = t * len(labels)
    subs = []
    for j, (category, valence) in enumerate(labels):
        core_start = j * t
        core_end = duration if j == len(labels) - 1 else (j + 1) * t
        subs.append(
            make_subsegment(category, valence, core_start, core_end, duration, delta_t)
        )
    gender_segs = []
    if genders:
        span = duration / len(genders)
        for j, g in enumerate(genders):
            gender_segs.append(
                GenderSegment(
                    core_start_s=j * span,
                    core_end_s=duration if j == len(genders) - 1 else (j + 1) * span,
                    label=GenderLabel(g, 0.9),
                )
            )
    return LabelStream(
        sample_id=sample_id,
        duration_s=duration,
        emotion_subsegments=tuple(subs),
        gender_subsegments=tuple(gender_segs),
    )


@pytest.fixture
def neutral_posterior() -> dict[EmotionCategory, float]:
    return make_posterior(EmotionCategory.NEUTRAL)
