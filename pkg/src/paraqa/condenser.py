"""Data condensation: filter raw label streams down to usable samples.

Three stages, applied in order:

1. length filter: drop samples shorter than tau seconds
2. consistency relabel: sub-segments whose categorical label disagrees
   with the valence estimate become ``unknown``
3. occurrence assignment: a sample earns a category label when enough of
   its sub-segments carry that category; samples that earn none are dropped

A sample can earn several labels, so the output is multi-label.
"""

from __future__ import annotations

import random
from collections import Counter
from typing import Iterable, Mapping, Sequence

from .fusion import is_consistent
from .labels import (
    CondensedSample,
    EmotionCategory,
    LabelStream,
    SubSegmentLabel,
    ThresholdConfig,
)


def length_filter(streams: Iterable[LabelStream], tau_s: float) -> list[LabelStream]:
    """Keeps streams at least tau seconds long, preserving order."""
    if tau_s <= 0:
        raise ValueError(f"tau_s = {tau_s} must be positive")
    return [s for s in streams if s.duration_s >= tau_s]


def consistency_relabel(stream: LabelStream, thresholds: ThresholdConfig) -> LabelStream:
    """Relabels valence-inconsistent sub-segments to unknown.

    The check always runs against the posterior argmax, so applying the
    relabel twice changes nothing.
    """
    relabeled = tuple(
        SubSegmentLabel(
            core_start_s=sub.core_start_s,
            core_end_s=sub.core_end_s,
            window_start_s=sub.window_start_s,
            window_end_s=sub.window_end_s,
            categorical=sub.categorical,
            dimensional=sub.dimensional,
            category=(
                sub.categorical.argmax
                if is_consistent(sub.categorical.argmax, sub.valence, thresholds)
                else EmotionCategory.UNKNOWN
            ),
        )
        for sub in stream.emotion_subsegments
    )
    return LabelStream(
        sample_id=stream.sample_id,
        duration_s=stream.duration_s,
        emotion_subsegments=relabeled,
        gender_subsegments=stream.gender_subsegments,
    )


def occurrence_assign(
    stream: LabelStream, thresholds: ThresholdConfig, audio_uri: str | None = None
) -> CondensedSample | None:
    """Assigns every category whose sub-segment count reaches its threshold.

    Categories absent from the threshold map are never assigned. Returns
    None when no category qualifies.
    """
    counts = Counter(sub.category for sub in stream.emotion_subsegments)
    assigned = []
    for cat in EmotionCategory:
        alpha = thresholds.alpha.get(cat)
        if alpha is None:
            continue
        if counts.get(cat, 0) >= alpha:
            assigned.append((cat, counts[cat]))
    if not assigned:
        return None
    return CondensedSample(
        sample_id=stream.sample_id,
        duration_s=stream.duration_s,
        assigned_labels=tuple(assigned),
        audio_uri=audio_uri if audio_uri is not None else stream.sample_id,
    )


def condense(
    streams: Iterable[LabelStream],
    thresholds: ThresholdConfig,
    audio_uris: Mapping[str, str] | None = None,
) -> list[CondensedSample]:
    """Runs the full pipeline: length filter, relabel, occurrence assign."""
    samples = []
    for stream in length_filter(streams, thresholds.tau_s):
        relabeled = consistency_relabel(stream, thresholds)
        uri = (audio_uris or {}).get(stream.sample_id)
        sample = occurrence_assign(relabeled, thresholds, audio_uri=uri)
        if sample is not None:
            samples.append(sample)
    return samples


class SamplingError(ValueError):
    """Not enough samples to fill a category quota."""


def balanced_sample_by_category(
    samples: Sequence[CondensedSample],
    n: int,
    categories: Sequence[EmotionCategory],
    seed: int,
    max_duration_s: float | None = 60.0,
) -> dict[EmotionCategory, list[CondensedSample]]:
    """Draws n samples per category without reusing any sample.

    Samples longer than ``max_duration_s`` are excluded up front. Categories
    are filled scarcest-first so a plentiful category cannot starve a rare
    one; the returned mapping still follows the requested category order.
    Raises SamplingError naming the category and shortfall when a quota
    cannot be met.
    """
    if n < 1:
        raise ValueError(f"n = {n} must be >= 1")
    if not categories:
        raise ValueError("categories must be non-empty")
    if len(set(categories)) != len(categories):
        raise ValueError("categories must be unique")

    eligible = []
    seen_ids = set()
    for s in samples:
        if s.sample_id in seen_ids:
            continue
        seen_ids.add(s.sample_id)
        if max_duration_s is not None and s.duration_s > max_duration_s:
            continue
        eligible.append(s)

    pools: dict[EmotionCategory, list[CondensedSample]] = {cat: [] for cat in categories}
    for s in eligible:
        for cat in s.categories:
            if cat in pools:
                pools[cat].append(s)

    rng = random.Random(seed)
    order = sorted(range(len(categories)), key=lambda i: (len(pools[categories[i]]), i))
    used: set[str] = set()
    chosen: dict[EmotionCategory, list[CondensedSample]] = {}
    for i in order:
        cat = categories[i]
        available = [s for s in pools[cat] if s.sample_id not in used]
        if len(available) < n:
            raise SamplingError(
                f"category {cat.value}: need {n} samples but only "
                f"{len(available)} available (short by {n - len(available)})"
            )
        picked = rng.sample(available, n)
        chosen[cat] = picked
        used.update(s.sample_id for s in picked)
    return {cat: chosen[cat] for cat in categories}


def balanced_sample(
    samples: Sequence[CondensedSample],
    n: int,
    categories: Sequence[EmotionCategory],
    seed: int,
    max_duration_s: float | None = 60.0,
) -> list[CondensedSample]:
    """Flat view of :func:`balanced_sample_by_category` in category order."""
    by_cat = balanced_sample_by_category(samples, n, categories, seed, max_duration_s)
    return [s for cat in categories for s in by_cat[cat]]
