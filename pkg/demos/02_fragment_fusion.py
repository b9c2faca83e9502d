"""
Fusing per-model recognizer fragments into label streams
========================================================

Each recognizer scores windows independently and emits fragments: the
categorical models a posterior per window, the dimensional model a
valence/arousal/dominance triple, the gender model a label. Fusion joins
them on the core span and ensemble-averages the posteriors.
"""

from paraqa import DimensionalLabel, EmotionCategory, Gender, GenderLabel
from paraqa.fusion import (
    CategoricalFragment,
    DimensionalFragment,
    GenderFragment,
    fuse_streams,
)

E = EmotionCategory


def posterior(**weights):
    # Fill the remaining mass uniformly over the unnamed categories.
    named = {E(k): v for k, v in weights.items()}
    rest = [c for c in E if c not in named]
    spare = (1.0 - sum(named.values())) / len(rest)
    named.update({c: spare for c in rest})
    return named


# Two categorical models disagree on the first window: model a says angry,
# model b says sad. Averaging keeps both opinions in the posterior.
categorical = [
    CategoricalFragment("clip1", "model-a", 0.0, 2.0, 0.0, 3.0, posterior(angry=0.7)),
    CategoricalFragment("clip1", "model-b", 0.0, 2.0, 0.0, 3.0, posterior(sad=0.8)),
    CategoricalFragment("clip1", "model-a", 2.0, 4.0, 1.0, 4.0, posterior(happy=0.6)),
    CategoricalFragment("clip1", "model-b", 2.0, 4.0, 1.0, 4.0, posterior(happy=0.9)),
]
dimensional = [
    DimensionalFragment("clip1", 0.0, 2.0, 0.0, 3.0, DimensionalLabel(0.2, 0.8, 0.5)),
    DimensionalFragment("clip1", 2.0, 4.0, 1.0, 4.0, DimensionalLabel(0.9, 0.6, 0.5)),
]
gender = [
    GenderFragment("clip1", 0.0, 2.0, GenderLabel(Gender.FEMALE, 0.97)),
    GenderFragment("clip1", 2.0, 4.0, GenderLabel(Gender.FEMALE, 0.99)),
]

(stream,) = fuse_streams(categorical, dimensional, gender, durations={"clip1": 4.0})

print(f"{stream.sample_id}: {stream.duration_s} s, {len(stream.emotion_subsegments)} sub-segments")
for sub in stream.emotion_subsegments:
    top = sorted(sub.categorical.posterior.items(), key=lambda kv: -kv[1])[:3]
    top_str = ", ".join(f"{c.value}={p:.2f}" for c, p in top)
    print(
        f"  core [{sub.core_start_s:.0f}, {sub.core_end_s:.0f}]"
        f"  argmax={sub.categorical.argmax.value:<5s} valence={sub.dimensional.valence}"
        f"  top3: {top_str}"
    )
for seg in stream.gender_subsegments:
    print(f"  gender [{seg.core_start_s:.0f}, {seg.core_end_s:.0f}] -> {seg.label.gender.value}")
