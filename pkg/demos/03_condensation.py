"""
Condensing label streams into training samples
===============================================

Three stages turn noisy per-window labels into per-sample labels:

1. drop clips shorter than tau
2. relabel windows whose emotion disagrees with their valence to unknown
3. assign a category when it occurs at least alpha times in a clip
"""

from paraqa import (
    CategoricalLabel,
    DimensionalLabel,
    EmotionCategory,
    LabelStream,
    SubSegmentLabel,
    ThresholdConfig,
    condense,
)
from paraqa.condenser import consistency_relabel, length_filter, occurrence_assign

E = EmotionCategory


def stream(sample_id, labels, t=10.0):
    # One sub-segment per (category, valence), t seconds each.
    subs = []
    for j, (cat, valence) in enumerate(labels):
        posterior = {c: 0.4 / (len(E) - 1) for c in E}
        posterior[cat] = 0.6
        subs.append(
            SubSegmentLabel(
                core_start_s=j * t,
                core_end_s=(j + 1) * t,
                window_start_s=max(0.0, j * t - 1.0),
                window_end_s=min(len(labels) * t, (j + 1) * t + 1.0),
                categorical=CategoricalLabel.from_posterior(posterior),
                dimensional=DimensionalLabel(valence, 0.5, 0.5),
            )
        )
    return LabelStream(sample_id, len(labels) * t, tuple(subs))


th = ThresholdConfig.from_xy(x=0.5, y=0.4, alpha={E.ANGRY: 2, E.SAD: 2}, tau_s=30.0)

streams = [
    # Enough angry windows, valence agrees (low valence = negative).
    stream("keeper", [(E.ANGRY, 0.1), (E.ANGRY, 0.2), (E.SAD, 0.3), (E.HAPPY, 0.9)]),
    # Long enough, but the angry windows carry happy valence -> relabelled.
    stream("mislabelled", [(E.ANGRY, 0.9), (E.ANGRY, 0.8), (E.NEUTRAL, 0.5), (E.NEUTRAL, 0.5)]),
    # Too short: two windows of 10 s < tau of 30 s.
    stream("short", [(E.SAD, 0.1), (E.SAD, 0.2)]),
]

# Stage 1: length filter.
long_enough = length_filter(streams, th.tau_s)
print("after length filter:", [s.sample_id for s in long_enough])

# Stage 2: consistency relabel, shown on the mislabelled clip.
relabelled = consistency_relabel(long_enough[1], th)
print("mislabelled window categories after relabel:",
      [sub.category.value for sub in relabelled.emotion_subsegments])

# Stage 3: occurrence threshold.
for s in long_enough:
    sample = occurrence_assign(consistency_relabel(s, th), th)
    print(f"{s.sample_id}: {sample.assigned_labels if sample else 'dropped'}")

# The one-call version runs all three stages.
print("\ncondense() ->")
for sample in condense(streams, th):
    labels = ", ".join(f"{c.value} x{n}" for c, n in sample.assigned_labels)
    print(f"  {sample.sample_id} ({sample.duration_s:.0f} s): {labels}")
