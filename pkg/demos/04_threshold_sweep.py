"""
Sweeping valence thresholds against gold labels
===============================================

The consistency filter has two knobs: x splits positive from negative
valence, y bounds the neutral band. Given windows with human gold labels,
the sweep scores every (x, y) cell by unweighted average recall over the
windows that survive the filter.
"""

import random
import tempfile
from pathlib import Path

from paraqa import (
    CategoricalLabel,
    DimensionalLabel,
    EmotionCategory,
    LabelStream,
    SubSegmentLabel,
)
from paraqa.fusion import sweep_thresholds, write_sweep_csv, write_sweep_summary

E = EmotionCategory
rng = random.Random(11)

# Synthetic gold: predictions are right 70% of the time, and valence
# loosely tracks the predicted sentiment, so some cells filter better
# than others.
VALENCE_BY_CATEGORY = {E.HAPPY: 0.8, E.ANGRY: 0.2, E.SAD: 0.25, E.NEUTRAL: 0.5}
CLASSES = list(VALENCE_BY_CATEGORY)

gold_streams = []
for i in range(40):
    subs, gold = [], []
    for j in range(10):
        truth = rng.choice(CLASSES)
        predicted = truth if rng.random() < 0.7 else rng.choice(CLASSES)
        posterior = {c: 0.4 / (len(E) - 1) for c in E}
        posterior[predicted] = 0.6
        valence = min(1.0, max(0.0, VALENCE_BY_CATEGORY[predicted] + rng.gauss(0.0, 0.15)))
        subs.append(
            SubSegmentLabel(
                core_start_s=2.0 * j,
                core_end_s=2.0 * (j + 1),
                window_start_s=max(0.0, 2.0 * j - 1.0),
                window_end_s=min(20.0, 2.0 * (j + 1) + 1.0),
                categorical=CategoricalLabel.from_posterior(posterior),
                dimensional=DimensionalLabel(valence, 0.5, 0.5),
            )
        )
        gold.append(truth)
    gold_streams.append((LabelStream(f"clip{i}", 20.0, tuple(subs)), gold))

result = sweep_thresholds(gold_streams)

x_best, y_best, uwa = result.best
print(f"grid: {len(result.grid_x)} x values, {len(result.grid_y)} y values")
print(f"best cell: x={x_best:g} y={y_best:g} with UWA {uwa:.2f}%")

print("\nUWA by cell (rows = x, cols = y):")
print("      " + "  ".join(f"y={y:.2f}" for y in result.grid_y))
for xi, x in enumerate(result.grid_x):
    row = "  ".join(f"{result.uwa_percent[xi, yi]:6.2f}" for yi in range(len(result.grid_y)))
    print(f"x={x:.2f} {row}")

out = Path(tempfile.mkdtemp(prefix="sweep-demo-"))
write_sweep_csv(out / "sweep.csv", result)
write_sweep_summary(out / "best.json", result)
print(f"\nwrote {out / 'sweep.csv'} and {out / 'best.json'}")
