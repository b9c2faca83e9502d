"""Hybrid emotion recognition: ensembling, sentiment checks, and metrics.

The categorical route averages posteriors from several recognizers; the
dimensional route contributes a valence estimate. A categorical label is
kept only when its sentiment agrees with the valence band it falls in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .labels import (
    CategoricalLabel,
    DimensionalLabel,
    EmotionCategory,
    GenderLabel,
    GenderSegment,
    LabelError,
    LabelStream,
    SentimentClass,
    SubSegmentLabel,
    ThresholdConfig,
)
from .manifest import ManifestError, _require, _posterior_from_json, iter_jsonl

POSITIVE_CATEGORIES = frozenset({EmotionCategory.HAPPY})
NEUTRAL_CATEGORIES = frozenset({EmotionCategory.NEUTRAL})
AMBIGUOUS_CATEGORIES = frozenset({EmotionCategory.SURPRISED})
NEGATIVE_CATEGORIES = frozenset(
    {
        EmotionCategory.ANGRY,
        EmotionCategory.DISGUSTED,
        EmotionCategory.FEARFUL,
        EmotionCategory.SAD,
    }
)


def sentiment_of(category: EmotionCategory) -> SentimentClass | None:
    """Sentiment bucket for a category; None for other/unknown."""
    if category in POSITIVE_CATEGORIES:
        return SentimentClass.POSITIVE
    if category in NEGATIVE_CATEGORIES:
        return SentimentClass.NEGATIVE
    if category in NEUTRAL_CATEGORIES:
        return SentimentClass.NEUTRAL
    if category in AMBIGUOUS_CATEGORIES:
        return SentimentClass.AMBIGUOUS
    return None


def ensemble_average(posteriors: Sequence[Mapping[EmotionCategory, float]]) -> CategoricalLabel:
    """Uniform average of member posteriors over a shared category set."""
    if not posteriors:
        raise LabelError("ensemble_average needs at least one posterior")
    keys = set(posteriors[0])
    for i, p in enumerate(posteriors[1:], start=2):
        if set(p) != keys:
            raise LabelError(f"posterior {i} covers different categories than posterior 1")
    n = len(posteriors)
    averaged = {cat: sum(p[cat] for p in posteriors) / n for cat in keys}
    return CategoricalLabel.from_posterior(averaged)


def is_consistent(
    category: EmotionCategory, valence: float, thresholds: ThresholdConfig
) -> bool:
    """Does the valence estimate support the categorical label?

    Positive categories need high valence, negative ones low valence,
    neutral a mid band. Ambiguous categories are always accepted; categories
    with no sentiment (other, unknown) never are.
    """
    if not 0.0 <= valence <= 1.0:
        raise LabelError(f"valence = {valence} outside [0, 1]")
    sentiment = sentiment_of(category)
    if sentiment is SentimentClass.POSITIVE:
        return valence >= thresholds.v_pos_min
    if sentiment is SentimentClass.NEGATIVE:
        return valence <= thresholds.v_neg_max
    if sentiment is SentimentClass.NEUTRAL:
        return thresholds.v_neu_min <= valence <= thresholds.v_neu_max
    if sentiment is SentimentClass.AMBIGUOUS:
        return True
    return False


def metrics(
    predicted: Sequence[Hashable], gold: Sequence[Hashable]
) -> tuple[float, float, float]:
    """(accuracy, unweighted average recall, macro F1), all in percent.

    Averages run over the classes present in gold; per-class F1 with an
    empty denominator counts as 0.
    """
    if len(predicted) != len(gold):
        raise ValueError(f"length mismatch: {len(predicted)} predictions for {len(gold)} golds")
    if not gold:
        raise ValueError("metrics need at least one instance")
    index: dict[Hashable, int] = {}
    for label in list(gold) + list(predicted):
        if label not in index:
            index[label] = len(index)
    k = len(index)
    confusion = np.zeros((k, k), dtype=np.int64)
    for p, g in zip(predicted, gold):
        confusion[index[g], index[p]] += 1
    gold_rows = sorted({index[g] for g in gold})

    accuracy = float(np.trace(confusion)) / len(gold)

    recalls = []
    f1s = []
    for row in gold_rows:
        tp = float(confusion[row, row])
        gold_count = float(confusion[row, :].sum())
        pred_count = float(confusion[:, row].sum())
        recalls.append(tp / gold_count)
        denom = gold_count + pred_count
        f1s.append(2.0 * tp / denom if denom > 0 else 0.0)
    uwa = float(np.mean(recalls))
    macro_f1 = float(np.mean(f1s))
    return accuracy * 100.0, uwa * 100.0, macro_f1 * 100.0


@dataclass(frozen=True, eq=False)
class SweepResult:
    """UWA surface over the (x, y) threshold grid."""

    grid_x: tuple[float, ...]
    grid_y: tuple[float, ...]
    uwa_percent: np.ndarray
    best: tuple[float, float, float]  # (x, y, uwa)

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid_x", tuple(self.grid_x))
        object.__setattr__(self, "grid_y", tuple(self.grid_y))
        if self.uwa_percent.shape != (len(self.grid_x), len(self.grid_y)):
            raise ValueError(
                f"uwa matrix shape {self.uwa_percent.shape} does not match grid "
                f"({len(self.grid_x)}, {len(self.grid_y)})"
            )


DEFAULT_GRID_X = tuple(round(0.40 + 0.05 * i, 2) for i in range(7))
DEFAULT_GRID_Y = tuple(round(0.30 + 0.05 * i, 2) for i in range(7))


def sweep_thresholds(
    gold_streams: Sequence[tuple[LabelStream, Sequence[EmotionCategory]]],
    grid_x: Sequence[float] = DEFAULT_GRID_X,
    grid_y: Sequence[float] = DEFAULT_GRID_Y,
) -> SweepResult:
    """UWA of consistency-surviving sub-segments at each (x, y) cell.

    Sub-segments whose predicted label fails the consistency check at a
    cell are treated as abstentions there: excluded from both prediction
    and gold before scoring. An empty cell scores 0. The best cell is the
    maximum UWA; ties resolve to the smallest x, then the smallest y.
    """
    if not grid_x or not grid_y:
        raise ValueError("threshold grids must be non-empty")
    for v in list(grid_x) + list(grid_y):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"grid value {v} outside [0, 1]")
    pairs = []
    for stream, gold in gold_streams:
        if len(gold) != len(stream.emotion_subsegments):
            raise ValueError(
                f"{stream.sample_id}: {len(gold)} gold labels for "
                f"{len(stream.emotion_subsegments)} sub-segments"
            )
        for sub, gold_cat in zip(stream.emotion_subsegments, gold):
            pairs.append((sub, gold_cat))
    if not pairs:
        raise ValueError("sweep needs at least one labeled sub-segment")

    uwa = np.zeros((len(grid_x), len(grid_y)))
    for i, x in enumerate(grid_x):
        for j, y in enumerate(grid_y):
            th = ThresholdConfig.from_xy(x, y)
            kept_pred = []
            kept_gold = []
            for sub, gold_cat in pairs:
                if is_consistent(sub.category, sub.valence, th):
                    kept_pred.append(sub.category)
                    kept_gold.append(gold_cat)
            uwa[i, j] = metrics(kept_pred, kept_gold)[1] if kept_gold else 0.0

    flat_best = int(np.argmax(uwa))  # row-major: smallest x wins ties, then smallest y
    bi, bj = divmod(flat_best, len(grid_y))
    best = (float(grid_x[bi]), float(grid_y[bj]), float(uwa[bi, bj]))
    return SweepResult(
        grid_x=tuple(float(v) for v in grid_x),
        grid_y=tuple(float(v) for v in grid_y),
        uwa_percent=uwa,
        best=best,
    )


def write_sweep_csv(path: str | Path, result: SweepResult) -> None:
    """Matrix CSV: rows are x values, columns y values, cells UWA percent."""
    path = Path(path)
    lines = ["x/y," + ",".join(f"{y:g}" for y in result.grid_y)]
    for i, x in enumerate(result.grid_x):
        lines.append(f"{x:g}," + ",".join(f"{result.uwa_percent[i, j]:.2f}" for j in range(len(result.grid_y))))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot write {path}: {exc}") from None


def write_sweep_summary(path: str | Path, result: SweepResult) -> None:
    x, y, uwa = result.best
    payload = {
        "best": {"x": x, "y": y, "uwa_percent": round(uwa, 2)},
        "grid_x": list(result.grid_x),
        "grid_y": list(result.grid_y),
    }
    try:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot write {path}: {exc}") from None


def read_gold_streams(path: str | Path) -> list[tuple[LabelStream, list[EmotionCategory]]]:
    """Label streams whose emotion sub-segments carry a ``gold`` field."""
    from .manifest import stream_from_json

    out = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        stream = stream_from_json(obj, where)
        gold = []
        for sub in obj.get("emotion_subsegments", []):
            try:
                gold.append(EmotionCategory.parse(_require(sub, "gold", where)))
            except LabelError as exc:
                raise ManifestError(f"{where}: {exc}") from None
        out.append((stream, gold))
    return out


# ---------------------------------------------------------------------------
# Fusing per-model label fragments into one stream per sample.
#
# Recognizer adapters emit one fragment per (model, window): categorical
# fragments carry a posterior, dimensional fragments carry valence/arousal/
# dominance, gender fragments carry a gender and confidence. Fragments join
# on identical core spans.


@dataclass(frozen=True)
class CategoricalFragment:
    sample_id: str
    model_id: str
    core_start_s: float
    core_end_s: float
    window_start_s: float
    window_end_s: float
    posterior: Mapping[EmotionCategory, float]


@dataclass(frozen=True)
class DimensionalFragment:
    sample_id: str
    core_start_s: float
    core_end_s: float
    window_start_s: float
    window_end_s: float
    label: DimensionalLabel


@dataclass(frozen=True)
class GenderFragment:
    sample_id: str
    core_start_s: float
    core_end_s: float
    label: GenderLabel


def read_categorical_fragments(path: str | Path) -> list[CategoricalFragment]:
    out = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        out.append(
            CategoricalFragment(
                sample_id=str(_require(obj, "sample_id", where)),
                model_id=str(_require(obj, "model_id", where)),
                core_start_s=float(_require(obj, "core_start_s", where)),
                core_end_s=float(_require(obj, "core_end_s", where)),
                window_start_s=float(_require(obj, "window_start_s", where)),
                window_end_s=float(_require(obj, "window_end_s", where)),
                posterior=_posterior_from_json(_require(obj, "posterior", where), where),
            )
        )
    return out


def read_dimensional_fragments(path: str | Path) -> list[DimensionalFragment]:
    out = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        try:
            label = DimensionalLabel(
                valence=float(_require(obj, "valence", where)),
                arousal=float(_require(obj, "arousal", where)),
                dominance=float(_require(obj, "dominance", where)),
            )
        except LabelError as exc:
            raise ManifestError(f"{where}: {exc}") from None
        out.append(
            DimensionalFragment(
                sample_id=str(_require(obj, "sample_id", where)),
                core_start_s=float(_require(obj, "core_start_s", where)),
                core_end_s=float(_require(obj, "core_end_s", where)),
                window_start_s=float(_require(obj, "window_start_s", where)),
                window_end_s=float(_require(obj, "window_end_s", where)),
                label=label,
            )
        )
    return out


def read_gender_fragments(path: str | Path) -> list[GenderFragment]:
    from .labels import Gender

    out = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        try:
            label = GenderLabel(
                gender=Gender.parse(_require(obj, "gender", where)),
                confidence=float(_require(obj, "confidence", where)),
            )
        except LabelError as exc:
            raise ManifestError(f"{where}: {exc}") from None
        out.append(
            GenderFragment(
                sample_id=str(_require(obj, "sample_id", where)),
                core_start_s=float(_require(obj, "core_start_s", where)),
                core_end_s=float(_require(obj, "core_end_s", where)),
                label=label,
            )
        )
    return out


def _span_key(start: float, end: float) -> tuple[float, float]:
    # Spans travel through JSON unchanged, so exact equality is the join key.
    return (start, end)


def fuse_streams(
    categorical: Iterable[CategoricalFragment],
    dimensional: Iterable[DimensionalFragment],
    gender: Iterable[GenderFragment],
    durations: Mapping[str, float] | None = None,
) -> list[LabelStream]:
    """Joins per-model fragments into one LabelStream per sample.

    Posteriors from all models covering the same core span are ensemble
    averaged; the dimensional fragment for that span supplies valence.
    Sample duration comes from ``durations`` when given, otherwise from the
    largest window end seen for the sample.
    """
    by_sample: dict[str, dict] = {}

    def bucket(sample_id: str) -> dict:
        return by_sample.setdefault(
            sample_id, {"categorical": {}, "dimensional": {}, "gender": [], "max_end": 0.0}
        )

    for frag in categorical:
        b = bucket(frag.sample_id)
        key = _span_key(frag.core_start_s, frag.core_end_s)
        b["categorical"].setdefault(key, []).append(frag)
        b["max_end"] = max(b["max_end"], frag.window_end_s)
    for frag in dimensional:
        b = bucket(frag.sample_id)
        key = _span_key(frag.core_start_s, frag.core_end_s)
        if key in b["dimensional"]:
            raise ManifestError(
                f"{frag.sample_id}: duplicate dimensional fragment for core "
                f"[{frag.core_start_s}, {frag.core_end_s}]"
            )
        b["dimensional"][key] = frag
        b["max_end"] = max(b["max_end"], frag.window_end_s)
    for frag in gender:
        b = bucket(frag.sample_id)
        b["gender"].append(frag)
        b["max_end"] = max(b["max_end"], frag.core_end_s)

    streams = []
    for sample_id in sorted(by_sample):
        b = by_sample[sample_id]
        subs = []
        for key in sorted(b["categorical"]):
            frags = b["categorical"][key]
            models = [f.model_id for f in frags]
            if len(set(models)) != len(models):
                raise ManifestError(
                    f"{sample_id}: duplicate categorical fragment for core "
                    f"[{key[0]}, {key[1]}]"
                )
            dim = b["dimensional"].get(key)
            if dim is None:
                raise ManifestError(
                    f"{sample_id}: no dimensional fragment for core [{key[0]}, {key[1]}]"
                )
            first = frags[0]
            for f in frags[1:]:
                if (f.window_start_s, f.window_end_s) != (first.window_start_s, first.window_end_s):
                    raise ManifestError(
                        f"{sample_id}: window mismatch across models for core "
                        f"[{key[0]}, {key[1]}]"
                    )
            subs.append(
                SubSegmentLabel(
                    core_start_s=first.core_start_s,
                    core_end_s=first.core_end_s,
                    window_start_s=first.window_start_s,
                    window_end_s=first.window_end_s,
                    categorical=ensemble_average([f.posterior for f in frags]),
                    dimensional=dim.label,
                )
            )
        orphan = set(b["dimensional"]) - set(b["categorical"])
        if orphan:
            start, end = sorted(orphan)[0]
            raise ManifestError(
                f"{sample_id}: dimensional fragment for core [{start}, {end}] "
                "has no categorical counterpart"
            )
        gender_segs = [
            GenderSegment(core_start_s=f.core_start_s, core_end_s=f.core_end_s, label=f.label)
            for f in sorted(b["gender"], key=lambda f: f.core_start_s)
        ]
        duration = (durations or {}).get(sample_id, b["max_end"])
        streams.append(
            LabelStream(
                sample_id=sample_id,
                duration_s=duration,
                emotion_subsegments=tuple(subs),
                gender_subsegments=tuple(gender_segs),
            )
        )
    return streams
