"""JSON-Lines readers and writers for the pipeline's file formats.

Every on-disk format is one JSON object per line, UTF-8, with stable key
order on write so reruns produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

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
    SubSegmentLabel,
)


class ManifestError(ValueError):
    """A manifest file is malformed; the message names file and line."""


def iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yields (1-based line number, parsed object) for each non-blank line."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ManifestError(f"{path}:{lineno}: invalid JSON: {exc}") from None
                if not isinstance(obj, dict):
                    raise ManifestError(f"{path}:{lineno}: expected a JSON object")
                yield lineno, obj
    except OSError as exc:
        raise ManifestError(f"cannot read {path}: {exc}") from None


def write_jsonl(path: str | Path, records: Iterable[dict]) -> int:
    """Writes one compact JSON object per line; returns the record count."""
    path = Path(path)
    n = 0
    try:
        with path.open("w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, ensure_ascii=False))
                fh.write("\n")
                n += 1
    except OSError as exc:
        raise ManifestError(f"cannot write {path}: {exc}") from None
    return n


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ManifestError(f"{where}: missing field {key!r}")
    return obj[key]


def _posterior_from_json(obj: dict, where: str) -> dict[EmotionCategory, float]:
    posterior = {}
    for name, p in obj.items():
        try:
            cat = EmotionCategory.parse(name)
        except LabelError as exc:
            raise ManifestError(f"{where}: {exc}") from None
        if not isinstance(p, (int, float)) or isinstance(p, bool):
            raise ManifestError(f"{where}: posterior[{name}] is not a number")
        posterior[cat] = float(p)
    return posterior


def _posterior_to_json(label: CategoricalLabel) -> dict[str, float]:
    return {cat.value: float(p) for cat, p in sorted(label.posterior.items(), key=lambda kv: kv[0].value)}


def _emotion_subsegment_from_json(obj: dict, where: str) -> SubSegmentLabel:
    try:
        categorical = CategoricalLabel.from_posterior(
            _posterior_from_json(_require(obj, "posterior", where), where)
        )
        dimensional = DimensionalLabel(
            valence=float(_require(obj, "valence", where)),
            arousal=float(_require(obj, "arousal", where)),
            dominance=float(_require(obj, "dominance", where)),
        )
        return SubSegmentLabel(
            core_start_s=float(_require(obj, "core_start_s", where)),
            core_end_s=float(_require(obj, "core_end_s", where)),
            window_start_s=float(_require(obj, "window_start_s", where)),
            window_end_s=float(_require(obj, "window_end_s", where)),
            categorical=categorical,
            dimensional=dimensional,
        )
    except (LabelError, TypeError, ValueError) as exc:
        if isinstance(exc, ManifestError):
            raise
        raise ManifestError(f"{where}: {exc}") from None


def _gender_subsegment_from_json(obj: dict, where: str) -> GenderSegment:
    try:
        label = GenderLabel(
            gender=Gender.parse(_require(obj, "gender", where)),
            confidence=float(_require(obj, "confidence", where)),
        )
        return GenderSegment(
            core_start_s=float(_require(obj, "core_start_s", where)),
            core_end_s=float(_require(obj, "core_end_s", where)),
            label=label,
        )
    except (LabelError, TypeError, ValueError) as exc:
        if isinstance(exc, ManifestError):
            raise
        raise ManifestError(f"{where}: {exc}") from None


def stream_from_json(obj: dict, where: str) -> LabelStream:
    sample_id = str(_require(obj, "sample_id", where))
    where = f"{where} (sample {sample_id})"
    emotion = tuple(
        _emotion_subsegment_from_json(sub, where)
        for sub in obj.get("emotion_subsegments", [])
    )
    gender = tuple(
        _gender_subsegment_from_json(sub, where)
        for sub in obj.get("gender_subsegments", [])
    )
    try:
        return LabelStream(
            sample_id=sample_id,
            duration_s=float(_require(obj, "duration_s", where)),
            emotion_subsegments=emotion,
            gender_subsegments=gender,
        )
    except (LabelError, TypeError, ValueError) as exc:
        if isinstance(exc, ManifestError):
            raise
        raise ManifestError(f"{where}: {exc}") from None


def stream_to_json(stream: LabelStream) -> dict:
    return {
        "sample_id": stream.sample_id,
        "duration_s": stream.duration_s,
        "emotion_subsegments": [
            {
                "core_start_s": s.core_start_s,
                "core_end_s": s.core_end_s,
                "window_start_s": s.window_start_s,
                "window_end_s": s.window_end_s,
                "posterior": _posterior_to_json(s.categorical),
                "valence": s.dimensional.valence,
                "arousal": s.dimensional.arousal,
                "dominance": s.dimensional.dominance,
            }
            for s in stream.emotion_subsegments
        ],
        "gender_subsegments": [
            {
                "core_start_s": s.core_start_s,
                "core_end_s": s.core_end_s,
                "gender": s.label.gender.value,
                "confidence": s.label.confidence,
            }
            for s in stream.gender_subsegments
        ],
    }


def read_label_streams(path: str | Path) -> list[LabelStream]:
    return [stream_from_json(obj, f"{path}:{lineno}") for lineno, obj in iter_jsonl(path)]


def write_label_streams(path: str | Path, streams: Iterable[LabelStream]) -> int:
    return write_jsonl(path, (stream_to_json(s) for s in streams))


def sample_from_json(obj: dict, where: str) -> CondensedSample:
    sample_id = str(_require(obj, "sample_id", where))
    where = f"{where} (sample {sample_id})"
    raw_labels = _require(obj, "assigned_labels", where)
    if not isinstance(raw_labels, list):
        raise ManifestError(f"{where}: assigned_labels must be an array")
    labels = []
    for item in raw_labels:
        if not isinstance(item, dict):
            raise ManifestError(f"{where}: assigned label entries must be objects")
        try:
            cat = EmotionCategory.parse(_require(item, "category", where))
            count = int(_require(item, "count", where))
        except (LabelError, TypeError, ValueError) as exc:
            if isinstance(exc, ManifestError):
                raise
            raise ManifestError(f"{where}: {exc}") from None
        labels.append((cat, count))
    try:
        return CondensedSample(
            sample_id=sample_id,
            duration_s=float(_require(obj, "duration_s", where)),
            assigned_labels=tuple(labels),
            audio_uri=str(_require(obj, "audio_uri", where)),
        )
    except (LabelError, TypeError, ValueError) as exc:
        if isinstance(exc, ManifestError):
            raise
        raise ManifestError(f"{where}: {exc}") from None


def sample_to_json(sample: CondensedSample) -> dict:
    return {
        "sample_id": sample.sample_id,
        "duration_s": sample.duration_s,
        "assigned_labels": [
            {"category": cat.value, "count": count} for cat, count in sample.assigned_labels
        ],
        "audio_uri": sample.audio_uri,
    }


def read_condensed(path: str | Path) -> list[CondensedSample]:
    return [sample_from_json(obj, f"{path}:{lineno}") for lineno, obj in iter_jsonl(path)]


def write_condensed(path: str | Path, samples: Iterable[CondensedSample]) -> int:
    return write_jsonl(path, (sample_to_json(s) for s in samples))


@dataclass(frozen=True)
class AudioSample:
    """A pointer to one audio clip; the URI is never dereferenced here."""

    sample_id: str
    audio_uri: str
    duration_s: float

    def __post_init__(self) -> None:
        if not self.sample_id:
            raise LabelError("sample_id must be non-empty")
        if self.duration_s <= 0:
            raise LabelError(f"{self.sample_id}: duration_s must be positive")


def read_audio_manifest(path: str | Path) -> list[AudioSample]:
    samples = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        try:
            samples.append(
                AudioSample(
                    sample_id=str(_require(obj, "sample_id", where)),
                    audio_uri=str(_require(obj, "audio_uri", where)),
                    duration_s=float(_require(obj, "duration_s", where)),
                )
            )
        except (LabelError, TypeError, ValueError) as exc:
            if isinstance(exc, ManifestError):
                raise
            raise ManifestError(f"{where}: {exc}") from None
    return samples


def write_audio_manifest(path: str | Path, samples: Iterable[AudioSample]) -> int:
    return write_jsonl(
        path,
        (
            {"sample_id": s.sample_id, "audio_uri": s.audio_uri, "duration_s": s.duration_s}
            for s in samples
        ),
    )


def unique_sample_ids(ids: Sequence[str], what: str) -> None:
    """Raises if any id repeats; names the first duplicate."""
    seen = set()
    for sid in ids:
        if sid in seen:
            raise ManifestError(f"{what}: duplicate sample_id {sid!r}")
        seen.add(sid)
