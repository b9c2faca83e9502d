"""Sliding-window planning over voiced audio.

A clip of duration d is covered by cores of length t (the last core absorbs
the remainder), and each core is padded by dt of context on both sides to
form the inference window, clipped to the clip bounds. Consecutive windows
therefore overlap by 2*dt in the interior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .manifest import AudioSample, ManifestError, _require, iter_jsonl, write_jsonl


@dataclass(frozen=True)
class Window:
    window_start_s: float
    window_end_s: float
    core_start_s: float
    core_end_s: float


@dataclass(frozen=True)
class WindowPlan:
    sample_id: str
    windows: tuple[Window, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "windows", tuple(self.windows))


def plan_windows(
    duration_s: float, t_s: float, delta_t_s: float, sample_id: str = ""
) -> WindowPlan:
    """Tiles [0, duration] with cores of length t and dt context padding.

    Core j (0-based) spans [j*t, (j+1)*t], except the last which ends at
    duration. Cores tile the clip exactly: consecutive boundaries are the
    same float expression, so no gaps or overlaps appear.
    """
    if duration_s <= 0:
        raise ValueError(f"duration_s = {duration_s} must be positive")
    if t_s <= 0:
        raise ValueError(f"t_s = {t_s} must be positive")
    if delta_t_s < 0:
        raise ValueError(f"delta_t_s = {delta_t_s} must be >= 0")
    # The epsilon absorbs float overshoot in d/t when d is an exact multiple
    # of t, which would otherwise produce a sliver core.
    n = max(1, math.ceil(duration_s / t_s - 1e-9))
    windows = []
    for j in range(n):
        core_start = j * t_s
        core_end = duration_s if j == n - 1 else (j + 1) * t_s
        windows.append(
            Window(
                window_start_s=max(0.0, core_start - delta_t_s),
                window_end_s=min(duration_s, core_end + delta_t_s),
                core_start_s=core_start,
                core_end_s=core_end,
            )
        )
    return WindowPlan(sample_id=sample_id, windows=tuple(windows))


@dataclass(frozen=True)
class PlannedSample:
    """A window plan paired with the audio it applies to."""

    plan: WindowPlan
    audio_uri: str


def plan_samples(
    samples: Iterable[AudioSample], t_s: float, delta_t_s: float
) -> list[PlannedSample]:
    return [
        PlannedSample(
            plan=plan_windows(s.duration_s, t_s, delta_t_s, sample_id=s.sample_id),
            audio_uri=s.audio_uri,
        )
        for s in samples
    ]


def planned_to_json(planned: PlannedSample) -> dict:
    return {
        "sample_id": planned.plan.sample_id,
        "audio_uri": planned.audio_uri,
        "windows": [
            {
                "window_start_s": w.window_start_s,
                "window_end_s": w.window_end_s,
                "core_start_s": w.core_start_s,
                "core_end_s": w.core_end_s,
            }
            for w in planned.plan.windows
        ],
    }


def planned_from_json(obj: dict, where: str) -> PlannedSample:
    sample_id = str(_require(obj, "sample_id", where))
    where = f"{where} (sample {sample_id})"
    raw = _require(obj, "windows", where)
    if not isinstance(raw, list):
        raise ManifestError(f"{where}: windows must be an array")
    try:
        windows = tuple(
            Window(
                window_start_s=float(_require(w, "window_start_s", where)),
                window_end_s=float(_require(w, "window_end_s", where)),
                core_start_s=float(_require(w, "core_start_s", where)),
                core_end_s=float(_require(w, "core_end_s", where)),
            )
            for w in raw
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ManifestError):
            raise
        raise ManifestError(f"{where}: {exc}") from None
    return PlannedSample(
        plan=WindowPlan(sample_id=sample_id, windows=windows),
        audio_uri=str(_require(obj, "audio_uri", where)),
    )


def read_window_plans(path: str | Path) -> list[PlannedSample]:
    return [planned_from_json(obj, f"{path}:{lineno}") for lineno, obj in iter_jsonl(path)]


def write_window_plans(path: str | Path, planned: Iterable[PlannedSample]) -> int:
    return write_jsonl(path, (planned_to_json(p) for p in planned))


def samples_from_voiced_spans(path: str | Path) -> list[AudioSample]:
    """Expands voice-activity spans into per-span audio samples.

    Input lines look like ``{"sample_id", "audio_uri", "spans": [{"start_s",
    "end_s"}, ...]}``. Each span becomes its own sample; the derived URI
    carries the time range as a fragment so downstream stages can address
    the excerpt without a separate cutting step.
    """
    samples = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        sample_id = str(_require(obj, "sample_id", where))
        audio_uri = str(_require(obj, "audio_uri", where))
        raw_spans = _require(obj, "spans", where)
        if not isinstance(raw_spans, list):
            raise ManifestError(f"{where}: spans must be an array")
        for k, span in enumerate(raw_spans, start=1):
            try:
                start = float(_require(span, "start_s", where))
                end = float(_require(span, "end_s", where))
            except (TypeError, ValueError) as exc:
                if isinstance(exc, ManifestError):
                    raise
                raise ManifestError(f"{where}: {exc}") from None
            if not start < end:
                raise ManifestError(f"{where}: span {k} has start {start} >= end {end}")
            samples.append(
                AudioSample(
                    sample_id=f"{sample_id}#s{k}",
                    audio_uri=f"{audio_uri}#t={start:.3f},{end:.3f}",
                    duration_s=end - start,
                )
            )
    return samples


def resolve_audio_uris(
    samples: Iterable[AudioSample],
) -> Mapping[str, str]:
    """sample_id -> audio_uri lookup for the condenser."""
    return {s.sample_id: s.audio_uri for s in samples}
