"""Word-level enrichment: attach emotion and gender labels to transcripts.

Each word takes the label of the core span it overlaps most; exact overlap
ties go to the earlier span, and words overlapping nothing stay unknown.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, TypeVar

from .labels import (
    EmotionCategory,
    Gender,
    GenderLabel,
    LabelError,
    LabelStream,
    SPAN_EPS,
)
from .manifest import ManifestError, _require, iter_jsonl, write_jsonl

T = TypeVar("T")


@dataclass(frozen=True)
class Word:
    text: str
    start_s: float
    end_s: float

    def __post_init__(self) -> None:
        if not self.text:
            raise LabelError("word text must be non-empty")
        if not self.start_s < self.end_s:
            raise LabelError(f"word {self.text!r}: start {self.start_s} must be < end {self.end_s}")


@dataclass(frozen=True)
class EnrichedWord:
    word: Word
    emotion: EmotionCategory
    gender: GenderLabel


@dataclass(frozen=True)
class AlignedTranscript:
    sample_id: str
    words: tuple[EnrichedWord, ...]
    utterance: str = field(default="")

    def __post_init__(self) -> None:
        object.__setattr__(self, "words", tuple(self.words))
        if not self.utterance:
            object.__setattr__(self, "utterance", " ".join(w.word.text for w in self.words))


def _check_segments(segments: Sequence[tuple[float, float, T]], what: str) -> None:
    prev_end = None
    for start, end, _ in segments:
        if not start < end:
            raise ValueError(f"{what}: span [{start}, {end}] is empty or reversed")
        if prev_end is not None and start < prev_end - SPAN_EPS:
            raise ValueError(f"{what}: spans overlap or are unsorted near {start}")
        prev_end = end


def _best_overlap(
    word: Word, segments: Sequence[tuple[float, float, T]], cursor: int
) -> tuple[T | None, int]:
    """Payload with the largest overlap against the word, or None.

    ``cursor`` points at the first segment that can still matter; segments
    end before any later word starts are skipped for good, which keeps a
    full alignment linear.
    """
    while cursor < len(segments) and segments[cursor][1] <= word.start_s:
        cursor += 1
    best: T | None = None
    best_overlap = 0.0
    i = cursor
    while i < len(segments) and segments[i][0] < word.end_s:
        start, end, payload = segments[i]
        overlap = min(end, word.end_s) - max(start, word.start_s)
        if overlap > best_overlap:  # strict: ties keep the earlier span
            best, best_overlap = payload, overlap
        i += 1
    return best, cursor


def align(
    words: Sequence[Word],
    emotion_segments: Sequence[tuple[float, float, EmotionCategory]],
    gender_segments: Sequence[tuple[float, float, GenderLabel]],
) -> list[EnrichedWord]:
    """Labels each word by maximum temporal overlap against both span lists."""
    for i in range(1, len(words)):
        if words[i].start_s < words[i - 1].start_s:
            raise ValueError(f"words must be sorted by start time (index {i})")
    _check_segments(emotion_segments, "emotion segments")
    _check_segments(gender_segments, "gender segments")

    enriched = []
    e_cursor = g_cursor = 0
    for word in words:
        emotion, e_cursor = _best_overlap(word, emotion_segments, e_cursor)
        gender, g_cursor = _best_overlap(word, gender_segments, g_cursor)
        enriched.append(
            EnrichedWord(
                word=word,
                emotion=emotion if emotion is not None else EmotionCategory.UNKNOWN,
                gender=gender if gender is not None else GenderLabel(Gender.UNKNOWN, 0.0),
            )
        )
    return enriched


def emotion_spans_from_stream(stream: LabelStream) -> list[tuple[float, float, EmotionCategory]]:
    return [(s.core_start_s, s.core_end_s, s.category) for s in stream.emotion_subsegments]


def gender_spans_from_stream(stream: LabelStream) -> list[tuple[float, float, GenderLabel]]:
    return [(s.core_start_s, s.core_end_s, s.label) for s in stream.gender_subsegments]


@dataclass(frozen=True)
class TranscriptRecord:
    """Raw recognizer output: words with times, utterance optional."""

    sample_id: str
    words: tuple[Word, ...]
    utterance: str | None = None


def read_transcripts(path: str | Path) -> list[TranscriptRecord]:
    records = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        sample_id = str(_require(obj, "sample_id", where))
        where = f"{where} (sample {sample_id})"
        raw_words = _require(obj, "words", where)
        if not isinstance(raw_words, list):
            raise ManifestError(f"{where}: words must be an array")
        try:
            words = tuple(
                Word(
                    text=str(_require(w, "text", where)),
                    start_s=float(_require(w, "start_s", where)),
                    end_s=float(_require(w, "end_s", where)),
                )
                for w in raw_words
            )
        except (LabelError, TypeError, ValueError) as exc:
            if isinstance(exc, ManifestError):
                raise
            raise ManifestError(f"{where}: {exc}") from None
        utterance = obj.get("utterance")
        records.append(
            TranscriptRecord(
                sample_id=sample_id,
                words=words,
                utterance=str(utterance) if utterance is not None else None,
            )
        )
    return records


def align_transcript(record: TranscriptRecord, stream: LabelStream) -> AlignedTranscript:
    enriched = align(
        record.words,
        emotion_spans_from_stream(stream),
        gender_spans_from_stream(stream),
    )
    return AlignedTranscript(
        sample_id=record.sample_id,
        words=tuple(enriched),
        utterance=record.utterance or "",
    )


def write_aligned(path: str | Path, transcripts: Iterable[AlignedTranscript]) -> int:
    return write_jsonl(
        path,
        (
            {
                "sample_id": t.sample_id,
                "utterance": t.utterance,
                "words": [
                    {
                        "text": w.word.text,
                        "start_s": w.word.start_s,
                        "end_s": w.word.end_s,
                        "emotion": w.emotion.value,
                        "gender": w.gender.gender.value,
                    }
                    for w in t.words
                ],
            }
            for t in transcripts
        ),
    )


def read_aligned(path: str | Path) -> list[AlignedTranscript]:
    transcripts = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        sample_id = str(_require(obj, "sample_id", where))
        where = f"{where} (sample {sample_id})"
        raw_words = _require(obj, "words", where)
        if not isinstance(raw_words, list):
            raise ManifestError(f"{where}: words must be an array")
        words = []
        for w in raw_words:
            try:
                gender = Gender.parse(_require(w, "gender", where))
                words.append(
                    EnrichedWord(
                        word=Word(
                            text=str(_require(w, "text", where)),
                            start_s=float(_require(w, "start_s", where)),
                            end_s=float(_require(w, "end_s", where)),
                        ),
                        emotion=EmotionCategory.parse(_require(w, "emotion", where)),
                        # Confidence is not serialized; restore a fixed one.
                        gender=GenderLabel(gender, 0.0 if gender is Gender.UNKNOWN else 1.0),
                    )
                )
            except (LabelError, TypeError, ValueError) as exc:
                if isinstance(exc, ManifestError):
                    raise
                raise ManifestError(f"{where}: {exc}") from None
        transcripts.append(
            AlignedTranscript(
                sample_id=sample_id,
                words=tuple(words),
                utterance=str(_require(obj, "utterance", where)),
            )
        )
    return transcripts
