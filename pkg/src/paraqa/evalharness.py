"""Scoring speech models on a QA set with an LLM judge.

Clips longer than the speech model's input limit are probed twice, once
from the head and once from the tail, and the better judged answer counts.
Judge outputs are free text; the score is pulled out of a ``Score: <n>``
line, rescaled to a common scale, and clamped.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .llmclient import (
    ClientError,
    SpeechLLMClient,
    TextLLMClient,
    call_with_retry,
)
from .manifest import AudioSample, ManifestError, write_jsonl
from .qagen import QAPair


class ScoreParseError(ValueError):
    """No usable score found in a judge response."""


def clip_spans(duration_s: float, max_audio_s: float) -> list[tuple[float, float]]:
    """Spans to probe: the whole clip, or head and tail windows if too long."""
    if duration_s <= 0:
        raise ValueError(f"duration_s = {duration_s} must be positive")
    if max_audio_s <= 0:
        raise ValueError(f"max_audio_s = {max_audio_s} must be positive")
    if duration_s <= max_audio_s:
        return [(0.0, duration_s)]
    return [(0.0, max_audio_s), (duration_s - max_audio_s, duration_s)]


_SCORE_TAG = re.compile(r"score\s*:\s*(\d+(?:\.\d+)?)", re.IGNORECASE)
_BARE_NUMBER = re.compile(r"(?<![\w.])(\d+(?:\.\d+)?)(?![\w.])")


def parse_judge_score(
    text: str, scale_max: float, pattern: str | None = None
) -> float:
    """Extracts a numeric score from judge output and clamps it to scale.

    Looks for ``Score: <n>`` first (case-insensitive); failing that, takes
    the last standalone number in the response. A custom pattern with one
    capture group overrides the tag search.
    """
    if scale_max <= 0:
        raise ValueError(f"scale_max = {scale_max} must be positive")
    tag = re.compile(pattern, re.IGNORECASE) if pattern else _SCORE_TAG
    match = tag.search(text)
    if match:
        raw = match.group(1)
    else:
        numbers = _BARE_NUMBER.findall(text)
        if not numbers:
            raise ScoreParseError(f"no score found in judge output: {text[:200]!r}")
        raw = numbers[-1]
    try:
        value = float(raw)
    except ValueError:
        raise ScoreParseError(f"score {raw!r} is not a number") from None
    return min(max(value, 0.0), scale_max)


@dataclass(frozen=True)
class EvalConfig:
    judge_template: str  # prompt text with {question}/{reference_answer}/{model_answer}
    max_audio_s: float = 30.0
    score_scale_max: float = 100.0  # reported scale
    judge_scale_max: float = 100.0  # scale the judge is asked to use
    retries: int = 2
    backoff_s: float = 1.0
    score_pattern: str | None = None

    def __post_init__(self) -> None:
        if self.max_audio_s <= 0:
            raise ValueError(f"max_audio_s = {self.max_audio_s} must be positive")
        if self.score_scale_max <= 0 or self.judge_scale_max <= 0:
            raise ValueError("score scales must be positive")
        for slot in ("{question}", "{reference_answer}", "{model_answer}"):
            if slot not in self.judge_template:
                raise ValueError(f"judge template is missing the {slot} placeholder")


@dataclass(frozen=True)
class EvalRecord:
    """Scored answers for one QA pair; ``score`` is the better span's."""

    qa_id: str
    answer_head: str
    score_head: float
    answer_tail: str | None = None
    score_tail: float | None = None
    score: float = field(default=-1.0)

    def __post_init__(self) -> None:
        if (self.answer_tail is None) != (self.score_tail is None):
            raise ValueError(f"{self.qa_id}: tail answer and score must come together")
        expected = self.score_head if self.score_tail is None else max(self.score_head, self.score_tail)
        if self.score != expected:
            raise ValueError(f"{self.qa_id}: score {self.score} != best span score {expected}")


@dataclass(frozen=True)
class EvalSummary:
    n_scored: int
    mean_score: float
    per_category: Mapping[str, float]
    failures: tuple[tuple[str, str], ...]  # (qa_id, error)

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_category", dict(self.per_category))
        object.__setattr__(self, "failures", tuple(tuple(f) for f in self.failures))

    def to_json(self) -> dict:
        return {
            "n_scored": self.n_scored,
            "mean_score": round(self.mean_score, 4),
            "per_category": {k: round(v, 4) for k, v in sorted(self.per_category.items())},
            "failures": [{"qa_id": qa_id, "error": err} for qa_id, err in self.failures],
        }


def build_judge_prompt(template: str, question: str, reference: str, answer: str) -> str:
    prompt = template.replace("{question}", question)
    prompt = prompt.replace("{reference_answer}", reference)
    return prompt.replace("{model_answer}", answer)


def summarize(
    records: Sequence[EvalRecord],
    categories: Mapping[str, str],
    failures: Sequence[tuple[str, str]] = (),
) -> EvalSummary:
    """Aggregates records into a summary; ``categories`` maps qa_id to category."""
    cat_scores: dict[str, list[float]] = {}
    for record in records:
        cat_scores.setdefault(categories.get(record.qa_id, "other"), []).append(record.score)
    mean = sum(r.score for r in records) / len(records) if records else 0.0
    return EvalSummary(
        n_scored=len(records),
        mean_score=mean,
        per_category={k: sum(v) / len(v) for k, v in cat_scores.items()},
        failures=tuple(failures),
    )


def evaluate(
    qa_pairs: Sequence[QAPair],
    audio: Sequence[AudioSample],
    speech_client: SpeechLLMClient,
    judge_client: TextLLMClient,
    config: EvalConfig,
) -> tuple[list[EvalRecord], EvalSummary]:
    """Answers and judges every QA pair; failures are reported, not fatal.

    Records come back sorted by qa_id. The mean excludes failed pairs. A
    judge raw score on ``judge_scale_max`` is rescaled linearly to
    ``score_scale_max``.
    """
    by_sample = {a.sample_id: a for a in audio}
    records: list[EvalRecord] = []
    failures: list[tuple[str, str]] = []

    for pair in sorted(qa_pairs, key=lambda p: p.qa_id):
        clip = by_sample.get(pair.sample_id)
        if clip is None:
            raise ManifestError(f"{pair.qa_id}: sample {pair.sample_id!r} not in audio manifest")
        try:
            answers = []
            scores = []
            for start, end in clip_spans(clip.duration_s, config.max_audio_s):
                answer, _ = call_with_retry(
                    lambda s=start, e=end: speech_client.answer(clip.audio_uri, s, e, pair.question),
                    retries=config.retries,
                    backoff_s=config.backoff_s,
                )
                prompt = build_judge_prompt(
                    config.judge_template, pair.question, pair.answer, answer
                )

                def judge_once(prompt=prompt) -> float:
                    raw = judge_client.complete(prompt)
                    try:
                        return parse_judge_score(raw, config.judge_scale_max, config.score_pattern)
                    except ScoreParseError as exc:
                        # Unparseable output is retried like a transport error.
                        raise ClientError(str(exc)) from None

                raw_score, _ = call_with_retry(
                    judge_once, retries=config.retries, backoff_s=config.backoff_s
                )
                answers.append(answer)
                scores.append(raw_score * config.score_scale_max / config.judge_scale_max)
        except ClientError as exc:
            failures.append((pair.qa_id, str(exc)))
            continue
        records.append(
            EvalRecord(
                qa_id=pair.qa_id,
                answer_head=answers[0],
                score_head=scores[0],
                answer_tail=answers[1] if len(answers) > 1 else None,
                score_tail=scores[1] if len(scores) > 1 else None,
                score=max(scores),
            )
        )

    categories = {p.qa_id: p.category.value for p in qa_pairs}
    return records, summarize(records, categories, failures)


def record_to_json(record: EvalRecord) -> dict:
    return {
        "qa_id": record.qa_id,
        "answer_head": record.answer_head,
        "answer_tail": record.answer_tail,
        "score_head": record.score_head,
        "score_tail": record.score_tail,
        "score": record.score,
    }


def write_records(path: str | Path, records: Sequence[EvalRecord]) -> int:
    return write_jsonl(path, (record_to_json(r) for r in records))


def write_summary(path: str | Path, summary: EvalSummary) -> None:
    try:
        Path(path).write_text(json.dumps(summary.to_json(), indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot write {path}: {exc}") from None
