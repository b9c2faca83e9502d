"""QA pair generation from enriched transcripts.

A text LLM receives the utterance plus a word-level rendering of the
paralinguistic labels and emits QA pairs as Q:/A: tagged lines. Pairs are
parsed back out, filtered against transcript-leak keywords, and sorted
into coarse categories by ordered regex rules.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .aligner import AlignedTranscript
from .llmclient import ClientError, TextLLMClient, call_with_retry
from .manifest import ManifestError, _require, iter_jsonl, write_jsonl


class QACategory(str, Enum):
    EMOTION = "emotion"
    SPEAKERS = "speakers"
    CONTEXTUAL_REASONING = "contextual_reasoning"
    OTHER = "other"


class QASource(str, Enum):
    LLM = "llm"
    HUMAN = "human"


@dataclass(frozen=True)
class QAPair:
    sample_id: str
    qa_id: str
    question: str
    answer: str
    category: QACategory = QACategory.OTHER
    source: QASource = QASource.LLM

    def __post_init__(self) -> None:
        for name in ("sample_id", "qa_id", "question", "answer"):
            if not str(getattr(self, name)).strip():
                raise ValueError(f"{name} must be non-empty")


class TemplateError(ValueError):
    """A prompt template is missing a required placeholder."""


UTTERANCE_SLOT = "{utterance}"
WORD_DATA_SLOT = "{word_level_data}"


def word_level_lines(transcript: AlignedTranscript) -> str:
    """One line per word: ``text [start-end] emotion=..., gender=...``."""
    return "\n".join(
        f"{w.word.text} [{w.word.start_s:.2f}-{w.word.end_s:.2f}] "
        f"emotion={w.emotion.value}, gender={w.gender.gender.value}"
        for w in transcript.words
    )


def build_prompt(template: str, transcript: AlignedTranscript) -> str:
    """Substitutes the two input slots; the rest of the template is verbatim."""
    for slot in (UTTERANCE_SLOT, WORD_DATA_SLOT):
        if slot not in template:
            raise TemplateError(f"template is missing the {slot} placeholder")
    prompt = template.replace(UTTERANCE_SLOT, transcript.utterance)
    return prompt.replace(WORD_DATA_SLOT, word_level_lines(transcript))


def render_qa(pairs: Sequence[QAPair]) -> str:
    """Q:/A: blocks separated by blank lines, trailing newline included."""
    blocks = [f"Q: {p.question}\nA: {p.answer}" for p in pairs]
    return "\n\n".join(blocks) + "\n" if blocks else ""


_Q_TAG = re.compile(r"^\s*q\s*:\s*(.*)$", re.IGNORECASE)
_A_TAG = re.compile(r"^\s*a\s*:\s*(.*)$", re.IGNORECASE)


def parse_qa(text: str, sample_id: str) -> tuple[list[QAPair], list[str]]:
    """Extracts (question, answer) pairs from tagged model output.

    A pair is a Q: line later followed by an A: line; untagged lines extend
    whichever field is open, and blank lines are ignored. Questions that
    never get an answer, and answers with no question, are dropped with a
    warning rather than failing the whole response.
    """
    pairs: list[QAPair] = []
    warnings: list[str] = []
    question: str | None = None
    answer: str | None = None

    def flush() -> None:
        nonlocal question, answer
        if question is not None and answer is not None:
            if not question.strip():
                warnings.append(f"{sample_id}: dropped pair with empty question")
            elif not answer.strip():
                warnings.append(f"{sample_id}: dropped pair with empty answer")
            else:
                pairs.append(
                    QAPair(
                        sample_id=sample_id,
                        qa_id=f"{sample_id}#{len(pairs) + 1}",
                        question=question.strip(),
                        answer=answer.strip(),
                    )
                )
        elif question is not None:
            warnings.append(f"{sample_id}: question without answer: {question.strip()!r}")
        question = None
        answer = None

    for line in text.splitlines():
        q_match = _Q_TAG.match(line)
        a_match = _A_TAG.match(line)
        if q_match:
            flush()
            question = q_match.group(1)
        elif a_match:
            if question is None:
                warnings.append(f"{sample_id}: answer without question: {a_match.group(1).strip()!r}")
            elif answer is not None:
                flush()
                warnings.append(f"{sample_id}: answer without question: {a_match.group(1).strip()!r}")
            else:
                answer = a_match.group(1)
        elif line.strip():
            if answer is not None:
                answer = f"{answer} {line.strip()}"
            elif question is not None:
                question = f"{question} {line.strip()}"
            # Untagged prose before any Q: is preamble; ignore it.
    flush()
    return pairs, warnings


DEFAULT_FILTER_KEYWORDS = ("text", "transcript")


def keyword_filter(
    pairs: Sequence[QAPair], keywords: Sequence[str] = DEFAULT_FILTER_KEYWORDS
) -> tuple[list[QAPair], list[tuple[str, str]]]:
    """Drops questions that mention any keyword as a whole word.

    Matching is case-insensitive and applies to the question only; answers
    are free to mention anything. Returns (kept pairs, (qa_id, keyword)
    hits for every match on every dropped question).
    """
    if not keywords:
        raise ValueError("keywords must be non-empty")
    compiled = []
    for kw in keywords:
        if not kw or kw != kw.lower():
            raise ValueError(f"keywords must be non-empty lower-case strings, got {kw!r}")
        compiled.append((kw, re.compile(rf"\b{re.escape(kw)}\b", re.IGNORECASE)))
    kept = []
    hits = []
    for pair in pairs:
        matched = [kw for kw, pattern in compiled if pattern.search(pair.question)]
        if matched:
            hits.extend((pair.qa_id, kw) for kw in matched)
        else:
            kept.append(pair)
    return kept, hits


# Ordered: first match wins, so reasoning-about-emotion outranks plain
# emotion questions, and speaker-count/gender outranks emotion mentions.
_EMOTION_WORDS = (
    r"(?:emotion|emotions|emotional|emotionally|feel|feels|feeling|feelings|mood|tone"
    r"|angry|anger|annoyed|sad|sadness|happy|happiness|joy|fear|fearful|afraid|scared"
    r"|disgust|disgusted|surprise|surprised|neutral|calm|excited|upset|frustrated)"
)

DEFAULT_CATEGORY_RULES: tuple[tuple[QACategory, str], ...] = (
    (QACategory.CONTEXTUAL_REASONING, rf"\bwhy\b.*\b(?:sound|sounds|seem|seems|{_EMOTION_WORDS})"),
    (QACategory.CONTEXTUAL_REASONING, rf"\b(?:reason|reasons|cause|causes|because|led to)\b.*{_EMOTION_WORDS}"),
    (QACategory.CONTEXTUAL_REASONING, rf"{_EMOTION_WORDS}.*\b(?:why|reason|reasons|cause|causes)\b"),
    (QACategory.SPEAKERS, r"\bhow many\b.*\b(?:speakers?|people|persons?|voices?)\b"),
    (QACategory.SPEAKERS, rf"\bspeakers?\b.*\b(?:gender|genders|male|female|man|woman|men|women)\b"),
    (QACategory.SPEAKERS, r"\b(?:gender|genders)\b"),
    (QACategory.SPEAKERS, r"\b(?:male or female|man or woman)\b"),
    (QACategory.EMOTION, rf"{_EMOTION_WORDS}"),
)

def compile_rules(
    rules: Sequence[tuple[QACategory, str]] = DEFAULT_CATEGORY_RULES,
) -> list[tuple[QACategory, re.Pattern]]:
    compiled = []
    for i, (category, pattern) in enumerate(rules, start=1):
        category = QACategory(category)
        try:
            compiled.append((category, re.compile(pattern, re.IGNORECASE)))
        except re.error as exc:
            raise ValueError(f"category rule {i} ({category.value}): bad pattern {pattern!r}: {exc}") from None
    return compiled


def categorize(
    pairs: Sequence[QAPair], rules: Sequence[tuple[QACategory, re.Pattern]]
) -> list[QAPair]:
    """Assigns each pair the category of the first rule matching its question."""
    out = []
    for pair in pairs:
        category = QACategory.OTHER
        for rule_category, pattern in rules:
            if pattern.search(pair.question):
                category = rule_category
                break
        out.append(
            QAPair(
                sample_id=pair.sample_id,
                qa_id=pair.qa_id,
                question=pair.question,
                answer=pair.answer,
                category=category,
                source=pair.source,
            )
        )
    return out


@dataclass(frozen=True)
class GenerationReport:
    """Bookkeeping for one generation run."""

    total: int
    by_category: Mapping[str, int]
    filtered_out: int
    filter_hits: tuple[tuple[str, str], ...]
    parse_warnings: tuple[str, ...]
    failures: tuple[tuple[str, str], ...]  # (sample_id, error)
    retries: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "by_category", dict(self.by_category))
        object.__setattr__(self, "filter_hits", tuple(tuple(h) for h in self.filter_hits))
        object.__setattr__(self, "parse_warnings", tuple(self.parse_warnings))
        object.__setattr__(self, "failures", tuple(tuple(f) for f in self.failures))
        if self.total != sum(self.by_category.values()):
            raise ValueError("by_category must sum to total")

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "by_category": dict(self.by_category),
            "filtered_out": self.filtered_out,
            "filter_hits": [{"qa_id": qa_id, "keyword": kw} for qa_id, kw in self.filter_hits],
            "parse_warnings": list(self.parse_warnings),
            "failures": [{"sample_id": sid, "error": err} for sid, err in self.failures],
            "retries": self.retries,
        }


def merge_reports(reports: Sequence[GenerationReport]) -> GenerationReport:
    """Combines reports from batched runs into one."""
    if not reports:
        return GenerationReport(
            total=0,
            by_category={c.value: 0 for c in QACategory},
            filtered_out=0,
            filter_hits=(),
            parse_warnings=(),
            failures=(),
            retries=0,
        )
    by_category: dict[str, int] = {}
    for report in reports:
        for key, count in report.by_category.items():
            by_category[key] = by_category.get(key, 0) + count
    return GenerationReport(
        total=sum(r.total for r in reports),
        by_category=by_category,
        filtered_out=sum(r.filtered_out for r in reports),
        filter_hits=tuple(h for r in reports for h in r.filter_hits),
        parse_warnings=tuple(w for r in reports for w in r.parse_warnings),
        failures=tuple(f for r in reports for f in r.failures),
        retries=sum(r.retries for r in reports),
    )


def generate(
    transcripts: Sequence[AlignedTranscript],
    client: TextLLMClient,
    template: str,
    keywords: Sequence[str] = DEFAULT_FILTER_KEYWORDS,
    rules: Sequence[tuple[QACategory, re.Pattern]] | None = None,
    retries: int = 2,
    backoff_s: float = 1.0,
    workers: int = 1,
) -> tuple[list[QAPair], GenerationReport]:
    """Generates, parses, filters, and categorizes QA pairs for every sample.

    Samples run concurrently up to ``workers`` in flight; output order
    follows input order regardless. Per-sample failures (after retries) are
    recorded and skipped, but every sample failing is an error.
    """
    if rules is None:
        rules = compile_rules()
    if workers < 1:
        raise ValueError(f"workers = {workers} must be >= 1")

    def run_one(transcript: AlignedTranscript):
        prompt = build_prompt(template, transcript)
        response, attempts = call_with_retry(
            lambda: client.complete(prompt), retries=retries, backoff_s=backoff_s
        )
        return parse_qa(response, transcript.sample_id), attempts

    results: list = [None] * len(transcripts)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_one, t) for t in transcripts]
        for i, future in enumerate(futures):
            try:
                results[i] = ("ok", future.result())
            except ClientError as exc:
                results[i] = ("failed", str(exc))

    all_pairs: list[QAPair] = []
    warnings: list[str] = []
    failures: list[tuple[str, str]] = []
    total_retries = 0
    for transcript, result in zip(transcripts, results):
        status, payload = result
        if status == "failed":
            failures.append((transcript.sample_id, payload))
            continue
        (pairs, sample_warnings), attempts = payload
        all_pairs.extend(pairs)
        warnings.extend(sample_warnings)
        total_retries += attempts
    if transcripts and len(failures) == len(transcripts):
        raise ClientError(f"all {len(transcripts)} samples failed; first: {failures[0][1]}")

    kept, hits = keyword_filter(all_pairs, keywords)
    categorized = categorize(kept, rules)
    by_category = {c.value: 0 for c in QACategory}
    for pair in categorized:
        by_category[pair.category.value] += 1
    report = GenerationReport(
        total=len(categorized),
        by_category=by_category,
        filtered_out=len(all_pairs) - len(kept),
        filter_hits=tuple(hits),
        parse_warnings=tuple(warnings),
        failures=tuple(failures),
        retries=total_retries,
    )
    return categorized, report


def qa_to_json(pair: QAPair) -> dict:
    return {
        "sample_id": pair.sample_id,
        "qa_id": pair.qa_id,
        "question": pair.question,
        "answer": pair.answer,
        "category": pair.category.value,
        "source": pair.source.value,
    }


def write_qa_pairs(path: str | Path, pairs: Iterable[QAPair]) -> int:
    return write_jsonl(path, (qa_to_json(p) for p in pairs))


def read_qa_pairs(path: str | Path) -> list[QAPair]:
    pairs = []
    seen_ids = set()
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        try:
            pair = QAPair(
                sample_id=str(_require(obj, "sample_id", where)),
                qa_id=str(_require(obj, "qa_id", where)),
                question=str(_require(obj, "question", where)),
                answer=str(_require(obj, "answer", where)),
                category=QACategory(obj.get("category", QACategory.OTHER.value)),
                source=QASource(obj.get("source", QASource.LLM.value)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ManifestError):
                raise
            raise ManifestError(f"{where}: {exc}") from None
        if pair.qa_id in seen_ids:
            raise ManifestError(f"{where}: duplicate qa_id {pair.qa_id!r}")
        seen_ids.add(pair.qa_id)
        pairs.append(pair)
    return pairs


def write_report(path: str | Path, report: GenerationReport) -> None:
    try:
        Path(path).write_text(json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot write {path}: {exc}") from None
