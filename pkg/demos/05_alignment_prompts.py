"""
Word-level enrichment and prompt assembly
=========================================

Word timestamps from a forced aligner meet the fused label stream: each
word picks up the emotion and gender of the sub-segment it overlaps most.
The enriched transcript then fills the two slots of the QA generation
prompt template.
"""

from paraqa import (
    CategoricalLabel,
    DimensionalLabel,
    EmotionCategory,
    Gender,
    GenderLabel,
    GenderSegment,
    LabelStream,
    SubSegmentLabel,
    Word,
)
from paraqa.aligner import TranscriptRecord, align_transcript
from paraqa.config import load_packaged_template
from paraqa.qagen import build_prompt

E = EmotionCategory


def sub(cat, start, end, duration):
    posterior = {c: 0.4 / (len(E) - 1) for c in E}
    posterior[cat] = 0.6
    return SubSegmentLabel(
        core_start_s=start,
        core_end_s=end,
        window_start_s=max(0.0, start - 1.0),
        window_end_s=min(duration, end + 1.0),
        categorical=CategoricalLabel.from_posterior(posterior),
        dimensional=DimensionalLabel(0.3, 0.5, 0.5),
    )


stream = LabelStream(
    "interview-7",
    duration_s=8.0,
    emotion_subsegments=(
        sub(E.NEUTRAL, 0.0, 4.0, 8.0),
        sub(E.ANGRY, 4.0, 8.0, 8.0),
    ),
    gender_subsegments=(
        GenderSegment(0.0, 8.0, GenderLabel(Gender.MALE, 0.95)),
    ),
)

words = (
    Word("they", 0.2, 0.5),
    Word("promised", 0.5, 1.1),
    Word("a", 1.1, 1.2),
    Word("refund", 1.2, 1.8),
    Word("and", 3.8, 4.5),   # straddles the boundary; angry wins on overlap
    Word("nothing", 4.5, 5.2),
    Word("arrived", 5.2, 5.9),
)
record = TranscriptRecord("interview-7", words)
transcript = align_transcript(record, stream)

for w in transcript.words:
    print(f"{w.word.text:>9s} [{w.word.start_s:.2f}-{w.word.end_s:.2f}]"
          f" emotion={w.emotion.value:<7s} gender={w.gender.gender.value}")

prompt = build_prompt(load_packaged_template("qa_generation.txt"), transcript)
print("\n--- prompt sent to the generator ---")
print(prompt)
