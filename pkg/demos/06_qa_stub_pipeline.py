"""
QA generation and judged evaluation, end to end on stubs
========================================================

The generation and evaluation stages talk to LLMs only through two small
client interfaces, so the whole flow runs offline against the scripted
stub clients. Swap in the HTTP clients for a real run.
"""

from paraqa import AlignedTranscript, EnrichedWord, Word
from paraqa.config import load_packaged_template
from paraqa.evalharness import EvalConfig, evaluate
from paraqa.labels import EmotionCategory, Gender, GenderLabel
from paraqa.llmclient import StubSpeechClient, StubTextClient
from paraqa.manifest import AudioSample
from paraqa.qagen import generate

E = EmotionCategory


def enriched(text, start, end, emotion):
    return EnrichedWord(Word(text, start, end), emotion, GenderLabel(Gender.FEMALE, 0.9))


transcript = AlignedTranscript(
    "callcenter-3",
    words=(
        enriched("where", 0.0, 0.3, E.ANGRY),
        enriched("is", 0.3, 0.5, E.ANGRY),
        enriched("my", 0.5, 0.7, E.ANGRY),
        enriched("order", 0.7, 1.2, E.ANGRY),
    ),
)

# The stub generator returns a canned completion whenever the prompt
# contains the utterance. One pair leaks the word "transcript", so the
# keyword filter drops it.
completion = """\
Q: Why does the speaker sound angry in this clip?
A: Their order has not arrived.

Q: What is written in the transcript?
A: A complaint about an order.

Q: How many speakers take part?
A: One.
"""
generator = StubTextClient(responses={"where is my order": completion})

pairs, report = generate([transcript], generator, load_packaged_template("qa_generation.txt"))

print(f"kept {report.total} pairs, filtered {report.filtered_out}")
for qa_id, keyword in report.filter_hits:
    print(f"  dropped {qa_id}: question contains {keyword!r}")
for pair in pairs:
    print(f"  {pair.qa_id} [{pair.category.value}] {pair.question}")

# Evaluation: a speech model answers each question from the audio span,
# a judge text model scores the answer against the reference.
speech = StubSpeechClient()
judge = StubTextClient(default="Score: 72")
config = EvalConfig(judge_template=load_packaged_template("judge_prompt1.txt"))
audio = [AudioSample("callcenter-3", "audio/callcenter-3.wav", duration_s=12.0)]

records, summary = evaluate(pairs, audio, speech, judge, config)

print(f"\nscored {summary.n_scored} answers, mean {summary.mean_score:.2f}")
for record in records:
    print(f"  {record.qa_id}: score {record.score:.0f} <- {record.answer_head}")
