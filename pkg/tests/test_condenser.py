"""Stream condensation and balanced sampling."""

import random

import pytest

from paraqa.condenser import (
    SamplingError,
    balanced_sample,
    balanced_sample_by_category,
    condense,
    consistency_relabel,
    length_filter,
    occurrence_assign,
)
from paraqa.labels import CondensedSample, EmotionCategory, ThresholdConfig
from tests.conftest import make_stream

TH = ThresholdConfig.from_xy(
    0.5,
    0.4,
    alpha={
        EmotionCategory.ANGRY: 10,
        EmotionCategory.DISGUSTED: 10,
        EmotionCategory.FEARFUL: 4,
        EmotionCategory.HAPPY: 4,
        EmotionCategory.SAD: 2,
        EmotionCategory.SURPRISED: 3,
    },
)


class TestLengthFilter:
    def test_boundary_inclusive(self):
        streams = [
            make_stream("short", [(EmotionCategory.SAD, 0.2)] * 14, duration=29.9),
            make_stream("exact", [(EmotionCategory.SAD, 0.2)] * 15, duration=30.0),
            make_stream("long", [(EmotionCategory.SAD, 0.2)] * 16, duration=32.0),
        ]
        kept = length_filter(streams, 30.0)
        assert [s.sample_id for s in kept] == ["exact", "long"]

    def test_rejects_bad_tau(self):
        with pytest.raises(ValueError):
            length_filter([], 0.0)


class TestConsistencyRelabel:
    def test_inconsistent_becomes_unknown(self):
        stream = make_stream(
            "s",
            [
                (EmotionCategory.HAPPY, 0.8),  # consistent
                (EmotionCategory.HAPPY, 0.2),  # fails the positive band
                (EmotionCategory.SAD, 0.9),  # fails the negative band
                (EmotionCategory.SURPRISED, 0.1),  # ambiguous always passes
            ],
        )
        relabeled = consistency_relabel(stream, TH)
        assert [s.category for s in relabeled.emotion_subsegments] == [
            EmotionCategory.HAPPY,
            EmotionCategory.UNKNOWN,
            EmotionCategory.UNKNOWN,
            EmotionCategory.SURPRISED,
        ]

    def test_posteriors_and_spans_untouched(self):
        stream = make_stream("s", [(EmotionCategory.HAPPY, 0.2)])
        relabeled = consistency_relabel(stream, TH)
        sub = relabeled.emotion_subsegments[0]
        assert sub.categorical == stream.emotion_subsegments[0].categorical
        assert sub.core_start_s == stream.emotion_subsegments[0].core_start_s
        assert relabeled.gender_subsegments == stream.gender_subsegments

    def test_idempotent(self):
        stream = make_stream(
            "s", [(EmotionCategory.HAPPY, 0.2), (EmotionCategory.SAD, 0.3)]
        )
        once = consistency_relabel(stream, TH)
        twice = consistency_relabel(once, TH)
        assert [s.category for s in twice.emotion_subsegments] == [
            s.category for s in once.emotion_subsegments
        ]


class TestOccurrenceAssign:
    def test_counts_meet_thresholds(self):
        labels = [(EmotionCategory.SAD, 0.2)] * 2 + [(EmotionCategory.SURPRISED, 0.5)] * 3
        labels += [(EmotionCategory.NEUTRAL, 0.5)] * 10
        stream = consistency_relabel(make_stream("s", labels), TH)
        sample = occurrence_assign(stream, TH, audio_uri="corpus/s.wav")
        assert sample is not None
        assert sample.assigned_labels == (
            (EmotionCategory.SAD, 2),
            (EmotionCategory.SURPRISED, 3),
        )
        assert sample.audio_uri == "corpus/s.wav"

    def test_assigned_in_declaration_order(self):
        labels = [(EmotionCategory.SURPRISED, 0.5)] * 3 + [(EmotionCategory.FEARFUL, 0.1)] * 4
        stream = consistency_relabel(make_stream("s", labels), TH)
        sample = occurrence_assign(stream, TH)
        assert [cat for cat, _ in sample.assigned_labels] == [
            EmotionCategory.FEARFUL,
            EmotionCategory.SURPRISED,
        ]

    def test_below_threshold_yields_none(self):
        labels = [(EmotionCategory.HAPPY, 0.8)] * 3  # alpha for happy is 4
        stream = consistency_relabel(make_stream("s", labels), TH)
        assert occurrence_assign(stream, TH) is None

    def test_neutral_not_in_alpha_never_assigned(self):
        labels = [(EmotionCategory.NEUTRAL, 0.5)] * 20
        stream = consistency_relabel(make_stream("s", labels), TH)
        assert occurrence_assign(stream, TH) is None

    def test_audio_uri_defaults_to_sample_id(self):
        labels = [(EmotionCategory.SAD, 0.2)] * 2
        stream = consistency_relabel(make_stream("s77", labels), TH)
        assert occurrence_assign(stream, TH).audio_uri == "s77"

    def test_alpha_one_counts_single_occurrence(self):
        th = ThresholdConfig.from_xy(0.5, 0.4, alpha={EmotionCategory.HAPPY: 1})
        stream = consistency_relabel(make_stream("s", [(EmotionCategory.HAPPY, 0.9)]), th)
        assert occurrence_assign(stream, th).assigned_labels == ((EmotionCategory.HAPPY, 1),)


class TestCondense:
    def test_pipeline_composition(self):
        streams = [
            # Survives: 2 consistent sad cores pass alpha.
            make_stream("keep", [(EmotionCategory.SAD, 0.2)] * 2 + [(EmotionCategory.NEUTRAL, 0.5)] * 13),
            # Too short for tau.
            make_stream("short", [(EmotionCategory.SAD, 0.2)] * 14, duration=29.0),
            # All cores relabeled unknown: happy with low valence.
            make_stream("inconsistent", [(EmotionCategory.HAPPY, 0.2)] * 16),
            # Consistent but below alpha.
            make_stream("sparse", [(EmotionCategory.HAPPY, 0.9)] * 3 + [(EmotionCategory.NEUTRAL, 0.5)] * 13),
        ]
        samples = condense(streams, TH, audio_uris={"keep": "corpus/keep.wav"})
        assert [s.sample_id for s in samples] == ["keep"]
        assert samples[0].assigned_labels == ((EmotionCategory.SAD, 2),)
        assert samples[0].audio_uri == "corpus/keep.wav"


def _pool(categories, start=0, duration=45.0):
    """One single-label sample per category index."""
    samples = []
    for i, cat in enumerate(categories, start=start):
        samples.append(CondensedSample(f"p{i}", duration, ((cat, 3),), f"p{i}"))
    return samples


class TestBalancedSample:
    def test_quota_and_uniqueness(self):
        samples = _pool([EmotionCategory.SAD] * 5 + [EmotionCategory.HAPPY] * 5)
        chosen = balanced_sample(
            samples, 3, [EmotionCategory.SAD, EmotionCategory.HAPPY], seed=1
        )
        assert len(chosen) == 6
        assert len({s.sample_id for s in chosen}) == 6

    def test_deterministic_for_seed(self):
        samples = _pool([EmotionCategory.SAD] * 10)
        a = balanced_sample(samples, 4, [EmotionCategory.SAD], seed=9)
        b = balanced_sample(samples, 4, [EmotionCategory.SAD], seed=9)
        assert [s.sample_id for s in a] == [s.sample_id for s in b]
        c = balanced_sample(samples, 4, [EmotionCategory.SAD], seed=10)
        assert [s.sample_id for s in a] != [s.sample_id for s in c]

    def test_shortfall_names_category(self):
        samples = _pool([EmotionCategory.SAD] * 2)
        with pytest.raises(SamplingError, match="sad"):
            balanced_sample(samples, 3, [EmotionCategory.SAD], seed=0)

    def test_multi_label_sample_is_used_once(self):
        # Both samples carry both labels; one quota each is satisfiable.
        shared = [
            CondensedSample(
                f"m{i}",
                45.0,
                ((EmotionCategory.SAD, 3), (EmotionCategory.HAPPY, 4)),
                f"m{i}",
            )
            for i in range(2)
        ]
        chosen = balanced_sample_by_category(
            shared, 1, [EmotionCategory.SAD, EmotionCategory.HAPPY], seed=3
        )
        ids = [s.sample_id for group in chosen.values() for s in group]
        assert len(set(ids)) == 2

    def test_scarce_category_filled_first(self):
        # s0 is the only angry sample but also carries sad; processing sad
        # first could steal it. Scarcest-first keeps angry satisfiable.
        rare = CondensedSample(
            "s0", 45.0, ((EmotionCategory.ANGRY, 10), (EmotionCategory.SAD, 2)), "s0"
        )
        fillers = _pool([EmotionCategory.SAD] * 3, start=1)
        for seed in range(10):
            chosen = balanced_sample_by_category(
                [rare] + fillers, 1, [EmotionCategory.SAD, EmotionCategory.ANGRY], seed=seed
            )
            assert chosen[EmotionCategory.ANGRY][0].sample_id == "s0"
            assert chosen[EmotionCategory.SAD][0].sample_id != "s0"

    def test_duration_cap_excludes_long_samples(self):
        ok = CondensedSample("ok", 59.0, ((EmotionCategory.SAD, 2),), "ok")
        long = CondensedSample("long", 61.0, ((EmotionCategory.SAD, 2),), "long")
        chosen = balanced_sample([ok, long], 1, [EmotionCategory.SAD], seed=0, max_duration_s=60.0)
        assert [s.sample_id for s in chosen] == ["ok"]
        with pytest.raises(SamplingError):
            balanced_sample([ok, long], 2, [EmotionCategory.SAD], seed=0, max_duration_s=60.0)

    def test_duplicate_ids_collapse(self):
        dup = _pool([EmotionCategory.SAD])[0]
        with pytest.raises(SamplingError):
            balanced_sample([dup, dup], 2, [EmotionCategory.SAD], seed=0)

    def test_result_order_follows_requested_categories(self):
        samples = _pool([EmotionCategory.SAD] * 4 + [EmotionCategory.HAPPY] * 2)
        chosen = balanced_sample_by_category(
            samples, 2, [EmotionCategory.SAD, EmotionCategory.HAPPY], seed=5
        )
        assert list(chosen) == [EmotionCategory.SAD, EmotionCategory.HAPPY]

    def test_random_pools_never_violate_invariants(self):
        rng = random.Random(123)
        cats = [EmotionCategory.SAD, EmotionCategory.HAPPY, EmotionCategory.ANGRY]
        for trial in range(30):
            samples = []
            for i in range(rng.randint(6, 40)):
                labels = tuple(
                    (c, rng.randint(1, 5))
                    for c in cats
                    if rng.random() < 0.6
                )
                if not labels:
                    labels = ((EmotionCategory.SAD, 1),)
                samples.append(CondensedSample(f"r{i}", 45.0, labels, f"r{i}"))
            n = rng.randint(1, 3)
            try:
                chosen = balanced_sample_by_category(samples, n, cats, seed=trial)
            except SamplingError:
                continue
            ids = [s.sample_id for group in chosen.values() for s in group]
            assert len(ids) == len(set(ids)) == n * len(cats)
            for cat, group in chosen.items():
                for s in group:
                    assert cat in s.categories
