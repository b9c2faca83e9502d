"""Label type invariants."""

import random

import pytest

from paraqa.labels import (
    CategoricalLabel,
    DimensionalLabel,
    EmotionCategory,
    Gender,
    GenderLabel,
    LabelError,
    LabelStream,
    SubSegmentLabel,
    ThresholdConfig,
    posterior_argmax,
)
from tests.conftest import make_posterior, make_subsegment, make_stream


class TestEmotionCategory:
    def test_declaration_order(self):
        assert [c.value for c in EmotionCategory] == [
            "angry",
            "disgusted",
            "fearful",
            "happy",
            "neutral",
            "other",
            "sad",
            "surprised",
            "unknown",
        ]

    def test_parse_round_trip_case_insensitive(self):
        for cat in EmotionCategory:
            assert EmotionCategory.parse(cat.value) is cat
            assert EmotionCategory.parse(cat.value.upper()) is cat
            assert EmotionCategory.parse(f"  {cat.value.title()} ") is cat

    def test_parse_rejects_unknown_names(self):
        with pytest.raises(LabelError):
            EmotionCategory.parse("joyful")


class TestCategoricalLabel:
    def test_argmax_ties_resolve_to_declaration_order(self):
        posterior = {cat: 0.0 for cat in EmotionCategory}
        posterior[EmotionCategory.SAD] = 0.5
        posterior[EmotionCategory.ANGRY] = 0.5
        assert posterior_argmax(posterior) is EmotionCategory.ANGRY

    def test_from_posterior_sets_argmax(self):
        label = CategoricalLabel.from_posterior(make_posterior(EmotionCategory.FEARFUL))
        assert label.argmax is EmotionCategory.FEARFUL

    def test_rejects_bad_sum(self):
        posterior = {cat: 0.2 for cat in EmotionCategory}
        with pytest.raises(LabelError, match="sums to"):
            CategoricalLabel.from_posterior(posterior)

    def test_rejects_out_of_range_probability(self):
        posterior = make_posterior(EmotionCategory.HAPPY)
        posterior[EmotionCategory.HAPPY] = 1.2
        posterior[EmotionCategory.SAD] -= 0.2
        with pytest.raises(LabelError):
            CategoricalLabel.from_posterior(posterior)

    def test_rejects_mismatched_argmax(self):
        posterior = make_posterior(EmotionCategory.HAPPY)
        with pytest.raises(LabelError, match="argmax"):
            CategoricalLabel(posterior=posterior, argmax=EmotionCategory.SAD)

    def test_sum_tolerance_accepts_float_noise(self):
        posterior = make_posterior(EmotionCategory.HAPPY)
        posterior[EmotionCategory.SAD] += 5e-7
        CategoricalLabel.from_posterior(posterior)

    def test_argmax_stable_under_random_posteriors(self):
        rng = random.Random(7)
        for _ in range(200):
            raw = [rng.random() for _ in EmotionCategory]
            total = sum(raw)
            posterior = {cat: v / total for cat, v in zip(EmotionCategory, raw)}
            label = CategoricalLabel.from_posterior(posterior)
            best = max(posterior.values())
            assert posterior[label.argmax] == best


class TestDimensionalLabel:
    def test_bounds(self):
        DimensionalLabel(0.0, 0.0, 0.0)
        DimensionalLabel(1.0, 1.0, 1.0)
        with pytest.raises(LabelError):
            DimensionalLabel(-0.01, 0.5, 0.5)
        with pytest.raises(LabelError):
            DimensionalLabel(0.5, 1.01, 0.5)


class TestSubSegmentLabel:
    def test_category_defaults_to_argmax(self):
        sub = make_subsegment(EmotionCategory.SAD, 0.3, 0.0, 2.0, 10.0)
        assert sub.category is EmotionCategory.SAD

    def test_explicit_category_survives(self):
        sub = make_subsegment(EmotionCategory.SAD, 0.3, 0.0, 2.0, 10.0)
        relabeled = SubSegmentLabel(
            core_start_s=sub.core_start_s,
            core_end_s=sub.core_end_s,
            window_start_s=sub.window_start_s,
            window_end_s=sub.window_end_s,
            categorical=sub.categorical,
            dimensional=sub.dimensional,
            category=EmotionCategory.UNKNOWN,
        )
        assert relabeled.category is EmotionCategory.UNKNOWN
        assert relabeled.categorical.argmax is EmotionCategory.SAD

    def test_window_must_contain_core(self):
        with pytest.raises(LabelError):
            SubSegmentLabel(
                core_start_s=1.0,
                core_end_s=3.0,
                window_start_s=1.5,
                window_end_s=4.0,
                categorical=CategoricalLabel.from_posterior(make_posterior(EmotionCategory.HAPPY)),
                dimensional=DimensionalLabel(0.5, 0.5, 0.5),
            )

    def test_core_must_be_nonempty(self):
        with pytest.raises(LabelError):
            SubSegmentLabel(
                core_start_s=2.0,
                core_end_s=2.0,
                window_start_s=1.0,
                window_end_s=3.0,
                categorical=CategoricalLabel.from_posterior(make_posterior(EmotionCategory.HAPPY)),
                dimensional=DimensionalLabel(0.5, 0.5, 0.5),
            )


class TestLabelStream:
    def test_accepts_tiled_cores(self):
        stream = make_stream("s", [(EmotionCategory.HAPPY, 0.8)] * 5)
        assert stream.duration_s == 10.0
        assert len(stream.emotion_subsegments) == 5

    def test_rejects_overlapping_cores(self):
        a = make_subsegment(EmotionCategory.HAPPY, 0.8, 0.0, 2.0, 10.0)
        b = make_subsegment(EmotionCategory.HAPPY, 0.8, 1.5, 3.5, 10.0)
        with pytest.raises(LabelError, match="overlap"):
            LabelStream("s", 10.0, emotion_subsegments=(a, b))

    def test_rejects_unsorted_cores(self):
        a = make_subsegment(EmotionCategory.HAPPY, 0.8, 4.0, 6.0, 10.0)
        b = make_subsegment(EmotionCategory.HAPPY, 0.8, 0.0, 2.0, 10.0)
        with pytest.raises(LabelError):
            LabelStream("s", 10.0, emotion_subsegments=(a, b))

    def test_rejects_spans_past_duration(self):
        sub = make_subsegment(EmotionCategory.HAPPY, 0.8, 8.0, 12.0, 12.0)
        with pytest.raises(LabelError):
            LabelStream("s", 10.0, emotion_subsegments=(sub,))

    def test_rejects_nonpositive_duration(self):
        with pytest.raises(LabelError):
            LabelStream("s", 0.0)


class TestGenderLabel:
    def test_parse(self):
        assert Gender.parse("Male") is Gender.MALE
        with pytest.raises(LabelError):
            Gender.parse("m")

    def test_confidence_bounds(self):
        GenderLabel(Gender.FEMALE, 1.0)
        with pytest.raises(LabelError):
            GenderLabel(Gender.FEMALE, 1.5)


class TestThresholdConfig:
    def test_from_xy_mirrors_bands(self):
        th = ThresholdConfig.from_xy(0.5, 0.4)
        assert th.v_pos_min == 0.5
        assert th.v_neg_max == 0.5
        assert th.v_neu_min == 0.4
        assert th.v_neu_max == pytest.approx(0.6)

    def test_inverted_neutral_band_is_an_empty_band(self):
        # y > 0.5 produces v_neu_min > v_neu_max; the sweep grid reaches
        # y = 0.6, so this must construct (neutral is then never consistent).
        th = ThresholdConfig.from_xy(0.5, 0.6)
        assert th.v_neu_min > th.v_neu_max

    def test_alpha_must_be_positive_integers(self):
        with pytest.raises(LabelError):
            ThresholdConfig.from_xy(0.5, 0.4, alpha={EmotionCategory.HAPPY: 0})
        with pytest.raises(LabelError):
            ThresholdConfig.from_xy(0.5, 0.4, alpha={EmotionCategory.HAPPY: 1.5})

    def test_alpha_rejects_unassignable_categories(self):
        with pytest.raises(LabelError):
            ThresholdConfig.from_xy(0.5, 0.4, alpha={EmotionCategory.UNKNOWN: 2})
        with pytest.raises(LabelError):
            ThresholdConfig.from_xy(0.5, 0.4, alpha={EmotionCategory.OTHER: 2})

    def test_rejects_nonpositive_tau_and_t(self):
        with pytest.raises(LabelError):
            ThresholdConfig.from_xy(0.5, 0.4, tau_s=0.0)
        with pytest.raises(LabelError):
            ThresholdConfig.from_xy(0.5, 0.4, t_s=-1.0)
        with pytest.raises(LabelError):
            ThresholdConfig.from_xy(0.5, 0.4, delta_t_s=-0.1)
