from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from loomcast.model import (
    KeywordTrigger, TapTrigger, TouchTrigger, Vec3, effective_state,
)
from loomcast.text import normalize
from loomcast.triggers import (
    ArmedTrigger, TapEvent, TouchEvent, TouchTargetAbsent, TranscriptEvent, arm,
)


class TestNormalize:
    def test_table_keyword(self):
        assert normalize("small, cozy room") == ["small", "cozy", "room"]

    def test_empty(self):
        assert normalize("") == []

    def test_case_and_punctuation(self):
        assert normalize("Goodnight, RED Balloon!") == ["goodnight", "red", "balloon"]

    def test_numerals_kept(self):
        assert normalize("scene 2 begins") == ["scene", "2", "begins"]

    @given(st.text(max_size=80))
    def test_idempotent(self, text):
        once = normalize(text)
        assert normalize(" ".join(once)) == once


class TestArm:
    def test_keyword_window_capacity(self, goodnight_moon):
        world = effective_state(goodnight_moon, -1)
        armed = arm(KeywordTrigger("red balloon"), world)
        assert armed._window.maxlen == 2

    def test_touch_bounds_centered_on_target(self, benjamin_franklin):
        world = effective_state(benjamin_franklin, 4)  # key placed in step 4
        catalog = {a.id: a for a in benjamin_franklin.assets}
        armed = arm(TouchTrigger("key", 0.05), world, catalog)
        assert armed._center == Vec3(0.4, 1.2, 0.1)
        assert armed._half == 0.1

    def test_touch_absent_target_raises(self, benjamin_franklin):
        world = effective_state(benjamin_franklin, -1)
        with pytest.raises(TouchTargetAbsent):
            arm(TouchTrigger("key"), world, {a.id: a for a in benjamin_franklin.assets})

    def test_tap_has_no_auxiliary_state(self, goodnight_moon):
        armed = arm(TapTrigger(), effective_state(goodnight_moon, -1))
        assert armed._center is None


def _keyword(phrase: str) -> ArmedTrigger:
    return ArmedTrigger(KeywordTrigger(phrase), phrase_tokens=tuple(normalize(phrase)))


class TestFeed:
    def test_keyword_fires_inside_sentence(self):
        armed = _keyword("red balloon")
        assert armed.feed(TranscriptEvent("there was a red balloon"))

    def test_window_spans_utterances(self):
        armed = _keyword("red balloon")
        assert not armed.feed(TranscriptEvent("there was a red"))
        assert armed.feed(TranscriptEvent("balloon floating by"))

    def test_substring_does_not_fire(self):
        armed = _keyword("small room")
        assert not armed.feed(TranscriptEvent("the smallest room around"))

    def test_wrong_kind_events_stay_pending(self):
        armed = _keyword("red balloon")
        assert not armed.feed(TapEvent())
        assert not armed.feed(TouchEvent(Vec3(0, 0, 0)))
        tap = ArmedTrigger(TapTrigger())
        assert not tap.feed(TranscriptEvent("tap tap tap"))
        assert tap.feed(TapEvent())

    def test_tap_liveness_after_noise(self):
        tap = ArmedTrigger(TapTrigger())
        for _ in range(5):
            assert not tap.feed(TranscriptEvent("chatter chatter"))
        assert tap.feed(TapEvent())

    def test_touch_inside_and_outside_threshold(self):
        armed = ArmedTrigger(TouchTrigger("key", threshold_m=0.05),
                             bounds_center=Vec3(0.4, 1.2, 0.1), bounds_half_extent=0.1)
        assert armed.feed(TouchEvent(Vec3(0.4, 1.25, 0.1)))
        armed = ArmedTrigger(TouchTrigger("key", threshold_m=0.05),
                             bounds_center=Vec3(0.4, 1.2, 0.1), bounds_half_extent=0.1)
        assert not armed.feed(TouchEvent(Vec3(1.4, 1.2, 0.1)))

    def test_touch_oracle_randomized(self):
        # Oracle: per-axis |p - c| <= half + threshold.
        rng = random.Random(5)
        center = Vec3(0.4, 1.2, 0.1)
        half, threshold = 0.1, 0.05
        for _ in range(300):
            point = Vec3(*(c + rng.uniform(-0.4, 0.4) for c in center))
            expected = all(abs(p - c) <= half + threshold for p, c in zip(point, center))
            armed = ArmedTrigger(TouchTrigger("key", threshold_m=threshold),
                                 bounds_center=center, bounds_half_extent=half)
            assert armed.feed(TouchEvent(point)) == expected

    def test_non_finite_touch_ignored(self):
        armed = ArmedTrigger(TouchTrigger("key", threshold_m=10.0),
                             bounds_center=Vec3(0, 0, 0), bounds_half_extent=1.0)
        assert not armed.feed(TouchEvent(Vec3(float("nan"), 0.0, 0.0)))


class TestChunkInvariance:
    def _outcome_feeding_chunks(self, phrase: str, chunks: list[str]) -> bool:
        armed = _keyword(phrase)
        fired = False
        for chunk in chunks:
            fired = armed.feed(TranscriptEvent(chunk)) or fired
        return fired

    def test_any_token_split_matches_whole_utterance(self, goodnight_moon):
        rng = random.Random(1234)
        lines = [step.scene.narration for step in goodnight_moon.steps]
        phrases = [step.trigger.phrase for step in goodnight_moon.steps]
        for _ in range(200):
            idx = rng.randrange(len(lines))
            words = lines[idx].split()
            whole = self._outcome_feeding_chunks(phrases[idx], [lines[idx]])
            cuts = sorted(rng.sample(range(1, len(words)), rng.randint(0, min(3, len(words) - 1))))
            chunks, start = [], 0
            for cut in cuts + [len(words)]:
                chunks.append(" ".join(words[start:cut]))
                start = cut
            assert self._outcome_feeding_chunks(phrases[idx], chunks) == whole

    def test_single_armed_other_phrases_never_fire(self, goodnight_moon):
        phrases = [step.trigger.phrase for step in goodnight_moon.steps]
        for j, armed_phrase in enumerate(phrases):
            armed = _keyword(armed_phrase)
            for k, other in enumerate(phrases):
                if k == j:
                    continue
                assert not armed.feed(TranscriptEvent(other)), (j, k)
