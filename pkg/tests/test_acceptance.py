"""Acceptance suite: every top-level criterion at its stated scale.

Each test prints one [PASS]/[FAIL] line (run with -s to stream them).
Criteria are property- and fixture-based; everything runs at desk scale.
"""

from __future__ import annotations

import random
from contextlib import contextmanager

from loomcast import authoring, model, playback, storyfile
from loomcast.cli import main as cli_main
from loomcast.devices import autokey_decrypt, autokey_encrypt, frame_tcp, parse_frame
from loomcast.devices.base import simulated_registry
from loomcast.model import (
    DeviceCue, DeviceKind, FadeIn, FadeOut, KeywordTrigger, NarratorMode, TapTrigger,
    TouchTrigger, Translate, Vec3, effective_state, scene_diff,
)
from loomcast.session import Role, SessionHub
from loomcast.text import normalize
from loomcast.triggers import ArmedTrigger, TapEvent, TouchEvent, TranscriptEvent
from loomcast.model import AnimationDefaults

from genstories import random_story
from oracles import fold_plan, naive_replay


@contextmanager
def criterion(label: str):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {label}")
        raise
    print(f"[PASS] {label}")


def test_a1_goodnight_moon_fixture(goodnight_moon, fixtures_dir, capsys):
    with criterion("A1 Goodnight Moon: 11 steps, full-transcript replay, Table values"):
        assert len(goodnight_moon.steps) == 11

        code = cli_main(["play", str(fixtures_dir / "goodnight_moon.story"), "--simulate",
                         "--transcript", str(fixtures_dir / "goodnight_moon.transcript")])
        out = capsys.readouterr().out
        assert code == 0
        assert out.count("-> scene") == 11
        assert "story finished after 11 transitions" in out

        scene0 = effective_state(goodnight_moon, 0)
        assert scene0.lights["lamp"].brightness_pct == 20  # Table: exact value
        scene2 = effective_state(goodnight_moon, 2)
        assert scene2.speakers["speaker"].playing == "lullaby"  # Table: exact value


def test_a2_benjamin_franklin_fixture(benjamin_franklin):
    with criterion("A2 Benjamin Franklin: 6 steps, touch fires flickering, multi-behavior scene"):
        assert len(benjamin_franklin.steps) == 6
        assert isinstance(benjamin_franklin.steps[5].trigger, TouchTrigger)
        assert benjamin_franklin.steps[5].trigger.threshold_m == 0.05

        registry = simulated_registry(benjamin_franklin)
        session = playback.start_session(benjamin_franklin, registry)
        for step in benjamin_franklin.steps[:5]:
            assert isinstance(step.trigger, KeywordTrigger)
            playback.handle_event(session, TranscriptEvent(step.trigger.phrase))
        key_pos = session.world.assets["key"].position
        touch = Vec3(key_pos.x + 0.04, key_pos.y + 0.1, key_pos.z)  # within 0.05 m of bounds
        result = playback.handle_event(session, TouchEvent(touch))
        assert result is not None and result.finished
        cues = [e for e in result.plan if isinstance(e, DeviceCue)]
        assert DeviceCue("light", DeviceKind.LIGHT, {"effect": "flickering"}) in cues

        multi = [s for s in benjamin_franklin.steps if len(s.scene.behaviors) >= 2]
        assert multi
        cloud_scene = benjamin_franklin.steps[1].scene
        assert any(isinstance(b, model.FanSet) and b.on for b in cloud_scene.behaviors)
        assert any(isinstance(b, model.AssetPlace) and b.asset == "cloud" for b in cloud_scene.behaviors)


def test_a3_wind_and_sun_fixture(wind_and_sun):
    with criterion("A3 Wind and the Sun: system narrator, all taps, anchored wind, verbatim narration"):
        assert wind_and_sun.narrator_mode == NarratorMode.SYSTEM
        assert all(isinstance(s.trigger, TapTrigger) for s in wind_and_sun.steps)
        assert effective_state(wind_and_sun, 0).assets["wind"].anchor == "fan"

        registry = simulated_registry(wind_and_sun)
        session = playback.start_session(wind_and_sun, registry)
        narrations = []
        while not session.finished:
            result = playback.handle_event(session, TapEvent())
            narrations.append(result.narration_to_speak)
        speaker = registry.driver("speaker")
        assert speaker.spoken == [wind_and_sun.initial.narration] + narrations


def test_a4_fold_oracle(all_fixtures):
    with criterion("A4 Fold oracle: effective_state == independent sequential replay, all k"):
        for name, story in all_fixtures.items():
            for k in range(-1, len(story.steps)):
                produced = model.world_as_dict(effective_state(story, k))
                assert produced == naive_replay(story, k), (name, k)


def test_a5_trigger_matcher_properties(all_fixtures):
    with criterion("A5 Trigger matcher: 1,000 chunk splits, non-armed phrases never fire, idempotence"):
        rng = random.Random(20260809)

        # Chunk-invariance over 1,000 random token-boundary splits of fixture transcripts.
        cases = []
        for name in ("goodnight_moon", "benjamin_franklin"):
            story = all_fixtures[name]
            transcript = authoring.fixture_transcript(name)
            lines = [l for l in transcript.splitlines() if l and not l.startswith("@touch")]
            phrases = [s.trigger.phrase for s in story.steps if isinstance(s.trigger, KeywordTrigger)]
            cases.append((phrases, lines))
        for _ in range(1000):
            phrases, lines = cases[rng.randrange(len(cases))]
            phrase = rng.choice(phrases)
            line = rng.choice(lines)
            words = line.split()
            cuts = sorted(rng.sample(range(1, len(words)), rng.randint(0, min(4, len(words) - 1))))
            chunks, start = [], 0
            for cut in cuts + [len(words)]:
                chunks.append(" ".join(words[start:cut]))
                start = cut

            whole = ArmedTrigger(KeywordTrigger(phrase), tuple(normalize(phrase)))
            whole.feed(TranscriptEvent(line))
            split = ArmedTrigger(KeywordTrigger(phrase), tuple(normalize(phrase)))
            for chunk in chunks:
                split.feed(TranscriptEvent(chunk))
            assert split.fired == whole.fired, (phrase, chunks)

        # Feeding any non-armed step's keyword never fires the armed one.
        for story in all_fixtures.values():
            phrases = [s.trigger.phrase for s in story.steps if isinstance(s.trigger, KeywordTrigger)]
            for j, armed_phrase in enumerate(phrases):
                armed = ArmedTrigger(KeywordTrigger(armed_phrase), tuple(normalize(armed_phrase)))
                for k, other in enumerate(phrases):
                    if k != j:
                        assert not armed.feed(TranscriptEvent(other)), (armed_phrase, other)

        # Normalization idempotence, against fixture text and random strings.
        samples = ["Goodnight, RED Balloon!", "small, cozy room", ""]
        alphabet = "abcXYZ 123 ,.!?'-éßİ "
        samples += ["".join(rng.choice(alphabet) for _ in range(rng.randint(0, 40)))
                    for _ in range(500)]
        for text in samples:
            once = normalize(text)
            assert normalize(" ".join(once)) == once


def test_a6_codec_properties():
    with criterion("A6 Codec: involution over 10^4 strings, known vector, frame round-trip"):
        assert autokey_encrypt(b"hello") == bytes.fromhex("c3a6caa6c9")
        rng = random.Random(171)
        for _ in range(10_000):
            data = rng.randbytes(rng.randint(0, 96))
            assert autokey_decrypt(autokey_encrypt(data)) == data
        for _ in range(500):
            payload = rng.randbytes(rng.randint(0, 256))
            parsed, rest = parse_frame(frame_tcp(payload))
            assert parsed == payload and rest == b""


def test_a7_format_round_trip(all_fixtures, fixtures_dir):
    with criterion("A7 Format: parse/serialize identity on 500 stories, fixtures are fixpoints"):
        rng = random.Random(500500)
        for _ in range(500):
            story = random_story(rng)
            assert storyfile.parse_story(storyfile.serialize_story(story)) == story
        for name in all_fixtures:
            shipped = (fixtures_dir / f"{name}.story").read_text()
            assert storyfile.serialize_story(storyfile.parse_story(shipped)) == shipped


def test_a8_session_convergence(goodnight_moon, wind_and_sun):
    with criterion("A8 Sessions: late joiner converges; 100 concurrent claim trials, one narrator"):
        import threading

        # A client joining at cursor 3 converges with one present from the start.
        hub = SessionHub()
        sid = hub.create(goodnight_moon)
        early_messages: list[dict] = []
        hub.join(sid, "early", early_messages.append)
        hub.claim_role(sid, "early", Role("narrator"))
        lines = authoring.fixture_transcript("goodnight_moon").splitlines()
        for line in lines[:4]:
            hub.submit_event(sid, "early", TranscriptEvent(line, "early"))
        late_messages: list[dict] = []
        hub.join(sid, "late", late_messages.append)
        assert late_messages[0]["cursor"] == 3
        for line in lines[4:]:
            hub.submit_event(sid, "early", TranscriptEvent(line, "early"))

        def folded(messages: list[dict]) -> dict:
            world = next(m for m in messages if m["type"] == "snapshot")["world"]
            for m in messages:
                if m["type"] == "transition":
                    world = fold_plan(world, m["plan"])
            return world

        expected = model.world_as_dict(effective_state(goodnight_moon, 10))
        assert folded(early_messages) == folded(late_messages) == expected

        # Concurrent narrator claims: exactly one owner, 100 randomized trials.
        rng = random.Random(4321)
        for _ in range(100):
            trial_hub = SessionHub()
            trial_sid = trial_hub.create(wind_and_sun)
            n = rng.randint(2, 8)
            for i in range(n):
                trial_hub.join(trial_sid, f"c{i}", lambda m: None)
            wins: list[str] = []
            barrier = threading.Barrier(n)

            def claim(cid: str) -> None:
                barrier.wait()
                ok, _ = trial_hub.claim_role(trial_sid, cid, Role("narrator"))
                if ok:
                    wins.append(cid)

            threads = [threading.Thread(target=claim, args=(f"c{i}",)) for i in range(n)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            assert len(wins) == 1


def test_a9_animation_synthesis(goodnight_moon):
    with criterion("A9 Animation synthesis: fade-in/out and translate with exact endpoints"):
        # The balloon case from the Table: scene 1 has no balloon, scene 2 does.
        prev = effective_state(goodnight_moon, 0)
        nxt = effective_state(goodnight_moon, 1)
        plan = scene_diff(prev, nxt)
        fades = [e for e in plan if isinstance(e, FadeIn)]
        assert [f.asset for f in fades] == ["red_balloon"]
        assert fades[0].state.position == Vec3(1.0, 2.0, 0.0)

        # Randomized consecutive scene pairs, classified field by field.
        rng = random.Random(909)
        checked = {"fade_in": 0, "fade_out": 0, "translate": 0}
        for _ in range(120):
            story = random_story(rng)
            prev = effective_state(story, -1)
            for k in range(len(story.steps)):
                nxt = effective_state(story, k)
                plan = scene_diff(prev, nxt, AnimationDefaults())
                planned = {getattr(e, "asset", None): e for e in plan
                           if not isinstance(e, DeviceCue)}
                for ref in prev.assets:
                    a, b = prev.assets[ref], nxt.assets[ref]
                    if not a.present and b.present:
                        effect = planned[ref]
                        assert isinstance(effect, FadeIn) and effect.state == b
                        checked["fade_in"] += 1
                    elif a.present and not b.present:
                        assert isinstance(planned[ref], FadeOut)
                        checked["fade_out"] += 1
                    elif a.present and b.present and a.position != b.position:
                        effect = planned[ref]
                        assert isinstance(effect, Translate)
                        assert effect.from_pos == a.position
                        assert effect.to_pos == b.position
                        checked["translate"] += 1
                    elif a == b:
                        assert ref not in planned
                assert model.apply_plan(prev, plan) == nxt
                prev = nxt
        assert all(count > 10 for count in checked.values()), checked
