from __future__ import annotations

import json
import random

import pytest

from loomcast import storyfile
from loomcast.model import Severity, UNSET
from loomcast.storyfile import (
    InvalidStory, StorySchemaError, StorySemanticError, StorySyntaxError,
    parse_story, serialize_story,
)

from genstories import random_story


def _resolve_path(doc, path: str):
    """Walk a $.a[0].b path through a parsed document; raises if it is bogus."""
    assert path.startswith("$")
    node = doc
    rest = path[1:]
    while rest:
        if rest.startswith("."):
            rest = rest[1:]
            key = ""
            while rest and rest[0] not in ".[":
                key, rest = key + rest[0], rest[1:]
            if key:  # path may end at an object whose key was reported missing
                if isinstance(node, dict) and key not in node:
                    return None  # missing-key errors point one level deep
                node = node[key]
        elif rest.startswith("["):
            end = rest.index("]")
            idx = int(rest[1:end])
            rest = rest[end + 1:]
            node = node[idx]
    return node


class TestParse:
    def test_fixture_files_parse(self, fixtures_dir):
        text = (fixtures_dir / "goodnight_moon.story").read_text()
        story = parse_story(text)
        assert len(story.steps) == 11
        assert story.title == "Goodnight Moon"

    def test_empty_steps_warns(self):
        doc = {"format_version": 1, "title": "Blank", "narrator": "user",
               "devices": [], "assets": [], "initial": {"behaviors": []}, "steps": []}
        issues = []
        story = parse_story(json.dumps(doc), issues=issues)
        assert story.steps == ()
        assert any("empty story" in i.message for i in issues)

    def test_empty_keyword_phrase_is_semantic_error(self):
        doc = {"format_version": 1, "title": "Bad", "narrator": "user",
               "devices": [], "assets": [],
               "initial": {"behaviors": []},
               "steps": [{"trigger": {"type": "keyword", "phrase": ""},
                          "scene": {"behaviors": []}}]}
        with pytest.raises(StorySemanticError) as err:
            parse_story(json.dumps(doc))
        assert any(i.path.startswith("steps[0].trigger") for i in err.value.issues)

    def test_syntax_error_carries_line_and_column(self):
        with pytest.raises(StorySyntaxError) as err:
            parse_story('{\n  "format_version": 1,\n  oops\n}')
        assert err.value.line == 3
        assert err.value.column >= 1

    def test_unknown_key_rejected_in_strict_mode(self):
        doc = {"format_version": 1, "title": "X", "narrator": "user", "devices": [],
               "assets": [], "initial": {"behaviors": []}, "steps": [], "extra": 1}
        with pytest.raises(StorySchemaError) as err:
            parse_story(json.dumps(doc))
        assert "unknown key 'extra'" in str(err.value)

    def test_unknown_key_warns_in_lenient_mode(self):
        doc = {"format_version": 1, "title": "X", "narrator": "user", "devices": [],
               "assets": [], "initial": {"behaviors": []}, "steps": [], "extra": 1}
        issues = []
        parse_story(json.dumps(doc), strict=False, issues=issues)
        assert any("unknown key" in i.message and i.severity == Severity.WARNING for i in issues)

    def test_wrong_type_reports_real_path(self, fixtures_dir):
        doc = json.loads((fixtures_dir / "goodnight_moon.story").read_text())
        doc["steps"][3]["trigger"]["phrase"] = 42
        with pytest.raises(StorySchemaError) as err:
            parse_story(json.dumps(doc))
        assert err.value.path == "$.steps[3].trigger.phrase"
        assert _resolve_path(doc, err.value.path) == 42

    def test_missing_key_reports_real_path(self, fixtures_dir):
        doc = json.loads((fixtures_dir / "goodnight_moon.story").read_text())
        del doc["devices"][0]["name"]
        with pytest.raises(StorySchemaError) as err:
            parse_story(json.dumps(doc))
        assert err.value.path.startswith("$.devices[0]")
        assert _resolve_path(doc, err.value.path) is not None or "name" in str(err.value)

    def test_version_gate(self):
        doc = {"format_version": 2, "title": "X", "narrator": "user", "devices": [],
               "assets": [], "initial": {"behaviors": []}, "steps": []}
        with pytest.raises(StorySchemaError) as err:
            parse_story(json.dumps(doc))
        assert "format_version" in str(err.value)

    def test_tri_state_effect_decoding(self):
        base = {"format_version": 1, "title": "X", "narrator": "user",
                "devices": [{"id": "l", "kind": "light", "name": "L", "position": [0, 0, 0]}],
                "assets": [], "initial": {"behaviors": []}, "steps": []}
        absent = dict(base, initial={"behaviors": [{"type": "light", "device": "l", "on": True}]})
        cleared = dict(base, initial={"behaviors": [{"type": "light", "device": "l", "effect": None}]})
        named = dict(base, initial={"behaviors": [{"type": "light", "device": "l", "effect": "pulse"}]})
        assert parse_story(json.dumps(absent)).initial.behaviors[0].effect is UNSET
        assert parse_story(json.dumps(cleared)).initial.behaviors[0].effect is None
        assert parse_story(json.dumps(named)).initial.behaviors[0].effect == "pulse"


class TestSerialize:
    def test_minimal_story_document(self):
        doc = {"format_version": 1, "title": "Tiny", "narrator": "user", "devices": [],
               "assets": [], "initial": {"behaviors": []}, "steps": []}
        story = parse_story(json.dumps(doc))
        out = json.loads(serialize_story(story))
        assert list(out.keys()) == ["format_version", "title", "narrator",
                                    "devices", "assets", "initial", "steps"]

    def test_wind_and_sun_narrator_and_taps(self, wind_and_sun):
        doc = json.loads(serialize_story(wind_and_sun))
        assert doc["narrator"] == "system"
        assert all(step["trigger"]["type"] == "tap" for step in doc["steps"])

    def test_invalid_story_refused(self, goodnight_moon):
        from dataclasses import replace
        from loomcast.model import Scene, LightSet
        broken = replace(goodnight_moon, initial=Scene(behaviors=(LightSet("ghost", on=True),)))
        with pytest.raises(InvalidStory):
            serialize_story(broken)

    def test_round_trip_fixtures_fixpoint(self, all_fixtures):
        for story in all_fixtures.values():
            text = serialize_story(story)
            again = parse_story(text)
            assert again == story
            assert serialize_story(again) == text

    def test_shipped_fixtures_are_canonical_fixpoints(self, fixtures_dir):
        for name in ("goodnight_moon", "benjamin_franklin", "wind_and_sun"):
            text = (fixtures_dir / f"{name}.story").read_text()
            assert serialize_story(parse_story(text)) == text

    def test_round_trip_fuzz(self):
        rng = random.Random(20240)
        for _ in range(100):
            story = random_story(rng)
            text = serialize_story(story)
            assert parse_story(text) == story

    def test_canonical_stability_fuzz(self):
        rng = random.Random(99)
        for _ in range(30):
            story = random_story(rng)
            canonical = serialize_story(story)
            assert serialize_story(parse_story(canonical)) == canonical
