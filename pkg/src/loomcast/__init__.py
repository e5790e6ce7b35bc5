"""loomcast: a trigger-and-scene story engine.

Author linear stories as (trigger, scene) pairs; play them back so that
narration keywords, taps, and touch events drive both virtual assets and
networked smart devices, alone or in synchronized multi-user sessions.
"""

from .authoring import apply_edit, build_fixture, preview
from .model import (
    AnimationDefaults, AnimationPlan, NarratorMode, Scene, Step, Story, Vec3,
    WorldState, effective_state, scene_diff, validate_story,
)
from .playback import goto_scene, handle_event, start_session
from .storyfile import load_story, parse_story, serialize_story
from .triggers import ArmedTrigger, TapEvent, TouchEvent, TranscriptEvent, arm

__version__ = "0.1.0"

__all__ = [
    "AnimationDefaults", "AnimationPlan", "ArmedTrigger", "NarratorMode", "Scene",
    "Step", "Story", "TapEvent", "TouchEvent", "TranscriptEvent", "Vec3", "WorldState",
    "apply_edit", "arm", "build_fixture", "effective_state", "goto_scene",
    "handle_event", "load_story", "parse_story", "preview", "scene_diff",
    "serialize_story", "start_session", "validate_story", "__version__",
]
