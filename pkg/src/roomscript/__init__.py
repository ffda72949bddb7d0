"""roomscript: a headless embodied scene-authoring engine.

Natural-language prompts, optionally paired with timestamped pointing
gestures, are planned, compiled to a validated scene-operation language,
staged for confirmation, and executed transactionally against a simulated
room with proxemic trigger behaviors and conversational memory.
"""

from .catalog import Catalog, ColorRGBA, ObjectKind, default_catalog
from .config import EngineConfig, Thresholds
from .geometry import AABB, Euler, Ray, Vec3
from .pose import GestureSample, GestureTimeline, UserPose
from .scene import Room, Scene, SceneObject, SceneSnapshot, TriggerBinding
from .session import Session, SessionManager
from .triggers import EventAction, TriggerEngine

__version__ = "0.1.0"

__all__ = [
    "AABB",
    "Catalog",
    "ColorRGBA",
    "EngineConfig",
    "Euler",
    "EventAction",
    "GestureSample",
    "GestureTimeline",
    "ObjectKind",
    "Ray",
    "Room",
    "Scene",
    "SceneObject",
    "SceneSnapshot",
    "Session",
    "SessionManager",
    "Thresholds",
    "TriggerBinding",
    "TriggerEngine",
    "UserPose",
    "Vec3",
    "default_catalog",
    "__version__",
]
