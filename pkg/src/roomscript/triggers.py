"""Event-condition-action engine: per-tick predicates, edge detection, handlers.

The engine is tick-driven rather than wall-clock-driven so runs are
deterministic. Predicates are latched atomically at the start of each tick;
handlers then run in binding insertion order, each isolated so a failing
handler rolls back only its own effects and disables its binding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .config import Thresholds
from .errors import UnknownObject, UnvalidatedHandler
from .pose import UserPose
from .scene import Scene, TriggerBinding, scene_delta
from .spatial import evaluate_predicate, pointing_target, view_frustum_objects


class EventAction(str, Enum):
    OnPointEnter = "OnPointEnter"
    OnPointExit = "OnPointExit"
    WhilePointing = "WhilePointing"
    OnLookEnter = "OnLookEnter"
    OnLookExit = "OnLookExit"
    WhileLooking = "WhileLooking"
    OnHoldEnter = "OnHoldEnter"
    OnHoldExit = "OnHoldExit"
    WhileHolding = "WhileHolding"
    OnTouchEnter = "OnTouchEnter"
    OnTouchExit = "OnTouchExit"
    WhileTouching = "WhileTouching"
    AtAllTimes = "AtAllTimes"
    # proximity sugar over AtAllTimes + near predicate
    OnNearEnter = "OnNearEnter"
    OnNearExit = "OnNearExit"
    WhileNear = "WhileNear"


EVENT_NAMES = [e.value for e in EventAction]

_FAMILY = {
    "OnPointEnter": ("point", "enter"), "OnPointExit": ("point", "exit"), "WhilePointing": ("point", "while"),
    "OnLookEnter": ("look", "enter"), "OnLookExit": ("look", "exit"), "WhileLooking": ("look", "while"),
    "OnHoldEnter": ("hold", "enter"), "OnHoldExit": ("hold", "exit"), "WhileHolding": ("hold", "while"),
    "OnTouchEnter": ("touch", "enter"), "OnTouchExit": ("touch", "exit"), "WhileTouching": ("touch", "while"),
    "OnNearEnter": ("near", "enter"), "OnNearExit": ("near", "exit"), "WhileNear": ("near", "while"),
    "AtAllTimes": ("always", "while"),
}

HandlerFn = Callable[[str], None]  # called with the bound object's name


@dataclass
class FiredEvent:
    object: str
    event: str
    handler: str

    def to_doc(self) -> dict:
        return {"object": self.object, "event": self.event, "handler": self.handler}


@dataclass
class TickReport:
    tick: int
    fired: list[FiredEvent] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)
    delta: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "tick": self.tick,
            "fired": [f.to_doc() for f in self.fired],
            "errors": self.errors,
            "delta": self.delta,
        }


class TriggerEngine:
    def __init__(self, scene: Scene, handlers: dict[str, HandlerFn] | None = None,
                 thresholds: Thresholds | None = None):
        self.scene = scene
        self.handlers = handlers if handlers is not None else {}
        self.th = thresholds or Thresholds()
        self.tick_count = 0
        self._latches: dict[tuple[str, str], bool] = {}

    # -- binding management -------------------------------------------------

    def add_trigger(self, object_name: str, event: str | EventAction,
                    handler: str) -> TriggerBinding | None:
        event = EventAction(event).value
        if self.scene.find_by_name(object_name) is None:
            raise UnknownObject(f"no object named {object_name!r}")
        if handler not in self.handlers:
            raise UnvalidatedHandler(f"handler {handler!r} is not a validated method")
        return self.scene.add_binding(object_name, event, handler)

    def remove_trigger(self, object_name: str, event: str | EventAction, handler: str) -> bool:
        return self.scene.remove_binding(object_name, EventAction(event).value, handler)

    # -- per-tick evaluation --------------------------------------------------

    def _predicate(self, family: str, obj_name: str, pose: UserPose,
                   grab: str | None, pointed: str | None, looked: set[str]) -> bool:
        if family == "always":
            return True
        obj = self.scene.find_by_name(obj_name)
        if obj is None:
            return False
        if family == "point":
            return pointed == obj_name
        if family == "look":
            return obj_name in looked
        if family == "hold":
            return grab == obj_name
        if family == "touch":
            return evaluate_predicate("touching", pose, obj, self.scene, self.th)
        if family == "near":
            return evaluate_predicate("near", pose, obj, self.scene, self.th)
        return False

    def tick(self, pose: UserPose, grab: str | None = None, dt: float = 50.0) -> TickReport:
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.tick_count += 1
        report = TickReport(tick=self.tick_count)
        before = self.scene.authoring_doc()

        bindings = sorted((b for b in self.scene.triggers if b.enabled), key=lambda b: b.index)
        families = {(b.object_name, _FAMILY[b.event][0]) for b in bindings}

        pointed = pointing_target(pose.pointing, self.scene).object_name
        looked = set(view_frustum_objects(pose, self.scene, self.th)) if any(
            fam == "look" for _, fam in families) else set()

        # latch all predicates atomically before any handler runs
        current: dict[tuple[str, str], bool] = {}
        for obj_name, family in families:
            current[(obj_name, family)] = self._predicate(family, obj_name, pose, grab, pointed, looked)

        fired_bindings: list[TriggerBinding] = []
        for b in bindings:
            family, edge = _FAMILY[b.event]
            cur = current[(b.object_name, family)]
            prev = self._latches.get((b.object_name, family), False)
            if (edge == "enter" and cur and not prev) or \
               (edge == "exit" and prev and not cur) or \
               (edge == "while" and cur):
                fired_bindings.append(b)

        for key, value in current.items():
            self._latches[key] = value

        for b in fired_bindings:
            handler = self.handlers.get(b.handler)
            checkpoint = self.scene.snapshot()
            try:
                if handler is None:
                    raise UnvalidatedHandler(f"handler {b.handler!r} disappeared")
                handler(b.object_name)
                report.fired.append(FiredEvent(b.object_name, b.event, b.handler))
            except Exception as exc:  # noqa: BLE001 - handler isolation by contract
                self.scene.restore(checkpoint)
                # the restore swapped the binding objects; disable the live one
                for live in self.scene.triggers:
                    if live.key() == b.key():
                        live.enabled = False
                report.errors.append({
                    "object": b.object_name,
                    "event": b.event,
                    "handler": b.handler,
                    "error": str(exc),
                })

        report.delta = scene_delta(before, self.scene.authoring_doc())
        return report

    # -- path simulation -------------------------------------------------------

    def simulate_path(self, waypoints: list[UserPose], ticks_per_segment: int = 10,
                      grab: str | None = None, dt: float = 50.0) -> list[TickReport]:
        if len(waypoints) < 2:
            raise ValueError("simulate_path needs at least two waypoints")
        reports = []
        for a, b in zip(waypoints, waypoints[1:]):
            for i in range(1, ticks_per_segment + 1):
                t = i / ticks_per_segment
                pose = UserPose(
                    position=a.position + (b.position - a.position).scaled(t),
                    eye_height=a.eye_height + (b.eye_height - a.eye_height) * t,
                    yaw=a.yaw + (b.yaw - a.yaw) * t,
                    pitch=a.pitch + (b.pitch - a.pitch) * t,
                    hand=b.hand if b.hand is not None else a.hand,
                    pointing=b.pointing if b.pointing is not None else a.pointing,
                )
                reports.append(self.tick(pose, grab=grab, dt=dt))
        return reports
