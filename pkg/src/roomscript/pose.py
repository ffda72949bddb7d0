"""Embodiment context: user pose and the timestamped gesture timeline."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .geometry import Ray, Vec3, forward_from_yaw, gaze_direction


@dataclass(frozen=True)
class UserPose:
    position: Vec3 = Vec3()  # feet point, y = 0 on the floor
    eye_height: float = 1.6
    yaw: float = 0.0
    pitch: float = 0.0
    hand: Vec3 | None = None
    pointing: Ray | None = None

    @property
    def eye_point(self) -> Vec3:
        return self.position + Vec3(0.0, self.eye_height, 0.0)

    @property
    def hand_point(self) -> Vec3:
        """Explicit hand position, or a default slightly ahead at chest height."""
        if self.hand is not None:
            return self.hand
        return self.position + Vec3(0.0, 1.1, 0.0) + forward_from_yaw(self.yaw).scaled(0.35)

    @property
    def gaze(self) -> Ray:
        return Ray(self.eye_point, gaze_direction(self.yaw, self.pitch))

    def moved(self, **changes) -> "UserPose":
        return replace(self, **changes)

    def to_doc(self) -> dict:
        doc = {
            "position": [self.position.x, self.position.y, self.position.z],
            "eyeHeight": self.eye_height,
            "yaw": self.yaw,
            "pitch": self.pitch,
        }
        if self.hand is not None:
            doc["hand"] = [self.hand.x, self.hand.y, self.hand.z]
        if self.pointing is not None:
            doc["pointing"] = {
                "origin": [self.pointing.origin.x, self.pointing.origin.y, self.pointing.origin.z],
                "direction": [
                    self.pointing.direction.x,
                    self.pointing.direction.y,
                    self.pointing.direction.z,
                ],
            }
        return doc

    @staticmethod
    def from_doc(doc: dict) -> "UserPose":
        pointing = None
        if doc.get("pointing"):
            pointing = Ray(Vec3.of(doc["pointing"]["origin"]), Vec3.of(doc["pointing"]["direction"]))
        return UserPose(
            position=Vec3.of(doc.get("position", (0, 0, 0))),
            eye_height=float(doc.get("eyeHeight", 1.6)),
            yaw=float(doc.get("yaw", 0.0)),
            pitch=float(doc.get("pitch", 0.0)),
            hand=Vec3.of(doc["hand"]) if doc.get("hand") else None,
            pointing=pointing,
        )


@dataclass(frozen=True)
class GestureSample:
    t: float  # milliseconds since prompt start
    ray: Ray
    pose: UserPose | None = None

    def to_doc(self) -> dict:
        return {
            "t": self.t,
            "origin": [self.ray.origin.x, self.ray.origin.y, self.ray.origin.z],
            "direction": [self.ray.direction.x, self.ray.direction.y, self.ray.direction.z],
        }


@dataclass
class GestureTimeline:
    samples: list[GestureSample] = field(default_factory=list)

    def __post_init__(self):
        for a, b in zip(self.samples, self.samples[1:]):
            if b.t < a.t:
                raise ValueError("gesture timestamps must be non-decreasing")

    def __bool__(self) -> bool:
        return bool(self.samples)

    def nearest(self, t_ms: float) -> GestureSample | None:
        best = None
        for s in self.samples:
            if best is None or abs(s.t - t_ms) < abs(best.t - t_ms):
                best = s
        return best

    def to_doc(self) -> list[dict]:
        return [s.to_doc() for s in self.samples]

    @staticmethod
    def from_doc(doc: list[dict]) -> "GestureTimeline":
        samples = [
            GestureSample(float(d["t"]), Ray(Vec3.of(d["origin"]), Vec3.of(d["direction"])))
            for d in doc
        ]
        return GestureTimeline(samples)
