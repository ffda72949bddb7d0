"""Scalar 3D math in the room frame.

The room frame is y-up with the origin at the center of the floor.
North is +z, east is +x. Yaw is degrees measured from +z turning toward
+x (yaw 90 faces east); pitch is degrees above the horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

EPS = 1e-9


@dataclass(frozen=True)
class Vec3:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "z", float(self.z))
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"Vec3 components must be finite, got ({self.x}, {self.y}, {self.z})")

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def length(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.length()
        if n < EPS:
            raise ValueError("cannot normalize a zero vector")
        return self.scaled(1.0 / n)

    def distance_to(self, other: "Vec3") -> float:
        return (self - other).length()

    def ground(self) -> "Vec3":
        """Projection onto the floor plane."""
        return Vec3(self.x, 0.0, self.z)

    def with_y(self, y: float) -> "Vec3":
        return Vec3(self.x, y, self.z)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @staticmethod
    def of(seq) -> "Vec3":
        if isinstance(seq, Vec3):
            return seq
        x, y, z = seq
        return Vec3(float(x), float(y), float(z))


@dataclass(frozen=True)
class Euler:
    yaw: float = 0.0
    pitch: float = 0.0
    roll: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "yaw", float(self.yaw))
        object.__setattr__(self, "pitch", float(self.pitch))
        object.__setattr__(self, "roll", float(self.roll))
        if not (math.isfinite(self.yaw) and math.isfinite(self.pitch) and math.isfinite(self.roll)):
            raise ValueError("Euler angles must be finite")


@dataclass(frozen=True)
class Ray:
    origin: Vec3
    direction: Vec3

    def __post_init__(self):
        object.__setattr__(self, "direction", self.direction.normalized())

    def at(self, t: float) -> Vec3:
        return self.origin + self.direction.scaled(t)

    @staticmethod
    def toward(origin: Vec3, target: Vec3) -> "Ray":
        return Ray(origin, target - origin)


def forward_from_yaw(yaw_deg: float) -> Vec3:
    r = math.radians(yaw_deg)
    return Vec3(math.sin(r), 0.0, math.cos(r))


def right_from_yaw(yaw_deg: float) -> Vec3:
    r = math.radians(yaw_deg)
    return Vec3(math.cos(r), 0.0, -math.sin(r))


def gaze_direction(yaw_deg: float, pitch_deg: float) -> Vec3:
    ry = math.radians(yaw_deg)
    rp = math.radians(pitch_deg)
    cp = math.cos(rp)
    return Vec3(cp * math.sin(ry), math.sin(rp), cp * math.cos(ry))


def angle_between_deg(a: Vec3, b: Vec3) -> float:
    la, lb = a.length(), b.length()
    if la < EPS or lb < EPS:
        return 0.0
    c = max(-1.0, min(1.0, a.dot(b) / (la * lb)))
    return math.degrees(math.acos(c))


@dataclass(frozen=True)
class AABB:
    lo: Vec3
    hi: Vec3

    @property
    def center(self) -> Vec3:
        return Vec3((self.lo.x + self.hi.x) / 2, (self.lo.y + self.hi.y) / 2, (self.lo.z + self.hi.z) / 2)

    def closest_point(self, p: Vec3) -> Vec3:
        return Vec3(
            min(max(p.x, self.lo.x), self.hi.x),
            min(max(p.y, self.lo.y), self.hi.y),
            min(max(p.z, self.lo.z), self.hi.z),
        )

    def distance_to_point(self, p: Vec3) -> float:
        return self.closest_point(p).distance_to(p)

    def gap_to(self, other: "AABB") -> float:
        """Minimal distance between the two box surfaces (0 when overlapping)."""
        dx = max(0.0, max(self.lo.x - other.hi.x, other.lo.x - self.hi.x))
        dy = max(0.0, max(self.lo.y - other.hi.y, other.lo.y - self.hi.y))
        dz = max(0.0, max(self.lo.z - other.hi.z, other.lo.z - self.hi.z))
        return math.sqrt(dx * dx + dy * dy + dz * dz)

    def footprint_overlap(self, other: "AABB") -> float:
        """Overlap area of the two xz footprints."""
        w = min(self.hi.x, other.hi.x) - max(self.lo.x, other.lo.x)
        d = min(self.hi.z, other.hi.z) - max(self.lo.z, other.lo.z)
        if w <= 0.0 or d <= 0.0:
            return 0.0
        return w * d

    def ray_hit(self, ray: Ray) -> float | None:
        """Smallest positive ray parameter hitting this box, None on miss.

        Boxes containing the ray origin are ignored (you cannot point at
        something you are inside of).
        """
        tmin, tmax = -math.inf, math.inf
        for o, d, lo, hi in (
            (ray.origin.x, ray.direction.x, self.lo.x, self.hi.x),
            (ray.origin.y, ray.direction.y, self.lo.y, self.hi.y),
            (ray.origin.z, ray.direction.z, self.lo.z, self.hi.z),
        ):
            if abs(d) < EPS:
                if o < lo or o > hi:
                    return None
                continue
            t1, t2 = (lo - o) / d, (hi - o) / d
            if t1 > t2:
                t1, t2 = t2, t1
            tmin, tmax = max(tmin, t1), min(tmax, t2)
        if tmax < tmin:
            return None
        if tmin <= EPS:
            return None
        return tmin


def ray_floor_point(ray: Ray) -> Vec3 | None:
    """Intersection of a ray with the y=0 floor plane, None when it never lands."""
    if ray.direction.y >= -EPS:
        return None
    t = -ray.origin.y / ray.direction.y
    if t <= EPS:
        return None
    return ray.at(t).with_y(0.0)
