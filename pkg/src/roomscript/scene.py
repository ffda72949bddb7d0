"""Scene graph: room model, objects, gravity settling, snapshots, canonical JSON.

Conventions:
- origin (0, 0, 0) is the center of the room floor
- free-standing objects anchor at their bottom center, so the occupied box at
  zero rotation is [x-w/2, x+w/2] x [y, y+h] x [z-d/2, z+d/2]
- wall-mounted objects anchor at the back-face center at mid-height
- rotation is stored but never rotates the box used for settling/overlap
  (axis-aligned approximation)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .catalog import Catalog, ColorRGBA, default_catalog
from .errors import (
    DuplicateName,
    NotWallMountable,
    OutOfRoom,
    RangeError,
    UnknownObject,
)
from .geometry import AABB, EPS, Euler, Vec3, forward_from_yaw
from .pose import UserPose

WALL_IDS = ("north", "south", "east", "west")

# wall id -> (axis of the wall plane, plane sign, inward-facing yaw)
_WALL_FRAME = {
    "north": ("z", 1.0, 180.0),
    "south": ("z", -1.0, 0.0),
    "east": ("x", 1.0, 270.0),
    "west": ("x", -1.0, 90.0),
}


def _num(x: float) -> float:
    v = round(float(x), 9)
    return 0.0 if v == 0.0 else v


@dataclass
class Wall:
    id: str
    color: ColorRGBA = ColorRGBA(0.85, 0.85, 0.85)


@dataclass
class Room:
    width: float = 4.0
    depth: float = 4.0
    height: float = 3.0
    walls: dict[str, Wall] = field(default_factory=lambda: {w: Wall(w) for w in WALL_IDS})

    def contains_footprint(self, p: Vec3) -> bool:
        return abs(p.x) <= self.width / 2 + EPS and abs(p.z) <= self.depth / 2 + EPS

    def wall_plane(self, wall_id: str) -> tuple[str, float]:
        axis, sign, _ = _WALL_FRAME[wall_id]
        extent = self.width if axis == "x" else self.depth
        return axis, sign * extent / 2

    def wall_inward_yaw(self, wall_id: str) -> float:
        return _WALL_FRAME[wall_id][2]

    def wall_lateral_extent(self, wall_id: str) -> float:
        axis, _, _ = _WALL_FRAME[wall_id]
        # the lateral axis is the one orthogonal to the wall plane axis
        return self.depth if axis == "x" else self.width

    def to_doc(self) -> dict:
        return {
            "width": _num(self.width),
            "depth": _num(self.depth),
            "height": _num(self.height),
            "walls": [
                {"id": w.id, "color": _color_doc(w.color)} for w in self.walls.values()
            ],
        }


@dataclass
class SceneObject:
    id: str
    name: str
    kind: str
    position: Vec3
    rotation: Euler = Euler()
    size: Vec3 = Vec3(0.5, 0.5, 0.5)  # (w, h, d)
    color: ColorRGBA = ColorRGBA(1, 1, 1)
    illuminated: bool = False
    luminous_intensity: float = 5.0
    levitated: bool = False
    wall_mounted: str | None = None

    @property
    def volume(self) -> float:
        return self.size.x * self.size.y * self.size.z

    def facing(self) -> Vec3:
        if self.wall_mounted:
            return forward_from_yaw(_WALL_FRAME[self.wall_mounted][2])
        return forward_from_yaw(self.rotation.yaw)


@dataclass
class TriggerBinding:
    object_name: str
    event: str
    handler: str
    enabled: bool = True
    index: int = 0

    def key(self) -> tuple[str, str, str]:
        return (self.object_name, self.event, self.handler)

    def to_doc(self) -> dict:
        return {
            "object": self.object_name,
            "event": self.event,
            "handler": self.handler,
            "enabled": self.enabled,
            "index": self.index,
        }

    @staticmethod
    def from_doc(doc: dict) -> "TriggerBinding":
        return TriggerBinding(doc["object"], doc["event"], doc["handler"], doc["enabled"], doc["index"])


@dataclass(frozen=True)
class SceneSnapshot:
    doc: dict  # {"objects": [...], "triggers": [...], "step": int}
    turn_index: int | None = None

    def canonical(self) -> str:
        return json.dumps(self.doc, separators=(",", ":"))

    def object_doc(self, name: str) -> dict | None:
        for od in self.doc["objects"]:
            if od["name"] == name:
                return od
        return None


def _color_doc(c: ColorRGBA) -> dict:
    return {"r": _num(c.r), "g": _num(c.g), "b": _num(c.b), "a": _num(c.a)}


def object_doc(obj: SceneObject) -> dict:
    return {
        "id": obj.id,
        "name": obj.name,
        "kind": obj.kind,
        "position": {"x": _num(obj.position.x), "y": _num(obj.position.y), "z": _num(obj.position.z)},
        "rotation": {"yaw": _num(obj.rotation.yaw), "pitch": _num(obj.rotation.pitch), "roll": _num(obj.rotation.roll)},
        "size": {"w": _num(obj.size.x), "h": _num(obj.size.y), "d": _num(obj.size.z)},
        "color": _color_doc(obj.color),
        "illuminated": obj.illuminated,
        "luminousIntensity": _num(obj.luminous_intensity),
        "levitated": obj.levitated,
        "wallMounted": obj.wall_mounted,
    }


def object_from_doc(doc: dict) -> SceneObject:
    return SceneObject(
        id=doc["id"],
        name=doc["name"],
        kind=doc["kind"],
        position=Vec3(doc["position"]["x"], doc["position"]["y"], doc["position"]["z"]),
        rotation=Euler(doc["rotation"]["yaw"], doc["rotation"]["pitch"], doc["rotation"]["roll"]),
        size=Vec3(doc["size"]["w"], doc["size"]["h"], doc["size"]["d"]),
        color=ColorRGBA(doc["color"]["r"], doc["color"]["g"], doc["color"]["b"], doc["color"]["a"]),
        illuminated=doc["illuminated"],
        luminous_intensity=doc["luminousIntensity"],
        levitated=doc["levitated"],
        wall_mounted=doc.get("wallMounted"),
    )


def object_aabb(obj: SceneObject, room: Room | None = None) -> AABB:
    w, h, d = obj.size.x, obj.size.y, obj.size.z
    p = obj.position
    if obj.wall_mounted:
        axis, sign, _ = _WALL_FRAME[obj.wall_mounted]
        if axis == "z":
            lo_z, hi_z = (p.z - d, p.z) if sign > 0 else (p.z, p.z + d)
            return AABB(Vec3(p.x - w / 2, p.y - h / 2, lo_z), Vec3(p.x + w / 2, p.y + h / 2, hi_z))
        lo_x, hi_x = (p.x - d, p.x) if sign > 0 else (p.x, p.x + d)
        return AABB(Vec3(lo_x, p.y - h / 2, p.z - w / 2), Vec3(hi_x, p.y + h / 2, p.z + w / 2))
    return AABB(Vec3(p.x - w / 2, p.y, p.z - d / 2), Vec3(p.x + w / 2, p.y + h, p.z + d / 2))


class Scene:
    """Mutable scene state. All mutations go through a single writer."""

    def __init__(self, room: Room | None = None, catalog: Catalog | None = None,
                 user_pose: UserPose | None = None):
        self.room = room or Room()
        self.catalog = catalog or default_catalog()
        self.user_pose = user_pose or UserPose()
        self.step = 0
        self.triggers: list[TriggerBinding] = []
        self._objects: dict[str, SceneObject] = {}
        self._kind_counters: dict[str, int] = {}
        self._id_counter = 0
        self._trigger_counter = 0

    # -- lookup ----------------------------------------------------------

    @property
    def objects(self) -> list[SceneObject]:
        return list(self._objects.values())

    def find_by_name(self, name: str) -> SceneObject | None:
        return self._objects.get(name)

    def get(self, name: str) -> SceneObject:
        obj = self._objects.get(name)
        if obj is None:
            raise UnknownObject(f"no object named {name!r}")
        return obj

    def of_kind(self, kind: str) -> list[SceneObject]:
        return [o for o in self._objects.values() if o.kind == kind]

    def aabb(self, obj: SceneObject) -> AABB:
        return object_aabb(obj, self.room)

    # -- creation --------------------------------------------------------

    def peek_auto_names(self, kind: str, count: int, reserved: set[str] | None = None) -> list[str]:
        """Names create_object would assign for `count` sequential creations."""
        reserved = set(reserved or ())
        names = []
        n = self._kind_counters.get(kind, 0)
        for _ in range(count):
            n += 1
            while f"{kind}-{n}" in self._objects or f"{kind}-{n}" in reserved:
                n += 1
            name = f"{kind}-{n}"
            names.append(name)
            reserved.add(name)
        return names

    def create_object(self, kind_name: str, name: str | None = None,
                      overrides: dict | None = None) -> SceneObject:
        kind = self.catalog.get(kind_name)
        overrides = dict(overrides or {})

        counter = self._kind_counters.get(kind_name, 0) + 1
        self._kind_counters[kind_name] = counter
        if name is not None:
            if name in self._objects:
                raise DuplicateName(f"an object named {name!r} already exists")
        else:
            n = counter
            while f"{kind_name}-{n}" in self._objects:
                n += 1
            name = f"{kind_name}-{n}"

        size = Vec3.of(overrides.get("size", kind.size))
        if size.x <= 0 or size.y <= 0 or size.z <= 0:
            raise RangeError(f"size components must be positive, got {size.as_tuple()}")
        color = ColorRGBA.of(overrides.get("color", kind.color))
        luminous = float(overrides.get("luminousIntensity", 5.0))
        if not (1.0 <= luminous <= 10.0):
            raise RangeError(f"luminousIntensity {luminous} outside [1, 10]")
        levitated = bool(overrides.get("levitated", False))
        illuminated = bool(overrides.get("illuminated", False))

        wall = overrides.get("wallMounted")
        if wall is not None:
            if wall not in WALL_IDS:
                raise RangeError(f"unknown wall id {wall!r}")
            if not kind.wall_mountable:
                raise NotWallMountable(f"{kind_name} cannot be mounted on a wall")

        explicit_y = "position" in overrides
        if explicit_y:
            position = Vec3.of(overrides["position"])
        elif wall is not None:
            position = Vec3(0.0, self.room.height / 2, 0.0)
        else:
            pose = self.user_pose
            position = (pose.position + forward_from_yaw(pose.yaw).scaled(1.5)).with_y(0.0)

        if wall is not None:
            axis, plane = self.room.wall_plane(wall)
            position = Vec3(plane, position.y, position.z) if axis == "x" else Vec3(position.x, position.y, plane)

        if not self.room.contains_footprint(position):
            raise OutOfRoom(f"anchor {position.as_tuple()} outside the room footprint")

        if "rotation" in overrides:
            rot = overrides["rotation"]
            rotation = rot if isinstance(rot, Euler) else Euler(*[float(v) for v in rot])
        elif wall is not None:
            rotation = Euler(self.room.wall_inward_yaw(wall))
        else:
            rotation = Euler()

        self._id_counter += 1
        obj = SceneObject(
            id=f"o{self._id_counter}",
            name=name,
            kind=kind_name,
            position=position,
            rotation=rotation,
            size=size,
            color=color,
            illuminated=illuminated,
            luminous_intensity=luminous,
            levitated=levitated,
            wall_mounted=wall,
        )
        self._objects[name] = obj
        if not levitated and wall is None:
            # objects placed without an explicit height drop from above
            drop_from = obj.position.y if explicit_y else self.room.height
            obj.position = obj.position.with_y(self.settle_y(obj, from_height=drop_from))
        self.resettle_all()
        return obj

    # -- gravity ---------------------------------------------------------

    def settle_y(self, obj: SceneObject, from_height: float | None = None) -> float:
        """Rest height: highest support top at or below the object, else the floor."""
        limit = obj.position.y if from_height is None else from_height
        box = self.aabb(obj)
        best = 0.0
        for other in self._objects.values():
            if other.name == obj.name:
                continue
            obox = self.aabb(other)
            top = obox.hi.y
            if top <= limit + EPS and top > best and box.footprint_overlap(obox) > 0.0:
                best = top
        return best

    def settle(self, obj: SceneObject) -> float:
        y = self.settle_y(obj)
        obj.position = obj.position.with_y(y)
        return y

    def resettle_all(self) -> None:
        for _ in range(len(self._objects) + 1):
            changed = False
            for obj in sorted(self._objects.values(), key=lambda o: (o.position.y, o.id)):
                if obj.levitated or obj.wall_mounted:
                    continue
                y = self.settle_y(obj)
                if abs(y - obj.position.y) > EPS:
                    obj.position = obj.position.with_y(y)
                    changed = True
            if not changed:
                return

    # -- edits -------------------------------------------------------------

    def set_property(self, target: str | SceneObject, prop: str, value) -> SceneObject:
        obj = target if isinstance(target, SceneObject) else self.get(target)
        if obj.name not in self._objects:
            raise UnknownObject(f"no object named {obj.name!r}")

        if prop == "position":
            pos = Vec3.of(value)
            if not self.room.contains_footprint(pos):
                raise OutOfRoom(f"anchor {pos.as_tuple()} outside the room footprint")
            if obj.wall_mounted:
                axis, plane = self.room.wall_plane(obj.wall_mounted)
                pos = Vec3(plane, pos.y, pos.z) if axis == "x" else Vec3(pos.x, pos.y, plane)
            obj.position = pos
        elif prop == "rotation":
            obj.rotation = value if isinstance(value, Euler) else Euler(*[float(v) for v in value])
        elif prop == "size":
            size = Vec3.of(value)
            if size.x <= 0 or size.y <= 0 or size.z <= 0:
                raise RangeError(f"size components must be positive, got {size.as_tuple()}")
            obj.size = size
        elif prop == "color":
            obj.color = ColorRGBA.of(value)
        elif prop == "illuminated":
            obj.illuminated = bool(value)
        elif prop == "luminousIntensity":
            v = float(value)
            if not (1.0 <= v <= 10.0):
                raise RangeError(f"luminousIntensity {v} outside [1, 10]")
            obj.luminous_intensity = v
        elif prop == "levitated":
            obj.levitated = bool(value)
        else:
            raise RangeError(f"unknown property {prop!r}")

        if prop in ("position", "size", "levitated"):
            self.resettle_all()
        return obj

    def mount_on_wall(self, target: str | SceneObject, wall: str, y: float | None = None,
                      lateral: float | None = None) -> SceneObject:
        obj = target if isinstance(target, SceneObject) else self.get(target)
        kind = self.catalog.get(obj.kind)
        if wall not in WALL_IDS:
            raise RangeError(f"unknown wall id {wall!r}")
        if not kind.wall_mountable:
            raise NotWallMountable(f"{obj.kind} cannot be mounted on a wall")
        axis, plane = self.room.wall_plane(wall)
        height = y if y is not None else (obj.position.y + obj.size.y / 2 if obj.wall_mounted is None else obj.position.y)
        lat = 0.0 if lateral is None else lateral
        obj.wall_mounted = wall
        obj.position = Vec3(plane, height, lat) if axis == "x" else Vec3(lat, height, plane)
        obj.rotation = Euler(self.room.wall_inward_yaw(wall))
        self.resettle_all()
        return obj

    # -- grids -------------------------------------------------------------

    def create_grid(self, kind_name: str, rows: int, cols: int, wall: str | None = None) -> list[SceneObject]:
        kind = self.catalog.get(kind_name)
        if rows < 1 or cols < 1:
            raise RangeError(f"grid needs rows, cols >= 1, got {rows}x{cols}")
        if wall is not None:
            if wall not in WALL_IDS:
                raise RangeError(f"unknown wall id {wall!r}")
            if not kind.wall_mountable:
                raise NotWallMountable(f"{kind_name} cannot be mounted on a wall")
        created = []
        if wall is not None:
            extent = self.room.wall_lateral_extent(wall)
            dx = extent / (cols + 1)
            dy = self.room.height / (rows + 1)
            axis, plane = self.room.wall_plane(wall)
            for r in range(rows):
                y = (r + 1) * dy
                for c in range(cols):
                    lat = -extent / 2 + (c + 1) * dx
                    pos = Vec3(plane, y, lat) if axis == "x" else Vec3(lat, y, plane)
                    created.append(self.create_object(kind_name, overrides={"position": pos, "wallMounted": wall}))
        else:
            dx = self.room.width / (cols + 1)
            dz = self.room.depth / (rows + 1)
            for r in range(rows):
                z = -self.room.depth / 2 + (r + 1) * dz
                for c in range(cols):
                    x = -self.room.width / 2 + (c + 1) * dx
                    created.append(self.create_object(kind_name, overrides={"position": Vec3(x, self.room.height, z)}))
        return created

    # -- triggers (state records; evaluation lives in triggers.py) ----------

    def add_binding(self, object_name: str, event: str, handler: str) -> TriggerBinding | None:
        """Returns the new binding, or None when it already exists (no-op)."""
        self.get(object_name)
        for b in self.triggers:
            if b.key() == (object_name, event, handler):
                return None
        self._trigger_counter += 1
        binding = TriggerBinding(object_name, event, handler, True, self._trigger_counter)
        self.triggers.append(binding)
        return binding

    def remove_binding(self, object_name: str, event: str, handler: str) -> bool:
        for i, b in enumerate(self.triggers):
            if b.key() == (object_name, event, handler):
                del self.triggers[i]
                return True
        return False

    # -- snapshots -----------------------------------------------------------

    def authoring_doc(self) -> dict:
        return {
            "objects": [object_doc(o) for o in self._objects.values()],
            "triggers": [b.to_doc() for b in self.triggers],
            "step": self.step,
        }

    def snapshot(self, turn_index: int | None = None) -> SceneSnapshot:
        return SceneSnapshot(self.authoring_doc(), turn_index)

    def restore(self, snap: SceneSnapshot, names: list[str] | None = None) -> None:
        if names is None:
            self._objects = {od["name"]: object_from_doc(od) for od in snap.doc["objects"]}
            self.triggers = [TriggerBinding.from_doc(bd) for bd in snap.doc["triggers"]]
            self.step = snap.doc["step"]
            self._trigger_counter = max((b.index for b in self.triggers), default=self._trigger_counter)
            return
        for name in names:
            od = snap.object_doc(name)
            if od is None:
                self._objects.pop(name, None)
            elif name in self._objects:
                self._objects[name] = object_from_doc(od)
            else:
                self._objects[name] = object_from_doc(od)

    def restore_object_state(self, doc: dict) -> None:
        """Overwrite one object's state from a serialized object doc."""
        self._objects[doc["name"]] = object_from_doc(doc)

    def to_doc(self) -> dict:
        return {
            "room": self.room.to_doc(),
            "objects": [object_doc(o) for o in self._objects.values()],
            "triggers": [b.to_doc() for b in self.triggers],
            "userPose": _round_doc(self.user_pose.to_doc()),
            "step": self.step,
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_doc(), separators=(",", ":"))

    @staticmethod
    def from_doc(doc: dict, catalog: Catalog | None = None) -> "Scene":
        room_doc = doc.get("room", {})
        walls = {
            wd["id"]: Wall(wd["id"], ColorRGBA(wd["color"]["r"], wd["color"]["g"], wd["color"]["b"], wd["color"]["a"]))
            for wd in room_doc.get("walls", [])
        } or None
        room = Room(
            width=room_doc.get("width", 4.0),
            depth=room_doc.get("depth", 4.0),
            height=room_doc.get("height", 3.0),
        )
        if walls:
            room.walls = walls
        scene = Scene(room=room, catalog=catalog)
        if doc.get("userPose"):
            scene.user_pose = UserPose.from_doc(doc["userPose"])
        scene.step = doc.get("step", 0)
        for od in doc.get("objects", []):
            obj = object_from_doc(od)
            scene._objects[obj.name] = obj
        for bd in doc.get("triggers", []):
            scene.triggers.append(TriggerBinding.from_doc(bd))
        scene._trigger_counter = max((b.index for b in scene.triggers), default=0)
        scene._sync_counters()
        return scene

    def _sync_counters(self) -> None:
        max_id = 0
        for obj in self._objects.values():
            if obj.id.startswith("o"):
                try:
                    max_id = max(max_id, int(obj.id[1:]))
                except ValueError:
                    pass
            prefix = f"{obj.kind}-"
            if obj.name.startswith(prefix):
                try:
                    n = int(obj.name[len(prefix):])
                except ValueError:
                    continue
                self._kind_counters[obj.kind] = max(self._kind_counters.get(obj.kind, 0), n)
        self._id_counter = max(self._id_counter, max_id)


def _round_doc(value):
    if isinstance(value, float):
        return _num(value)
    if isinstance(value, list):
        return [_round_doc(v) for v in value]
    if isinstance(value, dict):
        return {k: _round_doc(v) for k, v in value.items()}
    return value


# -- deltas ------------------------------------------------------------------


def scene_delta(before: dict, after: dict) -> dict:
    """Structural diff between two authoring docs; foldable via apply_delta."""
    before_objs = {od["name"]: od for od in before["objects"]}
    after_objs = {od["name"]: od for od in after["objects"]}
    delta: dict = {}
    created = [od for name, od in after_objs.items() if name not in before_objs]
    removed = [name for name in before_objs if name not in after_objs]
    updated = [
        od for name, od in after_objs.items()
        if name in before_objs and before_objs[name] != od
    ]
    if created:
        delta["created"] = created
    if removed:
        delta["removed"] = removed
    if updated:
        delta["updated"] = updated
    if before["triggers"] != after["triggers"]:
        delta["triggers"] = after["triggers"]
    if before["step"] != after["step"]:
        delta["step"] = after["step"]
    return delta


def apply_delta(doc: dict, delta: dict) -> dict:
    objects = [dict(od) for od in doc["objects"]]
    removed = set(delta.get("removed", ()))
    objects = [od for od in objects if od["name"] not in removed]
    updates = {od["name"]: od for od in delta.get("updated", ())}
    objects = [updates.get(od["name"], od) for od in objects]
    objects.extend(delta.get("created", ()))
    return {
        "objects": objects,
        "triggers": delta.get("triggers", doc["triggers"]),
        "step": delta.get("step", doc["step"]),
    }
