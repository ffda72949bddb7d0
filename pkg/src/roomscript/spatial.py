"""Spatial language resolution: placements, predicates, frustum, pointing, deixis.

All left/right/front/behind language is resolved in the USER'S egocentric
frame; objects additionally have their own facing (yaw) used by
in_front_of(obj) / behind(obj).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .catalog import nearest_color_term
from .config import Thresholds
from .errors import (
    AmbiguousSelector,
    NoFreeSide,
    NoGestureInWindow,
    NoMatch,
    TargetKindMismatch,
    UnknownObject,
    UnknownReferent,
)
from .geometry import (
    EPS,
    Ray,
    Vec3,
    angle_between_deg,
    forward_from_yaw,
    ray_floor_point,
    right_from_yaw,
)
from .pose import GestureTimeline, UserPose
from .scene import Scene, SceneObject

USER_RELATIVE_TAGS = ("in_front_of_user", "behind_user", "left_of_user", "right_of_user")
REFERENT_TAGS = ("in_front_of", "behind", "next_to", "near", "on_top_of", "align_y")
WALL_TAGS = ("against_wall", "on_wall")


@dataclass(frozen=True)
class SpatialRelation:
    tag: str
    ref: str | None = None        # referent object name
    wall: str | None = None
    wall2: str | None = None
    point: Vec3 | None = None     # for at_point
    distance: float | None = None


@dataclass
class Selector:
    name: str | None = None
    kind: str | None = None          # kind or category name
    color: str | None = None         # palette term
    size_term: str | None = None     # small | smallest | big | largest
    relation: SpatialRelation | None = None
    view_side: str | None = None     # on_the_left | on_the_right
    deictic: str | None = None       # this | that | these | those
    deictic_ts: float | None = None
    singular: bool = True
    any_kind: bool = False           # "the objects" / "everything"

    def is_empty(self) -> bool:
        return not any((self.name, self.kind, self.color, self.size_term,
                        self.relation, self.view_side, self.deictic, self.any_kind))

    def describe(self) -> str:
        if self.name:
            return self.name
        parts = []
        if self.size_term:
            parts.append(self.size_term)
        if self.color:
            parts.append(self.color)
        parts.append(self.kind or "object")
        text = " ".join(parts)
        if self.view_side:
            text += " on the " + self.view_side.replace("on_the_", "")
        return text


# -- placement ----------------------------------------------------------------


def _side_candidates(ref: SceneObject, subject_size: Vec3, gap: float) -> list[Vec3]:
    """Anchor candidates beside the four sides of a referent, in +x,-x,+z,-z order."""
    rx = ref.size.x / 2 + gap + subject_size.x / 2
    rz = ref.size.z / 2 + gap + subject_size.z / 2
    p = ref.position
    return [
        Vec3(p.x + rx, 0.0, p.z),
        Vec3(p.x - rx, 0.0, p.z),
        Vec3(p.x, 0.0, p.z + rz),
        Vec3(p.x, 0.0, p.z - rz),
    ]


def _spot_is_free(scene: Scene, anchor: Vec3, subject_size: Vec3, ignore: set[str]) -> bool:
    half_w, half_d = subject_size.x / 2, subject_size.z / 2
    for other in scene.objects:
        if other.name in ignore or other.wall_mounted:
            continue
        box = scene.aabb(other)
        w = min(anchor.x + half_w, box.hi.x) - max(anchor.x - half_w, box.lo.x)
        d = min(anchor.z + half_d, box.hi.z) - max(anchor.z - half_d, box.lo.z)
        if w > EPS and d > EPS:
            return False
    return True


def resolve_placement(relation: SpatialRelation, subject_size: Vec3, scene: Scene,
                      pose: UserPose, th: Thresholds | None = None,
                      subject_name: str | None = None) -> Vec3:
    """Deterministic anchor point for a placement relation.

    Heights are left at 0 for floor placements; gravity settling finalizes y.
    """
    th = th or Thresholds()
    tag = relation.tag

    ref: SceneObject | None = None
    if tag in REFERENT_TAGS or relation.ref is not None:
        if relation.ref is None:
            raise UnknownReferent(f"relation {tag} needs a referent")
        ref = scene.find_by_name(relation.ref)
        if ref is None:
            raise UnknownReferent(f"no object named {relation.ref!r}")

    if tag == "in_front_of_user":
        return (pose.position + forward_from_yaw(pose.yaw).scaled(th.user_reach_m)).with_y(0.0)
    if tag == "behind_user":
        return (pose.position - forward_from_yaw(pose.yaw).scaled(th.user_reach_m)).with_y(0.0)
    if tag == "left_of_user":
        return (pose.position - right_from_yaw(pose.yaw).scaled(th.user_reach_m)).with_y(0.0)
    if tag == "right_of_user":
        return (pose.position + right_from_yaw(pose.yaw).scaled(th.user_reach_m)).with_y(0.0)

    if tag == "in_front_of":
        offset = ref.size.z / 2 + th.front_gap_m + subject_size.z / 2
        return (ref.position + ref.facing().scaled(offset)).with_y(0.0)
    if tag == "behind":
        offset = ref.size.z / 2 + th.front_gap_m + subject_size.z / 2
        return (ref.position - ref.facing().scaled(offset)).with_y(0.0)
    if tag == "on_top_of":
        top = scene.aabb(ref).hi.y
        return Vec3(ref.position.x, top, ref.position.z)
    if tag in ("next_to", "near"):
        gap = th.side_gap_m if tag == "next_to" else th.near_gap_m
        ignore = {ref.name}
        if subject_name:
            ignore.add(subject_name)
        candidates = [
            c for c in _side_candidates(ref, subject_size, gap)
            if scene.room.contains_footprint(c)
        ]
        free = [c for c in candidates if _spot_is_free(scene, c, subject_size, ignore)]
        if not free:
            raise NoFreeSide(f"all sides of {ref.name} are occupied")
        return min(free, key=lambda c: (c.distance_to(pose.position.ground()), c.x, c.z))
    if tag == "align_y":
        return Vec3(0.0, ref.position.y, 0.0)  # caller keeps its own x/z

    if tag in ("against_wall", "on_wall"):
        wall = relation.wall
        if wall not in scene.room.walls:
            raise UnknownReferent(f"unknown wall {wall!r}")
        axis, plane = scene.room.wall_plane(wall)
        inward = 1.0 if plane < 0 else -1.0
        offset = plane + inward * subject_size.z / 2
        if tag == "on_wall":
            # anchor directly on the wall plane; mounting handled by the caller
            return Vec3(plane, 0.0, 0.0) if axis == "x" else Vec3(0.0, 0.0, plane)
        return Vec3(offset, 0.0, 0.0) if axis == "x" else Vec3(0.0, 0.0, offset)

    if tag == "center_of_room":
        return Vec3(0.0, 0.0, 0.0)
    if tag == "corner":
        if relation.wall not in scene.room.walls or relation.wall2 not in scene.room.walls:
            raise UnknownReferent("corner needs two valid walls")
        coords: dict[str, float] = {}
        for wall in (relation.wall, relation.wall2):
            axis, plane = scene.room.wall_plane(wall)
            inward = 1.0 if plane < 0 else -1.0
            half = subject_size.x / 2 if axis == "x" else subject_size.z / 2
            coords[axis] = plane + inward * half
        if set(coords) != {"x", "z"}:
            raise UnknownReferent("corner walls must be perpendicular")
        return Vec3(coords["x"], 0.0, coords["z"])
    if tag == "at_point":
        if relation.point is None:
            raise UnknownReferent("at_point needs coordinates")
        return relation.point
    if tag == "away_from_user":
        if subject_name is None:
            raise UnknownReferent("away_from_user needs a subject")
        subject = scene.get(subject_name)
        step = relation.distance if relation.distance is not None else th.away_step_m
        delta = subject.position.ground() - pose.position.ground()
        if delta.length() < EPS:
            delta = forward_from_yaw(pose.yaw)
        target = subject.position + delta.normalized().scaled(step)
        half_w, half_d = subject.size.x / 2, subject.size.z / 2
        x = min(max(target.x, -scene.room.width / 2 + half_w), scene.room.width / 2 - half_w)
        z = min(max(target.z, -scene.room.depth / 2 + half_d), scene.room.depth / 2 - half_d)
        return Vec3(x, subject.position.y, z)

    raise UnknownReferent(f"unknown placement tag {relation.tag!r}")


# -- predicates ---------------------------------------------------------------


def surface_distance(scene: Scene, a, b: SceneObject) -> float:
    """Minimal surface distance; `a` is a UserPose (point) or SceneObject (box)."""
    bbox = scene.aabb(b)
    if isinstance(a, UserPose):
        return bbox.distance_to_point(a.position)
    return scene.aabb(a).gap_to(bbox)


def evaluate_predicate(tag: str, a, b: SceneObject, scene: Scene,
                       th: Thresholds | None = None) -> bool:
    th = th or Thresholds()
    if isinstance(b, str):
        b = scene.get(b)
    if isinstance(a, str):
        a = scene.get(a)

    if tag == "near":
        return surface_distance(scene, a, b) < th.near_m
    if tag == "touching":
        point = a.hand_point if isinstance(a, UserPose) else scene.aabb(a).center
        return scene.aabb(b).distance_to_point(point) < th.touch_m
    if tag == "on_top_of":
        if not isinstance(a, SceneObject):
            raise UnknownObject("on_top_of needs an object subject")
        abox, bbox = scene.aabb(a), scene.aabb(b)
        return abs(abox.lo.y - bbox.hi.y) <= 1e-6 and abox.footprint_overlap(bbox) > 0.0
    if tag in ("in_front_of", "behind"):
        apos = a.position if isinstance(a, UserPose) else a.position
        to_a = (apos - b.position).ground()
        if to_a.length() < EPS:
            return False
        facing = b.facing() if tag == "in_front_of" else b.facing().scaled(-1.0)
        return angle_between_deg(to_a, facing) <= 45.0 and to_a.length() < 2.0
    raise UnknownObject(f"unknown predicate {tag!r}")


# -- view frustum and pointing --------------------------------------------------


def view_frustum_objects(pose: UserPose, scene: Scene, th: Thresholds | None = None) -> list[str]:
    """Names of objects whose box center falls in the gaze cone, nearest-angle first."""
    th = th or Thresholds()
    gaze = pose.gaze
    hits = []
    for obj in scene.objects:
        to_center = scene.aabb(obj).center - gaze.origin
        dist = to_center.length()
        if dist < EPS:
            continue
        angle = angle_between_deg(gaze.direction, to_center)
        if angle <= th.frustum_deg:
            hits.append((angle, dist, obj.name))
    hits.sort()
    return [name for _, _, name in hits]


@dataclass(frozen=True)
class PointingHit:
    object_name: str | None = None
    floor_point: Vec3 | None = None

    @property
    def is_none(self) -> bool:
        return self.object_name is None and self.floor_point is None


def pointing_target(ray: Ray | None, scene: Scene) -> PointingHit:
    if ray is None:
        return PointingHit()
    best_t, best_name = None, None
    for obj in scene.objects:
        t = scene.aabb(obj).ray_hit(ray)
        if t is not None and (best_t is None or t < best_t):
            best_t, best_name = t, obj.name
    if best_name is not None:
        return PointingHit(object_name=best_name)
    point = ray_floor_point(ray)
    if point is not None and scene.room.contains_footprint(point):
        return PointingHit(floor_point=point)
    return PointingHit()


# -- deixis ---------------------------------------------------------------------


def resolve_deictic(token: str, token_ms: float, timeline: GestureTimeline | None,
                    scene: Scene, th: Thresholds | None = None) -> PointingHit:
    th = th or Thresholds()
    if timeline is None or not timeline:
        raise NoGestureInWindow(f"no gesture accompanies {token!r}")
    sample = timeline.nearest(token_ms)
    if sample is None or abs(sample.t - token_ms) > th.deictic_ms:
        raise NoGestureInWindow(
            f"no gesture within {th.deictic_ms:.0f} ms of {token!r} at t={token_ms:.0f} ms"
        )
    hit = pointing_target(sample.ray, scene)
    if hit.is_none:
        raise NoGestureInWindow(f"the gesture for {token!r} points at nothing in the room")
    if token in ("this", "that", "these", "those") and hit.object_name is None:
        raise TargetKindMismatch(f"{token!r} must refer to an object, not a spot on the floor")
    return hit


# -- selectors --------------------------------------------------------------------


def _lateral_offset(pose: UserPose, obj: SceneObject, scene: Scene) -> float:
    return (scene.aabb(obj).center - pose.eye_point).dot(right_from_yaw(pose.yaw))


def resolve_selector(selector: Selector, scene: Scene, pose: UserPose,
                     th: Thresholds | None = None,
                     timeline: GestureTimeline | None = None) -> list[SceneObject]:
    """Resolve a language selector to objects, in creation order.

    Raises NoMatch when nothing survives and AmbiguousSelector when a singular
    reference keeps several candidates without a superlative to pick one.
    """
    th = th or Thresholds()
    if selector.is_empty():
        raise NoMatch("empty selector")

    if selector.name:
        obj = scene.find_by_name(selector.name)
        if obj is None:
            raise NoMatch(f"no object named {selector.name!r}")
        return [obj]

    candidates = scene.objects

    if selector.deictic in ("this", "that") and timeline is not None and timeline:
        hit = resolve_deictic(selector.deictic, selector.deictic_ts or 0.0, timeline, scene, th)
        target = scene.get(hit.object_name)
        for check, value in (("kind", selector.kind), ("color", selector.color)):
            if value is None:
                continue
            if check == "kind" and not _kind_matches(target, value, scene):
                raise NoMatch(f"the pointed object is a {target.kind}, not a {value}")
            if check == "color" and nearest_color_term(target.color) != value:
                raise NoMatch(f"the pointed object is not {value}")
        return [target]

    if selector.deictic in ("these", "those"):
        in_view = set(view_frustum_objects(pose, scene, th))
        visible = [o for o in candidates if o.name in in_view]
        if visible:
            candidates = visible

    if selector.kind:
        candidates = [o for o in candidates if _kind_matches(o, selector.kind, scene)]
    if selector.color:
        candidates = [o for o in candidates if nearest_color_term(o.color) == selector.color]
    if selector.relation is not None:
        rel = selector.relation
        ref = scene.find_by_name(rel.ref) if rel.ref else None
        kept = []
        for o in candidates:
            if ref is not None and o.name == ref.name:
                continue
            if rel.tag in ("near", "on_top_of", "in_front_of", "behind") and ref is not None:
                if evaluate_predicate(rel.tag, o, ref, scene, th):
                    kept.append(o)
            elif rel.tag == "against_wall" and rel.wall:
                if o.wall_mounted == rel.wall:
                    kept.append(o)
        candidates = kept
    if selector.view_side:
        want_right = selector.view_side.endswith("right")
        candidates = [
            o for o in candidates
            if (_lateral_offset(pose, o, scene) > 0) == want_right
        ]

    if not candidates:
        raise NoMatch(f"nothing matches '{selector.describe()}'")

    if selector.size_term:
        smallest = selector.size_term in ("small", "smallest", "tiny")
        extreme = min(candidates, key=lambda o: o.volume) if smallest else max(candidates, key=lambda o: o.volume)
        return [extreme]

    if selector.singular and len(candidates) > 1:
        names = ", ".join(o.name for o in candidates)
        raise AmbiguousSelector(
            f"'{selector.describe()}' matches several objects ({names}); which one do you mean?"
        )
    return candidates


def _kind_matches(obj: SceneObject, term: str, scene: Scene) -> bool:
    if obj.kind == term:
        return True
    kind = scene.catalog.get(obj.kind)
    return kind.category == term


def find_objects(selector: Selector, scene: Scene, user_pose: UserPose,
                 thresholds: Thresholds | None = None,
                 timeline: GestureTimeline | None = None) -> list[SceneObject]:
    """Scene-level object lookup; the generalized find-by-name surface."""
    return resolve_selector(selector, scene, user_pose, thresholds, timeline)
