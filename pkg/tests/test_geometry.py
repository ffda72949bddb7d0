import math

import pytest
from hypothesis import given, strategies as st

from roomscript.geometry import (
    AABB,
    Ray,
    Vec3,
    angle_between_deg,
    forward_from_yaw,
    gaze_direction,
    ray_floor_point,
    right_from_yaw,
)

finite = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)


def test_vec3_rejects_non_finite():
    with pytest.raises(ValueError):
        Vec3(float("nan"), 0, 0)
    with pytest.raises(ValueError):
        Vec3(0, float("inf"), 0)


def test_vector_arithmetic():
    a, b = Vec3(1, 2, 3), Vec3(4, 5, 6)
    assert (a + b).as_tuple() == (5, 7, 9)
    assert (b - a).as_tuple() == (3, 3, 3)
    assert a.scaled(2).as_tuple() == (2, 4, 6)
    assert a.dot(b) == 32
    assert Vec3(3, 4, 0).length() == 5


def test_yaw_conventions():
    # yaw 0 faces north (+z), yaw 90 faces east (+x)
    f0 = forward_from_yaw(0)
    assert (round(f0.x, 12), round(f0.z, 12)) == (0, 1)
    f90 = forward_from_yaw(90)
    assert (round(f90.x, 12), round(f90.z, 12)) == (1, 0)
    r0 = right_from_yaw(0)
    assert (round(r0.x, 12), round(r0.z, 12)) == (1, 0)


@given(st.floats(min_value=-720, max_value=720), st.floats(min_value=-89, max_value=89))
def test_gaze_direction_is_unit(yaw, pitch):
    d = gaze_direction(yaw, pitch)
    assert abs(d.length() - 1.0) < 1e-12


def test_angle_between():
    assert angle_between_deg(Vec3(1, 0, 0), Vec3(0, 1, 0)) == pytest.approx(90.0)
    assert angle_between_deg(Vec3(1, 0, 0), Vec3(1, 0, 0)) == pytest.approx(0.0)


class TestAABB:
    box = AABB(Vec3(-1, 0, -1), Vec3(1, 2, 1))

    def test_distance_to_point_outside(self):
        assert self.box.distance_to_point(Vec3(3, 1, 0)) == pytest.approx(2.0)
        assert self.box.distance_to_point(Vec3(2, 3, 2)) == pytest.approx(math.sqrt(3))

    def test_distance_inside_and_surface(self):
        assert self.box.distance_to_point(Vec3(0, 1, 0)) == 0.0
        assert self.box.distance_to_point(Vec3(1, 1, 0)) == 0.0

    def test_distance_oracle_dense_surface_sampling(self):
        # oracle: min distance from the point to a dense sample of surface points
        point = Vec3(2.5, 3.0, -2.0)
        steps = 40
        best = min(
            point.distance_to(Vec3(x, y, z))
            for x in [(-1 + 2 * i / steps) for i in range(steps + 1)]
            for y in [(0 + 2 * j / steps) for j in range(steps + 1)]
            for z in (-1.0, 1.0)
        )
        assert self.box.distance_to_point(point) <= best + 1e-9
        assert self.box.distance_to_point(point) == pytest.approx(best, abs=0.08)

    def test_gap_between_boxes(self):
        other = AABB(Vec3(2, 0, -1), Vec3(3, 2, 1))
        assert self.box.gap_to(other) == pytest.approx(1.0)
        assert other.gap_to(self.box) == pytest.approx(1.0)
        touching = AABB(Vec3(1, 0, -1), Vec3(2, 2, 1))
        assert self.box.gap_to(touching) == 0.0

    def test_footprint_overlap(self):
        assert self.box.footprint_overlap(AABB(Vec3(0, 5, 0), Vec3(2, 6, 2))) == pytest.approx(1.0)
        assert self.box.footprint_overlap(AABB(Vec3(1, 0, 1), Vec3(2, 1, 2))) == 0.0

    def test_ray_hit_front_face(self):
        t = self.box.ray_hit(Ray(Vec3(0, 1, -5), Vec3(0, 0, 1)))
        assert t == pytest.approx(4.0)

    def test_ray_miss_and_inside(self):
        assert self.box.ray_hit(Ray(Vec3(0, 5, -5), Vec3(0, 0, 1))) is None
        assert self.box.ray_hit(Ray(Vec3(0, 1, 0), Vec3(0, 0, 1))) is None  # origin inside


def test_ray_floor_point_closed_form():
    # oracle: analytic intersection t = -origin.y / dir.y
    ray = Ray(Vec3(0.5, 1.6, -0.2), Vec3(0.1, -0.8, 0.3))
    p = ray_floor_point(ray)
    d = ray.direction
    t = -1.6 / d.y
    assert p.x == pytest.approx(0.5 + t * d.x, abs=1e-12)
    assert p.y == 0.0
    assert p.z == pytest.approx(-0.2 + t * d.z, abs=1e-12)


def test_ray_floor_point_upward_is_none():
    assert ray_floor_point(Ray(Vec3(0, 1.6, 0), Vec3(0, 0.5, 1))) is None
