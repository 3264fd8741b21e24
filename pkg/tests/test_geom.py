import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdwlab import geom
from rdwlab.geom import (
    TAU,
    DegenerateEnvironment,
    KernelInObstacle,
    SegmentSet,
    canonical_angle,
    circular_diff,
    point_clearance,
    segment_clear,
    signed_angle,
    slice_polygon,
    visibility_polygon,
    wrap_pi,
)

from oracles import brute_clearance, edges_of, mc_visible_area, random_free_points

angles = st.floats(-20.0, 20.0, allow_nan=False)


# --- angles -----------------------------------------------------------------


def test_circular_diff_examples():
    assert circular_diff(0.0, 0.0) == 0.0
    assert circular_diff(0.1, TAU - 0.1) == pytest.approx(0.2, abs=1e-12)
    assert circular_diff(math.pi / 2, 3 * math.pi / 2) == pytest.approx(math.pi, abs=1e-12)


@given(angles, angles, angles)
def test_circular_diff_is_a_metric(a, b, c):
    ab, bc, ac = circular_diff(a, b), circular_diff(b, c), circular_diff(a, c)
    assert 0.0 <= ab <= math.pi + 1e-12
    assert ab == pytest.approx(circular_diff(b, a), abs=1e-12)
    assert ac <= ab + bc + 1e-9
    assert circular_diff(a, a) == 0.0


@given(angles)
def test_canonical_and_wrap_ranges(a):
    c = canonical_angle(a)
    assert 0.0 <= c < TAU
    w = wrap_pi(a)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-9)


def test_canonical_angle_tiny_negative():
    assert canonical_angle(-1e-18) < TAU


def test_signed_angle_direction():
    assert signed_angle(0.0, 0.5) == pytest.approx(0.5)
    assert signed_angle(0.5, 0.0) == pytest.approx(-0.5)
    assert signed_angle(TAU - 0.1, 0.1) == pytest.approx(0.2)


# --- clearance and segment tests ----------------------------------------------


def test_clearance_center_of_empty_room(square_room):
    assert point_clearance(square_room.static_snapshot, (0.0, 0.0)) == 5.0


def test_clearance_on_obstacle_edge(pairs):
    snap = pairs[2].phys.static_snapshot
    assert point_clearance(snap, (0.0, 1.0)) == 0.0


def test_clearance_sign_inside_obstacle(pairs):
    snap = pairs[2].phys.static_snapshot
    assert point_clearance(snap, (0.0, 0.0)) == pytest.approx(-1.0)
    assert point_clearance(snap, (6.0, 0.0)) == pytest.approx(-1.0)


def test_clearance_matches_brute_force(pairs):
    env = pairs[1].phys
    rng = np.random.default_rng(3)
    pts = [(0.0, 0.0)] + [tuple(rng.uniform(-7, 7, 2)) for _ in range(300)]
    for p in pts:
        expected = brute_clearance(p, env.boundary, env.static_obstacles)
        assert point_clearance(env.static_snapshot, p) == pytest.approx(expected, abs=1e-12)


def test_segment_clear_examples(square_room, pairs):
    assert segment_clear(square_room.static_snapshot, (-4.0, -4.0), (4.0, 3.0), 0.0)
    env = pairs[1].phys
    ob = env.static_obstacles[0]
    c = ob.mean(axis=0)
    assert not segment_clear(env.static_snapshot, (c[0] - 3.0, c[1]), (c[0] + 3.0, c[1]), 0.0)


@pytest.mark.parametrize("a,b,inflation", [((-5.5, 0.0), (5.5, 0.0), 0.5),
                                           ((-5.5, 0.0), (5.5, 0.0), 0.0),
                                           ((-5.0, 5.0), (5.0, 5.0), 0.3),
                                           ((0.0, -5.5), (0.0, 5.5), 0.5)])
def test_segment_clear_dense_sampling_oracle(pairs, a, b, inflation):
    env = pairs[1].phys
    t = np.linspace(0.0, 1.0, 10_000)
    pts = np.outer(1 - t, a) + np.outer(t, b)
    expected = all(brute_clearance(p, env.boundary, env.static_obstacles) > inflation
                   for p in pts[::10]) and all(
        point_clearance(env.static_snapshot, p) > inflation for p in pts)
    assert segment_clear(env.static_snapshot, a, b, inflation) == expected


def test_segment_set_splits_crossings():
    boundary = np.array([(-5.0, -5.0), (5.0, -5.0), (5.0, 5.0), (-5.0, 5.0)])
    a = np.array([(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)])
    b = a + 1.0
    s = SegmentSet.from_rings(boundary, [a, b])
    assert len(s) == 4 + 4 + 4 + 4
    # every split piece lies on one of the original edges
    assert np.all(np.isfinite(s.segs))


# --- visibility polygons --------------------------------------------------------


def test_empty_square_from_center(square_room):
    poly = visibility_polygon(square_room.static_snapshot, (0.0, 0.0))
    assert poly.area == pytest.approx(100.0, rel=1e-12)
    assert len(poly) == 4
    assert np.allclose(poly.areas, 25.0)
    # an axis-aligned square seen from its centre: corners at the diagonals,
    # so the fan triangles are centred on the axes
    assert sorted(np.round(poly.bisectors, 12)) == pytest.approx(
        [0.0, math.pi / 2, math.pi, 3 * math.pi / 2], abs=1e-12)


def test_diamond_slices_and_offsets(diamond_room):
    poly = visibility_polygon(diamond_room.static_snapshot, (0.0, 0.0), heading=0.0)
    assert np.allclose(poly.areas, 25.0)
    b = np.sort(poly.bisectors)
    assert b == pytest.approx([math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4])
    off = dict(zip(np.round(poly.bisectors, 9), poly.offsets))
    assert off[round(7 * math.pi / 4, 9)] == pytest.approx(math.pi / 4)
    assert off[round(3 * math.pi / 4, 9)] == pytest.approx(3 * math.pi / 4)


def test_exp2_pe_from_0_3_matches_million_ray_oracle(pairs):
    env = pairs[2].phys
    poly = visibility_polygon(env.static_snapshot, (0.0, 3.0))
    oracle = mc_visible_area(edges_of(env.boundary, env.static_obstacles), 0.0, 3.0, 1_000_000, 7)
    assert poly.area == pytest.approx(oracle, rel=0.005)


def test_kernel_inside_obstacle(pairs):
    with pytest.raises(KernelInObstacle):
        visibility_polygon(pairs[2].phys.static_snapshot, (0.0, 0.0))


def test_kernel_on_edge_rejected(pairs):
    with pytest.raises(KernelInObstacle):
        visibility_polygon(pairs[2].phys.static_snapshot, (0.0, 1.0))


def test_degenerate_environment():
    with pytest.raises(DegenerateEnvironment):
        visibility_polygon(object(), (0.0, 0.0))
    s = SegmentSet(np.array([[0.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.0, 0.0]]),
                   np.zeros(2, dtype=np.int64), np.array([True]))
    with pytest.raises(DegenerateEnvironment):
        visibility_polygon(s, (0.5, 0.5))


def test_exp1_partition_identity(pairs):
    poly = visibility_polygon(pairs[1].phys.static_snapshot, (0.0, 0.0))
    assert abs(poly.areas.sum() - poly.area) / poly.area <= 1e-9


def _check_polygon_invariants(env, p, heading):
    snap = env if not hasattr(env, "static_snapshot") else env.static_snapshot
    poly = visibility_polygon(snap, p, heading)
    assert abs(poly.areas.sum() - poly.area) / poly.area <= 1e-9
    # vertices CCW about the kernel
    ang = np.unwrap(np.arctan2(poly.vertices[:, 1] - p[1], poly.vertices[:, 0] - p[0]))
    assert np.all(np.diff(ang) >= -1e-9)
    # star-shaped: midpoint of kernel -> vertex is walkable
    for v in poly.vertices:
        mid = (0.5 * (p[0] + v[0]), 0.5 * (p[1] + v[1]))
        assert point_clearance(snap, mid) > -1e-9
    for s in poly.slices:
        k, a, b = (np.array(v) for v in s.verts)
        assert s.area > 0
        assert s.avg_length == pytest.approx(
            0.5 * (np.linalg.norm(k - a) + np.linalg.norm(k - b)), rel=1e-14)
        assert s.angle_offset == pytest.approx(circular_diff(heading, s.bisector), abs=1e-12)
        a1 = math.atan2(a[1] - k[1], a[0] - k[0])
        span = (math.atan2(b[1] - k[1], b[0] - k[0]) - a1) % TAU
        inside = (s.bisector - a1) % TAU
        assert 0.0 < inside < span
    return poly


def test_invariants_random_kernels(pairs):
    rng = np.random.default_rng(11)
    envs = [pairs[i].phys for i in (1, 2)] + [pairs[i].virt for i in (1, 2)]
    for env in envs:
        for p in random_free_points(env, 25, rng):
            _check_polygon_invariants(env, p, rng.uniform(0, TAU))


def test_slices_independent_of_start_vertex(pairs):
    poly = visibility_polygon(pairs[1].virt.static_snapshot, (1.3, -0.4), heading=2.0)
    base = sorted(map(tuple, np.round(poly.table, 9)))
    for shift in (1, 3, len(poly.vertices) - 1):
        rolled = geom.VisibilityPolygon(poly.kernel, np.roll(poly.vertices, shift, axis=0),
                                        poly.heading, poly.table)
        table = np.array([[*s.verts[1], *s.verts[2], s.bisector, s.avg_length, s.angle_offset,
                           s.area] for s in slice_polygon(rolled, 2.0)])
        assert sorted(map(tuple, np.round(table, 9))) == base


def test_collinear_vertices_merge_forward():
    # a room whose boundary has an extra vertex in the middle of an edge;
    # from the centre that vertex is not collinear with its neighbours and the
    # kernel, but a vertex pair on a ray through the kernel must merge
    poly = geom.VisibilityPolygon((0.0, 0.0), np.array([(1.0, 0.0), (2.0, 0.0), (0.0, 2.0),
                                                         (-2.0, 0.0), (0.0, -2.0)]), 0.0,
                                  np.zeros((0, 8)))
    slices = slice_polygon(poly, 0.0)
    assert len(slices) == 4
    assert sum(s.area for s in slices) == pytest.approx(abs(geom.signed_area(poly.vertices)))
    for s in slices:
        k, a, b = (np.array(v) for v in s.verts)
        u, w = a - k, b - k
        assert abs(u[0] * w[1] - u[1] * w[0]) > 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(-4.5, 4.5), st.floats(-4.5, 4.5), st.floats(0, TAU),
       st.floats(0.3, 1.2), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_random_box_obstacle_oracle(px, py, heading, half, ox, oy):
    boundary = np.array([(-5.0, -5.0), (5.0, -5.0), (5.0, 5.0), (-5.0, 5.0)])
    ob = np.array([(ox - half, oy - half), (ox + half, oy - half), (ox + half, oy + half),
                   (ox - half, oy + half)])
    snap = SegmentSet.from_rings(boundary, [ob])
    if point_clearance(snap, (px, py)) <= 0.05:
        return
    poly = visibility_polygon(snap, (px, py), heading)
    oracle = mc_visible_area(edges_of(boundary, [ob]), px, py, 20_000, 1)
    assert poly.area == pytest.approx(oracle, rel=0.02)
    assert abs(poly.areas.sum() - poly.area) <= 1e-9 * poly.area


def test_sweep_distance_bounded_by_center_ray(square_room):
    snap = square_room.static_snapshot
    d = geom.sweep_distances(snap, (0.0, 0.0), [0.0, math.pi / 2], 0.5)
    assert d == pytest.approx([5.0, 5.0])
    # heading straight at the wall from 1 m: the disc edge rays hit first
    # only when the wall is oblique, so here all three agree
    assert geom.sweep_distances(snap, (4.0, 0.0), [0.0], 0.5)[0] == pytest.approx(1.0)
    oblique = geom.sweep_distances(snap, (0.0, 0.0), [math.pi / 4], 0.5)[0]
    assert oblique < geom.ray_distance(snap, (0.0, 0.0), math.pi / 4)


def test_repulsion_symmetric_room_is_zero(square_room):
    fx, fy = geom.repulsion_vector(square_room.static_snapshot, (0.0, 0.0))
    assert math.hypot(fx, fy) < 1e-12
    fx, fy = geom.repulsion_vector(square_room.static_snapshot, (4.0, 0.0))
    assert fx < 0 and abs(fy) < 1e-12
