import math

import numpy as np
import pytest

from rdwlab.env import Environment
from rdwlab.locomotion import (
    DynamicScenario,
    PathModel,
    SamplingExhausted,
    WaypointPath,
    generate_dynamic_scenario,
    generate_waypoint_path,
    min_pairwise_distance,
    read_path_file,
    write_path_file,
)
from rdwlab.orca import Agent, orca_velocity

from oracles import brute_clearance


def _dense_min_clearance(env, a, b, step=0.01):
    n = max(2, int(math.hypot(b[0] - a[0], b[1] - a[1]) / step) + 1)
    return min(brute_clearance((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])),
                               env.boundary, env.static_obstacles)
               for t in np.linspace(0.0, 1.0, n))


# --- waypoint paths ---------------------------------------------------------------


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_empty_room_length(square_room, seed):
    path = generate_waypoint_path(square_room, seed, 350.0)
    assert 350.0 <= path.length <= 358.0
    legs = np.linalg.norm(np.diff(path.waypoints, axis=0), axis=1)
    assert legs.min() >= 2.0 and legs.max() <= 8.0


@pytest.mark.parametrize("seed", range(5))
def test_waypoints_clear_of_obstacles(pairs, seed):
    env = pairs[1].virt
    path = generate_waypoint_path(env, seed, 100.0)
    for p in path.waypoints:
        assert brute_clearance(tuple(p), env.boundary, env.static_obstacles) > 0.5
    # segments re-checked by dense sampling against the inflation actually used
    for a, b in zip(path.waypoints[:-1], path.waypoints[1:]):
        assert _dense_min_clearance(env, a, b) >= PathModel().inflation - 1e-9


def test_start_clearance(pairs):
    for seed in range(20):
        path = generate_waypoint_path(pairs[2].virt, seed, 10.0)
        env = pairs[2].virt
        assert brute_clearance(path.start, env.boundary, env.static_obstacles) > 0.7


def test_waypoint_determinism(pairs):
    a = generate_waypoint_path(pairs[2].virt, 77, 200.0)
    b = generate_waypoint_path(pairs[2].virt, 77, 200.0)
    c = generate_waypoint_path(pairs[2].virt, 78, 200.0)
    assert np.array_equal(a.waypoints, b.waypoints) and a.start_heading == b.start_heading
    assert not np.array_equal(a.waypoints[:3], c.waypoints[:3])


def test_sampling_exhausted():
    narrow = Environment(np.array([(0.0, 0.0), (20.0, 0.0), (20.0, 1.42), (0.0, 1.42)]))
    with pytest.raises(SamplingExhausted):
        generate_waypoint_path(narrow, 0, 50.0, PathModel(max_rejections=1000), max_starts=3)


def test_pocket_start_is_redrawn(pairs):
    # this seed's first start point has no clear first leg
    path = generate_waypoint_path(pairs[2].virt, 16, 10.0)
    assert path.length >= 10.0


# --- ORCA -------------------------------------------------------------------------


def test_orca_no_neighbours():
    a = Agent((0.0, 0.0), (0.0, 0.0), 0.5, 1.0, (3.0, 4.0))
    assert orca_velocity(a, []) == pytest.approx((0.6, 0.8), abs=1e-15)
    assert orca_velocity(a, []) == a.preferred_velocity()


def test_orca_head_on_symmetric():
    a = Agent((-1.5, 0.0), (1.0, 0.0), 0.5, 1.0, (10.0, 0.0))
    b = Agent((1.5, 0.0), (-1.0, 0.0), 0.5, 1.0, (-10.0, 0.0))
    va, vb = orca_velocity(a, [b]), orca_velocity(b, [a])
    # reciprocal: point-symmetric about the midpoint of the line of centres
    assert va[0] == pytest.approx(-vb[0], abs=1e-9) and va[1] == pytest.approx(-vb[1], abs=1e-9)
    assert abs(va[1]) > 1e-3
    assert va[0] - vb[0] < 2.0


@pytest.mark.parametrize("offset", [0.0, 0.01])
def test_orca_step_simulation_keeps_distance(offset):
    # a perfectly aligned head-on start is a standstill equilibrium, so only
    # the offset case has to get past
    agents = [Agent((-4.0, offset), (0.0, 0.0), 0.5, 1.0, (4.0, offset)),
              Agent((4.0, -offset), (0.0, 0.0), 0.5, 1.0, (-4.0, -offset))]
    best = math.inf
    for _ in range(240):
        vs = [orca_velocity(agents[i], [agents[1 - i]]) for i in range(2)]
        for ag, v in zip(agents, vs):
            ag.velocity = v
            ag.position = (ag.position[0] + 0.05 * v[0], ag.position[1] + 0.05 * v[1])
        best = min(best, math.dist(agents[0].position, agents[1].position))
    assert best >= 1.0 - 1e-3
    if offset:
        assert agents[0].position[0] > 3.0 and agents[1].position[0] < -3.0


def test_orca_receding_neighbour():
    a = Agent((0.0, 0.0), (1.0, 0.0), 0.5, 1.0, (10.0, 0.0))
    b = Agent((2.0, 0.0), (1.5, 0.0), 0.5, 1.5, (20.0, 0.0))
    # cone test: the relative velocity points away from the neighbour
    rel = np.subtract(a.preferred_velocity(), b.velocity)
    assert np.dot(rel, np.subtract(b.position, a.position)) < 0
    assert orca_velocity(a, [b]) == a.preferred_velocity()


# --- dynamic scenarios ------------------------------------------------------------


@pytest.fixture(scope="module")
def exp4_scenarios(pairs):
    return [generate_dynamic_scenario(pairs[4].virt, s, 30.0) for s in range(5)]


def test_scenario_shapes(exp4_scenarios):
    sc = exp4_scenarios[0]
    assert sc.user.shape == (601, 3) and sc.discs.shape == (4, 601, 2)
    assert sc.duration == pytest.approx(30.0)
    assert np.allclose(np.diff(sc.times), 0.05)


def test_scenario_pairwise_safety(exp4_scenarios):
    for sc in exp4_scenarios:
        assert min_pairwise_distance(sc) >= 1.0 - 1e-3


def test_scenario_speed_and_turn_caps(exp4_scenarios):
    for sc in exp4_scenarios:
        step = np.hypot(*np.diff(sc.user[:, :2], axis=0).T)
        assert step.max() <= 0.05 * 1.0 + 1e-12
        dth = np.abs(np.remainder(np.diff(sc.user[:, 2]) + math.pi, 2 * math.pi) - math.pi)
        assert dth.max() <= 0.05 * math.pi / 2 + 1e-12
        for d in sc.discs:
            assert np.hypot(*np.diff(d, axis=0).T).max() <= 0.05 * 1.5 + 1e-12


def test_scenario_inside_walls(pairs, exp4_scenarios):
    env = pairs[4].virt
    for sc in exp4_scenarios:
        for track in [sc.user[:, :2], *sc.discs]:
            for p in track[::20]:
                assert brute_clearance(tuple(p), env.boundary) >= 0.5 - 1e-3


def test_scenario_determinism(pairs, exp4_scenarios):
    again = generate_dynamic_scenario(pairs[4].virt, 0, 30.0)
    assert np.array_equal(again.user, exp4_scenarios[0].user)
    assert np.array_equal(again.discs, exp4_scenarios[0].discs)


def test_zero_duration(pairs):
    sc = generate_dynamic_scenario(pairs[4].virt, 3, 0.0)
    assert len(sc.user) == 0 and sc.discs.shape[1] == 0
    assert sc.user_length == 0.0


def test_long_scenario_length_bound(pairs):
    sc = generate_dynamic_scenario(pairs[4].virt, 11, 350.0)
    assert sc.user_length <= 350.0
    # the user slows down for the discs: clearly below the free-walk distance
    assert sc.user_length < 0.98 * 350.0


# --- path files -------------------------------------------------------------------


def test_waypoint_file_round_trip(tmp_path, pairs):
    path = generate_waypoint_path(pairs[2].virt, 5, 100.0)
    f = tmp_path / "w.path"
    write_path_file(f, path, (0.1, -0.2, 3.0), 5)
    pf = read_path_file(f)
    assert isinstance(pf.trajectory, WaypointPath)
    assert np.array_equal(pf.trajectory.waypoints, path.waypoints)
    assert pf.trajectory.start_heading == path.start_heading
    assert pf.start_phys == (0.1, -0.2, 3.0) and pf.seed == 5


def test_dynamic_file_round_trip(tmp_path, exp4_scenarios):
    sc = exp4_scenarios[1]
    f = tmp_path / "d.path"
    write_path_file(f, sc)
    pf = read_path_file(f)
    assert isinstance(pf.trajectory, DynamicScenario)
    assert np.array_equal(pf.trajectory.user, sc.user)
    assert np.array_equal(pf.trajectory.discs, sc.discs)
    assert pf.trajectory.dt == sc.dt and pf.start_phys is None and pf.seed is None


def test_malformed_path_file(tmp_path):
    f = tmp_path / "bad.path"
    f.write_text("kind spiral\n1 2\n")
    with pytest.raises(ValueError):
        read_path_file(f)
    f.write_text("kind waypoint\n1 2\n")
    with pytest.raises(ValueError):
        read_path_file(f)
