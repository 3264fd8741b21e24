"""Virtual path generation.

Static scenes use a random-waypoint walker: each leg has a uniformly drawn
length and turn, and legs whose swept user disc would touch an obstacle are
redrawn. Dynamic scenes step the user and the moving discs together with
ORCA, each agent heading for a random goal that is redrawn on arrival.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .env import Environment
from .geom import canonical_angle, point_clearance, segment_clear, wrap_pi
from .orca import _orca_lines, _orca_step, _speed_along


class SamplingExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class PathModel:
    """Random-waypoint parameters. Lengths in metres, angles in radians."""

    min_leg: float = 2.0
    max_leg: float = 8.0
    max_turn: float = math.pi
    # user radius 0.5 m + 0.2 m reset margin: a leg that is clear in the
    # virtual room never triggers a reset when walked in an identical room
    inflation: float = 0.7
    start_clearance: float = 0.7
    max_rejections: int = 100_000


@dataclass(frozen=True, eq=False)
class WaypointPath:
    """Turn in place toward each waypoint, then walk straight to it."""

    waypoints: np.ndarray
    start_heading: float = 0.0

    @property
    def start(self) -> tuple[float, float]:
        return (float(self.waypoints[0, 0]), float(self.waypoints[0, 1]))

    @property
    def length(self) -> float:
        if len(self.waypoints) < 2:
            return 0.0
        return float(np.linalg.norm(np.diff(self.waypoints, axis=0), axis=1).sum())


def sample_free_point(env, rng: np.random.Generator, clearance: float,
                      max_tries: int = 100_000) -> tuple[float, float]:
    """Uniform point of the walkable region with at least ``clearance`` to every edge."""
    b = env.boundary if isinstance(env, Environment) else env.boundary
    snap = env.static_snapshot if isinstance(env, Environment) else env
    lo, hi = b.min(axis=0), b.max(axis=0)
    for _ in range(max_tries):
        p = (float(rng.uniform(lo[0], hi[0])), float(rng.uniform(lo[1], hi[1])))
        if point_clearance(snap, p) > clearance:
            return p
    raise SamplingExhausted(f"no free point with clearance {clearance} after {max_tries} draws")


def _next_waypoint(snap, rng, prev, direction, model):
    for _ in range(model.max_rejections):
        leg = rng.uniform(model.min_leg, model.max_leg)
        d = direction + rng.uniform(-model.max_turn, model.max_turn)
        cand = (prev[0] + leg * math.cos(d), prev[1] + leg * math.sin(d))
        if segment_clear(snap, prev, cand, model.inflation):
            return cand, leg, d
    return None


def generate_waypoint_path(env_virt: Environment, rng_seed: int, target_length: float = 350.0,
                           model: PathModel = PathModel(), max_starts: int = 100) -> WaypointPath:
    """Random-waypoint path of at least ``target_length`` metres.

    A start point from which no first leg fits (a pocket between obstacles)
    is redrawn, up to ``max_starts`` times.
    """
    rng = np.random.default_rng(rng_seed)
    snap = env_virt.static_snapshot
    for _ in range(max_starts):
        start = sample_free_point(env_virt, rng, model.start_clearance)
        heading = float(rng.uniform(0.0, 2 * math.pi))
        if target_length <= 0:
            return WaypointPath(np.array([start], dtype=np.float64), heading)
        first = _next_waypoint(snap, rng, start, heading, model)
        if first is not None:
            break
    else:
        raise SamplingExhausted(f"no start point with a clear first leg in {max_starts} tries")
    pts = [start, first[0]]
    total, direction = first[1], first[2]
    while total < target_length:
        nxt = _next_waypoint(snap, rng, pts[-1], direction, model)
        if nxt is None:
            raise SamplingExhausted(f"{model.max_rejections} rejected waypoints in a row")
        pts.append(nxt[0])
        total += nxt[1]
        direction = nxt[2]
    return WaypointPath(np.array(pts, dtype=np.float64), heading)


# ---------------------------------------------------------------------------
# dynamic scenes


@dataclass(frozen=True)
class ScenarioModel:
    n_discs: int = 4
    user_radius: float = 0.5
    disc_radius: float = 0.5
    pref_speed: float = 1.0
    dt: float = 0.05
    tau: float = 2.0
    tau_obst: float = 1.0
    # agents plan with this extra radius so the realized gaps stay positive
    safety_margin: float = 0.05
    goal_tolerance: float = 0.3
    goal_timeout: float = 60.0
    max_turn_rate: float = math.pi / 2
    spawn_clearance: float = 0.7


@dataclass(frozen=True, eq=False)
class DynamicScenario:
    """Timed virtual user poses plus the positions of every moving disc.

    ``user`` rows are ``(x, y, theta)``; ``discs`` has shape ``(n_discs, T, 2)``.
    """

    user: np.ndarray
    discs: np.ndarray
    dt: float = 0.05
    disc_radius: float = 0.5

    @property
    def duration(self) -> float:
        return max(len(self.user) - 1, 0) * self.dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.user)) * self.dt

    @property
    def user_length(self) -> float:
        if len(self.user) < 2:
            return 0.0
        return float(np.linalg.norm(np.diff(self.user[:, :2], axis=0), axis=1).sum())

    @property
    def start_heading(self) -> float:
        return float(self.user[0, 2])

    def environment(self, env_virt: Environment) -> Environment:
        """``env_virt`` with this scenario's disc trajectories attached."""
        return env_virt.with_trajectories(list(self.discs), self.dt)


def generate_dynamic_scenario(env_virt: Environment, rng_seed: int, duration: float,
                              model: ScenarioModel = ScenarioModel()) -> DynamicScenario:
    n = 1 + model.n_discs
    steps = int(round(duration / model.dt))
    if steps <= 0:
        return DynamicScenario(np.zeros((0, 3)), np.zeros((model.n_discs, 0, 2)), model.dt,
                               model.disc_radius)
    rng = np.random.default_rng(rng_seed)
    snap = env_virt.static_snapshot
    segs = np.ascontiguousarray(snap.segments.segs)
    true_rad = np.array([model.user_radius] + [model.disc_radius] * model.n_discs)
    plan_rad = true_rad + model.safety_margin
    max_speed = np.full(n, model.pref_speed)

    def free_goal(i):
        return sample_free_point(env_virt, rng, true_rad[i] + model.spawn_clearance)

    pos = np.empty((n, 2))
    for i in range(n):
        for _ in range(100_000):
            p = free_goal(i)
            if all(math.dist(p, pos[j]) > true_rad[i] + true_rad[j] + 0.5 for j in range(i)):
                pos[i] = p
                break
        else:
            raise SamplingExhausted("cannot place agents without overlap")
    goals = np.array([free_goal(i) for i in range(n)])
    goal_age = np.zeros(n)
    vel = np.zeros((n, 2))
    heading = float(rng.uniform(0.0, 2 * math.pi))
    max_turn = model.max_turn_rate * model.dt

    user = np.empty((steps + 1, 3))
    discs = np.empty((model.n_discs, steps + 1, 2))
    user[0] = (pos[0, 0], pos[0, 1], heading)
    discs[:, 0] = pos[1:]
    for k in range(1, steps + 1):
        for i in range(n):
            if (math.dist(pos[i], goals[i]) < model.goal_tolerance
                    or goal_age[i] > model.goal_timeout):
                goals[i] = free_goal(i)
                goal_age[i] = 0.0
        delta = goals - pos
        dist = np.linalg.norm(delta, axis=1, keepdims=True)
        pref = delta / np.maximum(dist, 1e-12) * np.minimum(model.pref_speed, dist / model.dt)
        new_vel = _orca_step(pos, vel, plan_rad, pref, max_speed, segs,
                             model.tau, model.tau_obst, model.dt)

        # the user walks along their heading, which turns at a bounded rate
        vx, vy = new_vel[0]
        speed = math.hypot(vx, vy)
        if speed > 1e-9:
            err = wrap_pi(math.atan2(vy, vx) - heading)
            heading = canonical_angle(heading + max(-max_turn, min(max_turn, err)))
        hx, hy = math.cos(heading), math.sin(heading)
        lines, _ = _orca_lines(0, pos, vel, plan_rad, segs, model.tau, model.tau_obst,
                               model.dt, model.pref_speed)
        s = _speed_along(lines, hx, hy, max(0.0, vx * hx + vy * hy), model.pref_speed)
        new_vel[0] = (s * hx, s * hy)

        vel = new_vel
        pos = pos + vel * model.dt
        goal_age += model.dt
        user[k] = (pos[0, 0], pos[0, 1], heading)
        discs[:, k] = pos[1:]
    return DynamicScenario(user, discs, model.dt, model.disc_radius)


def min_pairwise_distance(scenario: DynamicScenario) -> float:
    """Smallest centre-to-centre distance between any two agents over all samples."""
    tracks = [scenario.user[:, :2]] + list(scenario.discs)
    best = math.inf
    for i in range(len(tracks)):
        for j in range(i + 1, len(tracks)):
            if len(tracks[i]):
                best = min(best, float(np.linalg.norm(tracks[i] - tracks[j], axis=1).min()))
    return best


# ---------------------------------------------------------------------------
# path files


def _f(x: float) -> str:
    return repr(float(x))


class PathFile(NamedTuple):
    trajectory: "WaypointPath | DynamicScenario"
    start_phys: tuple[float, float, float] | None = None
    seed: int | None = None


def write_path_file(path, trajectory, start_phys=None, seed: int | None = None) -> None:
    """Write a waypoint path or dynamic scenario as text, one waypoint or timed sample per line.

    Floats are written with ``repr`` so that reading the file back is bit-exact.
    """
    lines = ["# rdw-lab path file"]
    if seed is not None:
        lines.append(f"seed {int(seed)}")
    if start_phys is not None:
        lines.append("start_phys " + " ".join(_f(v) for v in start_phys))
    if isinstance(trajectory, WaypointPath):
        lines.append("kind waypoint")
        lines.append(f"start_heading {_f(trajectory.start_heading)}")
        lines += [f"{_f(x)} {_f(y)}" for x, y in trajectory.waypoints]
    else:
        lines.append("kind dynamic")
        lines.append(f"dt {_f(trajectory.dt)}")
        lines.append(f"disc_radius {_f(trajectory.disc_radius)}")
        lines.append(f"discs {trajectory.discs.shape[0]}")
        for k in range(len(trajectory.user)):
            row = [k * trajectory.dt, *trajectory.user[k], *trajectory.discs[:, k].ravel()]
            lines.append(" ".join(_f(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_path_file(path) -> PathFile:
    """Inverse of :func:`write_path_file`."""
    header: dict[str, str] = {}
    rows = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head = line.split()[0]
        if head[0].isalpha():
            header[head] = line[len(head):].strip()
        else:
            rows.append([float(v) for v in line.split()])
    start_phys = None
    if "start_phys" in header:
        start_phys = tuple(float(v) for v in header["start_phys"].split())
        if len(start_phys) != 3:
            raise ValueError(f"{path}: start_phys needs x y theta")
    seed = int(header["seed"]) if "seed" in header else None
    kind = header.get("kind")
    try:
        if kind == "waypoint":
            traj = WaypointPath(np.array(rows, dtype=np.float64).reshape(-1, 2),
                                float(header["start_heading"]))
        elif kind == "dynamic":
            n_discs = int(header["discs"])
            arr = np.array(rows, dtype=np.float64).reshape(len(rows), 4 + 2 * n_discs)
            user = arr[:, 1:4].copy()
            discs = arr[:, 4:].reshape(len(rows), n_discs, 2).transpose(1, 0, 2).copy()
            traj = DynamicScenario(user, discs, float(header["dt"]), float(header["disc_radius"]))
        else:
            raise ValueError(f"{path}: unknown path kind {kind!r}")
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: malformed path file ({exc})") from None
    return PathFile(traj, start_phys, seed)
