"""Trial simulation and the batch harness.

A trial steps the virtual user along a path one frame at a time, asks the
controller for gains, applies them to the physical user and resets when the
physical user gets too close to an edge. Resets are executed as one step:
the virtual user is frozen for the duration of a full turn while the
physical heading is replaced.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .controllers import CONTROLLERS, RESET_STRATEGY, ControllerContext
from .env import EnvPair, Environment, snapshot_at_index
from .geom import point_clearance, wrap_pi
from .locomotion import (
    DynamicScenario,
    WaypointPath,
    generate_dynamic_scenario,
    generate_waypoint_path,
    read_path_file,
    sample_free_point,
    write_path_file,
)
from .redirect import (
    DualState,
    MotionKind,
    UserPose,
    VirtMotion,
    apply_frame,
    execute_reset,
)

# scenario length that yields ~136 m of user walking in the dynamic scenes
DYNAMIC_DURATION = 165.0
STATIC_PATH_LENGTH = 350.0
START_CLEARANCE = 0.7


class StartPoseInvalid(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.05
    walk_speed: float = 1.0
    turn_speed: float = math.pi / 2
    user_radius: float = 0.5
    reset_clearance: float = 0.2
    record_trace: bool = False

    def __post_init__(self):
        for name in ("dt", "walk_speed", "turn_speed", "user_radius", "reset_clearance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"SimConfig.{name} must be positive")

    @property
    def reset_duration(self) -> float:
        return 2 * math.pi / self.turn_speed


@dataclass(frozen=True, eq=False)
class PathTrace:
    """Per-frame poses ``(x, y, theta)``; ``resets`` holds the frame index at each reset."""

    phys: np.ndarray
    virt: np.ndarray
    resets: np.ndarray


@dataclass(frozen=True)
class GainExtremes:
    min_g_t: float = math.inf
    max_g_t: float = -math.inf
    min_g_r: float = math.inf
    max_g_r: float = -math.inf
    max_abs_g_c: float = 0.0


@dataclass(frozen=True)
class TrialResult:
    controller: str
    trial: int
    seed: int
    resets: int
    virt_distance: float
    sim_time: float
    frames: int
    min_clearance: float
    gains: GainExtremes
    wall_time: float = field(default=0.0, compare=False)
    trace: PathTrace | None = field(default=None, compare=False, repr=False)

    @property
    def resets_per_meter(self) -> float:
        return self.resets / self.virt_distance if self.virt_distance > 0 else 0.0


# ---------------------------------------------------------------------------
# path cursors: turn a path into per-frame virtual motions


class _WaypointCursor:
    def __init__(self, path: WaypointPath, cfg: SimConfig):
        self.pts = path.waypoints
        self.j = 1
        self.walking = False
        self.max_turn = cfg.turn_speed * cfg.dt
        self.step = cfg.walk_speed * cfg.dt
        self._next = None

    def snapshot_index(self) -> int:
        return 0

    def peek(self, virt: UserPose):
        """Next motion (or None at the end) without advancing."""
        while self.j < len(self.pts):
            tx, ty = self.pts[self.j]
            dx, dy = tx - virt.x, ty - virt.y
            dist = math.hypot(dx, dy)
            if not self.walking:
                err = wrap_pi(math.atan2(dy, dx) - virt.theta) if dist > 0 else 0.0
                if abs(err) <= self.max_turn:
                    if err == 0.0:
                        self.walking = True
                        continue
                    self._next = (self.j, True)
                    return VirtMotion.turn(err)
                self._next = (self.j, False)
                return VirtMotion.turn(math.copysign(self.max_turn, err))
            if dist <= self.step:
                self._next = (self.j + 1, False)
                return VirtMotion.walk(dist)
            self._next = (self.j, True)
            return VirtMotion.walk(self.step)
        return None

    def commit(self) -> bool:
        """Advance past the peeked motion; True when it ends a frame."""
        self.j, self.walking = self._next
        return True


class _ScenarioCursor:
    """Each recorded sample step becomes a turn sub-frame and a walk sub-frame."""

    def __init__(self, scenario: DynamicScenario):
        self.user = scenario.user
        self.k = 0
        self.sub = 0
        self._advance = None

    def snapshot_index(self) -> int:
        return self.k

    def peek(self, virt: UserPose):
        if self.k + 1 >= len(self.user):
            return None
        x, y, th = self.user[self.k + 1]
        if self.sub == 0:
            err = wrap_pi(th - virt.theta)
            if err != 0.0:
                self._advance = 1
                return VirtMotion.turn(err)
        # recorded steps run along the new heading; projecting onto it keeps
        # rounding residue from ever turning into a step backwards
        dist = (x - virt.x) * math.cos(virt.theta) + (y - virt.y) * math.sin(virt.theta)
        self._advance = 2
        return VirtMotion.walk(dist) if dist > 1e-12 else VirtMotion.idle()

    def commit(self) -> bool:
        if self._advance == 1:
            self.sub = 1
            return False
        self.k += 1
        self.sub = 0
        return True


# ---------------------------------------------------------------------------
# trials


def _phys_snapshot(env: Environment):
    if not env.is_static:
        raise ValueError("physical environments must be static")
    return env.static_snapshot


def run_trial(pair: EnvPair, controller: str, path, start: DualState,
              cfg: SimConfig = SimConfig(), trial: int = 0, seed: int = 0) -> TrialResult:
    """Simulate one path with one controller from ``start``."""
    t0 = time.perf_counter()
    try:
        control = CONTROLLERS[controller]
    except KeyError:
        raise ValueError(f"unknown controller {controller!r}") from None
    strategy = RESET_STRATEGY[controller]
    phys_snap = _phys_snapshot(pair.phys)
    r = cfg.user_radius
    # compare centre distance to one summed limit so 0.7 m exactly does not trigger
    limit = r + cfg.reset_clearance

    if isinstance(path, DynamicScenario):
        venv = path.environment(pair.virt) if not pair.virt.is_static else pair.virt
        cursor = _ScenarioCursor(path)
        cache: dict[int, object] = {}

        def virt_snap():
            k = cursor.snapshot_index()
            snap = cache.get(k)
            if snap is None:
                cache.clear()
                snap = cache[k] = snapshot_at_index(venv, k)
            return snap
    else:
        vs = pair.virt.static_snapshot
        cursor = _WaypointCursor(path, cfg)

        def virt_snap():
            return vs

    clearance = point_clearance(phys_snap, start.phys.p)
    if not clearance > limit:
        raise StartPoseInvalid(f"physical start {start.phys.p} has edge clearance {clearance - r:.3f}")
    vc = point_clearance(virt_snap(), start.virt.p)
    if not vc > limit:
        raise StartPoseInvalid(f"virtual start {start.virt.p} has edge clearance {vc - r:.3f}")

    state = start
    resets = frames = 0
    distance = sim_time = 0.0
    min_clear = clearance
    grace = just_reset = False
    lo_t = lo_r = math.inf
    hi_t = hi_r = -math.inf
    hi_c = 0.0
    trace_p, trace_v, trace_r = [], [], []
    if cfg.record_trace:
        trace_p.append((state.phys.x, state.phys.y, state.phys.theta))
        trace_v.append((state.virt.x, state.virt.y, state.virt.theta))

    while True:
        motion = cursor.peek(state.virt)
        if motion is None:
            break
        gains = control(ControllerContext(state, motion, phys_snap, virt_snap())).gains
        lo_t, hi_t = min(lo_t, gains.g_t), max(hi_t, gains.g_t)
        lo_r, hi_r = min(lo_r, gains.g_r), max(hi_r, gains.g_r)
        hi_c = max(hi_c, abs(gains.g_c))
        cand = apply_frame(state, motion, gains)

        reset_now = False
        if motion.kind is MotionKind.WALK:
            new_clear = point_clearance(phys_snap, cand.phys.p)
            if grace and new_clear < limit and new_clear < clearance and not just_reset:
                # still inside the trigger band and heading further in
                state, _ = _reset(state, strategy, phys_snap, cfg)
                resets += 1
                sim_time += cfg.reset_duration
                just_reset = True
                if cfg.record_trace:
                    trace_r.append(len(trace_p) - 1)
                continue
            clearance = new_clear
            min_clear = min(min_clear, clearance)
            if clearance >= limit:
                grace = False
            elif not grace:
                reset_now = True
            distance += motion.amount

        state = cand
        just_reset = False
        if cursor.commit():
            frames += 1
            sim_time += cfg.dt
        if cfg.record_trace:
            trace_p.append((state.phys.x, state.phys.y, state.phys.theta))
            trace_v.append((state.virt.x, state.virt.y, state.virt.theta))
        if reset_now:
            state, _ = _reset(state, strategy, phys_snap, cfg)
            resets += 1
            sim_time += cfg.reset_duration
            grace = just_reset = True
            if cfg.record_trace:
                trace_r.append(len(trace_p) - 1)
                trace_p[-1] = (state.phys.x, state.phys.y, state.phys.theta)

    trace = None
    if cfg.record_trace:
        trace = PathTrace(np.array(trace_p), np.array(trace_v), np.array(trace_r, dtype=np.int64))
    extremes = GainExtremes(lo_t, hi_t, lo_r, hi_r, hi_c)
    return TrialResult(controller, trial, seed, resets, distance, sim_time, frames, min_clear - r,
                       extremes, time.perf_counter() - t0, trace)


def _reset(state, strategy, phys_snap, cfg):
    return execute_reset(state, strategy, phys_snap, cfg.turn_speed, cfg.user_radius)


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True, eq=False)
class Trial:
    index: int
    seed: int
    path: object
    start: DualState


def _trial_seeds(seed: int, n: int) -> list[int]:
    return [int(s.generate_state(1, np.uint64)[0] >> np.uint64(1))
            for s in np.random.SeedSequence(seed).spawn(n)]


def make_trial(pair: EnvPair, index: int, seed: int,
               path_length: float = STATIC_PATH_LENGTH,
               duration: float = DYNAMIC_DURATION) -> Trial:
    """Path and physical start for one trial, both derived from ``seed``."""
    if pair.virt.is_static:
        path = generate_waypoint_path(pair.virt, seed, path_length)
    else:
        path = generate_dynamic_scenario(pair.virt, seed, duration)
    rng = np.random.default_rng([seed, 1])
    px, py = sample_free_point(pair.phys, rng, START_CLEARANCE)
    ptheta = float(rng.uniform(0.0, 2 * math.pi))
    start = DualState(UserPose(px, py, ptheta), _virt_start(path))
    return Trial(index, seed, path, start)


def make_trials(pair: EnvPair, n_trials: int, seed: int, **kw) -> list[Trial]:
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    return [make_trial(pair, i, s, **kw) for i, s in enumerate(_trial_seeds(seed, n_trials))]


def _virt_start(path) -> UserPose:
    if isinstance(path, DynamicScenario):
        x, y, theta = path.user[0]
        return UserPose(float(x), float(y), float(theta))
    x, y = path.start
    return UserPose(x, y, path.start_heading)


def export_trials(trials: Sequence[Trial], directory) -> list[Path]:
    """Write one path file per trial (``trial_000.path``, ...) including its physical start."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for t in trials:
        f = directory / f"trial_{t.index:03d}.path"
        p = t.start.phys
        write_path_file(f, t.path, (p.x, p.y, p.theta), t.seed)
        out.append(f)
    return out


def import_trials(directory) -> list[Trial]:
    """Trials from every ``*.path`` file in ``directory``, in file-name order."""
    files = sorted(Path(directory).glob("*.path"))
    if not files:
        raise FileNotFoundError(f"no .path files in {directory}")
    trials = []
    for i, f in enumerate(files):
        pf = read_path_file(f)
        if pf.start_phys is None:
            raise ValueError(f"{f}: missing start_phys line")
        start = DualState(UserPose(*pf.start_phys), _virt_start(pf.trajectory))
        trials.append(Trial(i, pf.seed if pf.seed is not None else i, pf.trajectory, start))
    return trials


_POOL_STATE: dict = {}


def _pool_init(pair, trials, cfg):
    _POOL_STATE.update(pair=pair, trials=trials, cfg=cfg)


def _pool_run(job):
    controller, i = job
    t = _POOL_STATE["trials"][i]
    return run_trial(_POOL_STATE["pair"], controller, t.path, t.start, _POOL_STATE["cfg"],
                     t.index, t.seed)


def run_experiment(pair: EnvPair, controllers: Sequence[str], n_trials: int = 100,
                   seed: int = 0, cfg: SimConfig = SimConfig(), workers: int | None = 1,
                   trials: Sequence[Trial] | None = None) -> list[TrialResult]:
    """Run every controller on the same trials; results ordered by (controller, trial).

    ``workers=None`` uses every available core. Pass ``trials`` to replay
    previously generated or imported paths instead of generating them.
    """
    for c in controllers:
        if c not in CONTROLLERS:
            raise ValueError(f"unknown controller {c!r}")
    if trials is None:
        trials = make_trials(pair, n_trials, seed)
    jobs = [(c, i) for c in controllers for i in range(len(trials))]
    if workers is None:
        workers = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count()
    workers = max(1, min(workers, len(jobs)))
    if workers == 1:
        return [run_trial(pair, c, trials[i].path, trials[i].start, cfg, trials[i].index,
                          trials[i].seed) for c, i in jobs]
    import multiprocessing as mp

    with mp.get_context("fork").Pool(workers, _pool_init, (pair, list(trials), cfg)) as pool:
        return pool.map(_pool_run, jobs, chunksize=1)


# ---------------------------------------------------------------------------
# svg export


def _svg_ring(ring, scale) -> str:
    pts = " ".join(f"{x * scale:.3f},{-y * scale:.3f}" for x, y in ring)
    return f'<polygon points="{pts}"/>'


def _svg_panel(env: Environment, poses, resets, colour, scale, dx) -> list[str]:
    b = env.boundary
    out = [f'<g transform="translate({dx:.3f},0)">',
           '<g fill="#f4f4f4" stroke="#333" stroke-width="1">', _svg_ring(b, scale), "</g>",
           '<g fill="#bbb" stroke="#333" stroke-width="1">']
    out += [_svg_ring(o, scale) for o in env.static_obstacles]
    out.append("</g>")
    if len(poses):
        pts = " ".join(f"{x * scale:.2f},{-y * scale:.2f}" for x, y in poses[:, :2])
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="0.8" points="{pts}"/>')
    for i in resets:
        x, y = poses[i, :2]
        out.append(f'<circle cx="{x * scale:.2f}" cy="{-y * scale:.2f}" r="3" fill="red"/>')
    out.append("</g>")
    return out


def trace_svg(pair: EnvPair, trace: PathTrace, scale: float = 20.0) -> str:
    """Physical path with reset markers over the PE, virtual path over the VE, side by side."""
    pb, vb = pair.phys.boundary, pair.virt.boundary
    pw = (pb[:, 0].max() - pb[:, 0].min()) * scale
    vw = (vb[:, 0].max() - vb[:, 0].min()) * scale
    h = max(pb[:, 1].max() - pb[:, 1].min(), vb[:, 1].max() - vb[:, 1].min()) * scale
    gap = 2 * scale
    x0 = -pb[:, 0].min() * scale + scale
    x1 = x0 + pw + gap - vb[:, 0].min() * scale + pb[:, 0].min() * scale
    top = -max(pb[:, 1].max(), vb[:, 1].max()) * scale - scale
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" '
             f'viewBox="0 {top:.3f} {pw + vw + gap + 2 * scale:.3f} {h + 2 * scale:.3f}">']
    lines += _svg_panel(pair.phys, trace.phys, trace.resets, "#1f77b4", scale, x0)
    lines += _svg_panel(pair.virt, trace.virt, [], "#2ca02c", scale, x1)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
