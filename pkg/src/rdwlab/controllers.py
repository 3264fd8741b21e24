"""Redirection controllers.

A controller is a function ``ControllerContext -> ControllerDecision``. All of
them are stateless; :data:`CONTROLLERS` maps the command-line names to them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geom import (
    Slice,
    VisibilityPolygon,
    canonical_angle,
    ray_distance,
    repulsion_vector,
    signed_angle,
    visibility_polygon,
    with_heading,
    wrap_pi,
)
from .redirect import (
    IDENTITY,
    MAX_CURVATURE,
    MAX_ROT_GAIN,
    MAX_TRANS_GAIN,
    MIN_ROT_GAIN,
    MIN_TRANS_GAIN,
    DualState,
    Gains,
    MotionKind,
    ResetStrategy,
    VirtMotion,
)

# headings closer than this to the steering target count as aligned (rad)
ALIGNED_TOL = 1e-6
_TIE_TOL = 1e-12
HALF_PI = 0.5 * math.pi
S2C_DEADBAND = 0.5


@dataclass(frozen=True)
class ControllerContext:
    state: DualState
    motion: VirtMotion
    phys_snapshot: object
    virt_snapshot: object


@dataclass(frozen=True)
class ControllerDecision:
    gains: Gains
    debug: dict | None = field(default=None, compare=False)


def clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def curvature_toward(theta_delta: float) -> float:
    """Full curvature in the direction of ``theta_delta``; zero when already aligned."""
    if abs(theta_delta) < ALIGNED_TOL:
        return 0.0
    return math.copysign(MAX_CURVATURE, theta_delta)


def rotation_gain_toward(dtheta: float, theta_delta: float) -> float:
    """Amplify turns toward the target direction, dampen turns away from it."""
    if abs(theta_delta) < ALIGNED_TOL or dtheta == 0.0:
        return 1.0
    return MAX_ROT_GAIN if (dtheta > 0) == (theta_delta > 0) else MIN_ROT_GAIN


def steer_gains(motion: VirtMotion, theta_delta: float, g_t: float = 1.0) -> Gains:
    """Bang-bang gains steering toward a target ``theta_delta`` radians away (CCW positive)."""
    if motion.kind is MotionKind.WALK:
        return Gains(g_t, 1.0, curvature_toward(theta_delta))
    if motion.kind is MotionKind.TURN:
        return Gains(1.0, rotation_gain_toward(motion.amount, theta_delta), 0.0)
    return IDENTITY


# ---------------------------------------------------------------------------
# visibility-polygon controller


def active_slice_index(p_virt: VisibilityPolygon, theta_virt: float) -> int:
    b = p_virt.bisectors
    d = np.abs(theta_virt - b) % (2 * math.pi)
    d = np.minimum(d, 2 * math.pi - d)
    cand = np.flatnonzero(d <= d.min() + _TIE_TOL)
    if len(cand) == 1:
        return int(cand[0])
    return int(cand[np.argmax(p_virt.areas[cand])])


def vis_active_slice(p_virt: VisibilityPolygon, theta_virt: float) -> Slice:
    """Virtual slice whose bisector is closest to the virtual heading."""
    return p_virt.slice(active_slice_index(p_virt, theta_virt))


def most_similar_slice_index(p_phys: VisibilityPolygon, target_area: float) -> int:
    off = p_phys.offsets
    eligible = np.flatnonzero(off < HALF_PI)
    if len(eligible) == 0:
        cand = np.flatnonzero(off <= off.min() + _TIE_TOL)
        return int(cand[0])
    err = np.abs(p_phys.areas[eligible] - target_area)
    cand = eligible[err <= err.min() + _TIE_TOL]
    if len(cand) == 1:
        return int(cand[0])
    return int(cand[np.argmin(off[cand])])


def vis_most_similar_slice(p_phys: VisibilityPolygon, theta_phys: float, s_virt: Slice) -> Slice:
    """Physical slice in front of the user (offset < 90 deg) whose area best matches ``s_virt``."""
    if abs(canonical_angle(theta_phys) - p_phys.heading) > 1e-15:
        p_phys = with_heading(p_phys, theta_phys)
    return p_phys.slice(most_similar_slice_index(p_phys, s_virt.area))


def vis_gains(s_virt: Slice, s_phys: Slice, theta_phys: float, motion: VirtMotion,
              virt_offset: float | None = None, relative: bool = False) -> Gains:
    """Gains steering the physical heading toward the bisector of ``s_phys``.

    ``virt_offset`` is the signed angle from the virtual heading to the
    virtual slice's bisector. When the physical bisector sits at the same
    offset from the physical heading the user is already aligned and no
    steering is applied. With ``relative`` the steering error is always the
    difference of the two offsets instead of the offset to the physical
    bisector alone.
    """
    phys_offset = signed_angle(theta_phys, s_phys.bisector)
    if virt_offset is None:
        theta_delta = phys_offset
    else:
        mismatch = wrap_pi(phys_offset - virt_offset)
        if abs(mismatch) < ALIGNED_TOL:
            theta_delta = 0.0
        else:
            theta_delta = mismatch if relative else phys_offset
    g_t = clamp(s_phys.avg_length / s_virt.avg_length, MIN_TRANS_GAIN, MAX_TRANS_GAIN)
    return steer_gains(motion, theta_delta, g_t)


def vis_poly_controller(ctx: ControllerContext, relative: bool = False) -> ControllerDecision:
    if ctx.motion.kind is MotionKind.IDLE:
        return ControllerDecision(IDENTITY)
    phys, virt = ctx.state.phys, ctx.state.virt
    p_phys = visibility_polygon(ctx.phys_snapshot, phys.p, phys.theta)
    p_virt = visibility_polygon(ctx.virt_snapshot, virt.p, virt.theta)
    iv = active_slice_index(p_virt, virt.theta)
    s_virt = p_virt.slice(iv)
    ip = most_similar_slice_index(p_phys, s_virt.area)
    s_phys = p_phys.slice(ip)
    offset = signed_angle(virt.theta, s_virt.bisector)
    gains = vis_gains(s_virt, s_phys, phys.theta, ctx.motion, offset, relative)
    return ControllerDecision(gains, {"virt_slice": iv, "phys_slice": ip,
                                      "v_o": s_phys.bisector})


def vis_poly_relative_controller(ctx: ControllerContext) -> ControllerDecision:
    """Variant steering the physical bisector offset toward the virtual one."""
    return vis_poly_controller(ctx, relative=True)


# ---------------------------------------------------------------------------
# baselines


def s2c_controller(ctx: ControllerContext) -> ControllerDecision:
    """Steer-to-center: always redirect toward the physical room centroid."""
    phys = ctx.state.phys
    cx, cy = ctx.phys_snapshot.centroid
    dx, dy = cx - phys.x, cy - phys.y
    if ctx.motion.kind is MotionKind.IDLE or math.hypot(dx, dy) < S2C_DEADBAND:
        return ControllerDecision(IDENTITY)
    target = math.atan2(dy, dx)
    return ControllerDecision(steer_gains(ctx.motion, signed_angle(phys.theta, target)),
                              {"v_o": canonical_angle(target)})


def apf_controller(ctx: ControllerContext) -> ControllerDecision:
    """Artificial potential field: steer along the summed repulsion from every physical edge."""
    phys = ctx.state.phys
    if ctx.motion.kind is MotionKind.IDLE:
        return ControllerDecision(IDENTITY)
    fx, fy = repulsion_vector(ctx.phys_snapshot, phys.p)
    if math.hypot(fx, fy) < 1e-9:
        return ControllerDecision(IDENTITY, {"force": (fx, fy)})
    target = math.atan2(fy, fx)
    return ControllerDecision(steer_gains(ctx.motion, signed_angle(phys.theta, target)),
                              {"force": (fx, fy), "v_o": canonical_angle(target)})


def arc_controller(ctx: ControllerContext) -> ControllerDecision:
    """Alignment baseline comparing physical and virtual ray clearances ahead, left and right."""
    if ctx.motion.kind is MotionKind.IDLE:
        return ControllerDecision(IDENTITY)
    phys, virt = ctx.state.phys, ctx.state.virt

    def probe(snap, pose):
        return (ray_distance(snap, pose.p, pose.theta),
                ray_distance(snap, pose.p, pose.theta + HALF_PI),
                ray_distance(snap, pose.p, pose.theta - HALF_PI))

    p_ahead, p_left, p_right = probe(ctx.phys_snapshot, phys)
    v_ahead, v_left, v_right = probe(ctx.virt_snapshot, virt)
    left, right = p_left / v_left, p_right / v_right
    if abs(left - right) <= 1e-9 * max(left, right):
        side = 0.0
    else:
        side = 1.0 if left > right else -1.0
    debug = {"ahead": (p_ahead, v_ahead), "ratios": (left, right)}
    if ctx.motion.kind is MotionKind.WALK:
        g_t = clamp(p_ahead / v_ahead, MIN_TRANS_GAIN, MAX_TRANS_GAIN)
        return ControllerDecision(Gains(g_t, 1.0, side * MAX_CURVATURE), debug)
    return ControllerDecision(Gains(1.0, rotation_gain_toward(ctx.motion.amount, side), 0.0), debug)


def no_controller(ctx: ControllerContext) -> ControllerDecision:
    return ControllerDecision(IDENTITY)


CONTROLLERS = {
    "vis-poly": vis_poly_controller,
    "arc": arc_controller,
    "apf": apf_controller,
    "s2c": s2c_controller,
    "none": no_controller,
    "vis-poly-relative": vis_poly_relative_controller,
}

RESET_STRATEGY = {
    "vis-poly": ResetStrategy.MAX_CLEARANCE,
    "vis-poly-relative": ResetStrategy.MAX_CLEARANCE,
    "arc": ResetStrategy.MAX_CLEARANCE,
    "apf": ResetStrategy.RESET_TO_CENTER,
    "s2c": ResetStrategy.RESET_TO_CENTER,
    "none": ResetStrategy.MAX_CLEARANCE,
}


def controller_step(kind: str, ctx: ControllerContext) -> ControllerDecision:
    try:
        fn = CONTROLLERS[kind]
    except KeyError:
        raise ValueError(f"unknown controller {kind!r}; choose from {sorted(CONTROLLERS)}") from None
    return fn(ctx)
