"""Per-frame gain application and resets.

Gain convention: physical motion = virtual motion x gain. A translation gain
of 1.2 makes the user cover 1.2 m physically per virtual metre; a rotation
gain of 0.67 turns them 0.67 rad physically per virtual radian. Curvature
gains are stored as signed curvature (1/m, positive = counter-clockwise) and
rotate the physical heading by ``curvature * physical distance``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .geom import (
    TAU,
    canonical_angle,
    nearest_boundary_point,
    point_clearance,
    sweep_distances,
)

MIN_TRANS_GAIN = 0.86
MAX_TRANS_GAIN = 1.26
MIN_ROT_GAIN = 0.67
MAX_ROT_GAIN = 1.24
CURVATURE_RADIUS = 7.5
MAX_CURVATURE = 1.0 / CURVATURE_RADIUS

USER_RADIUS = 0.5
RESET_CLEARANCE = 0.2
TURN_SPEED = math.pi / 2
RESET_HEADINGS = 72
# a reset heading must leave at least this much straight walking room (m)
RESET_MIN_FREE = 1.0

_GAIN_EPS = 1e-12
_AWAY_TOL = 1e-9


class GainOutOfBounds(ValueError):
    pass


class NoSafeHeading(RuntimeError):
    """No sampled heading lets the user move at all."""


@dataclass(frozen=True, slots=True)
class UserPose:
    x: float
    y: float
    theta: float

    @property
    def p(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True, slots=True)
class DualState:
    phys: UserPose
    virt: UserPose


@dataclass(frozen=True, slots=True)
class Gains:
    g_t: float = 1.0
    g_r: float = 1.0
    g_c: float = 0.0

    def within_bounds(self) -> bool:
        return (MIN_TRANS_GAIN - _GAIN_EPS <= self.g_t <= MAX_TRANS_GAIN + _GAIN_EPS
                and MIN_ROT_GAIN - _GAIN_EPS <= self.g_r <= MAX_ROT_GAIN + _GAIN_EPS
                and abs(self.g_c) <= MAX_CURVATURE + _GAIN_EPS)


IDENTITY = Gains(1.0, 1.0, 0.0)


class MotionKind(enum.Enum):
    WALK = "walk"
    TURN = "turn"
    IDLE = "idle"


@dataclass(frozen=True, slots=True)
class VirtMotion:
    """What the virtual user does during one frame: walk ``amount`` m or turn ``amount`` rad."""

    kind: MotionKind
    amount: float = 0.0

    @classmethod
    def walk(cls, distance: float) -> "VirtMotion":
        if distance < 0:
            raise ValueError("walk distance must be non-negative")
        return cls(MotionKind.WALK, float(distance))

    @classmethod
    def turn(cls, dtheta: float) -> "VirtMotion":
        return cls(MotionKind.TURN, float(dtheta))

    @classmethod
    def idle(cls) -> "VirtMotion":
        return cls(MotionKind.IDLE, 0.0)


def _walk(pose: UserPose, distance: float, curvature: float) -> UserPose:
    # midpoint rule for the arc: half the rotation, the chord, the other half
    # (with zero curvature this is bit-identical to a straight step)
    half = 0.5 * distance * curvature
    th = pose.theta + half
    return UserPose(pose.x + distance * math.cos(th), pose.y + distance * math.sin(th),
                    canonical_angle(th + half))


def _turn(pose: UserPose, dtheta: float) -> UserPose:
    return UserPose(pose.x, pose.y, canonical_angle(pose.theta + dtheta))


def apply_frame(state: DualState, motion: VirtMotion, gains: Gains) -> DualState:
    """Advance the virtual pose by ``motion`` and the physical pose by ``motion`` under ``gains``."""
    if not gains.within_bounds():
        raise GainOutOfBounds(f"{gains} outside perceptual thresholds")
    if motion.kind is MotionKind.WALK:
        d = motion.amount
        return DualState(_walk(state.phys, d * gains.g_t, gains.g_c), _walk(state.virt, d, 0.0))
    if motion.kind is MotionKind.TURN:
        a = motion.amount
        return DualState(_turn(state.phys, a * gains.g_r), _turn(state.virt, a))
    return state


def edge_clearance(env_phys, p, user_radius: float = USER_RADIUS) -> float:
    """Gap between the user's disc and the nearest physical edge."""
    return point_clearance(env_phys, p) - user_radius


def needs_reset(env_phys, p_phys, user_radius: float = USER_RADIUS,
                reset_clearance: float = RESET_CLEARANCE) -> bool:
    """True when the user disc comes closer than ``reset_clearance`` to an edge (strict)."""
    return point_clearance(env_phys, p_phys) < user_radius + reset_clearance


class ResetStrategy(enum.Enum):
    RESET_TO_CENTER = "reset-to-center"
    MAX_CLEARANCE = "max-clearance"


def _candidate_headings(env_phys, pose: UserPose, user_radius: float):
    """Sampled headings, their free sweep distance and whether they face away from the nearest edge."""
    angles = np.arange(RESET_HEADINGS) * (TAU / RESET_HEADINGS)
    free = sweep_distances(env_phys, pose.p, angles, user_radius)
    nx, ny = nearest_boundary_point(env_phys, pose.p)
    ax, ay = pose.x - nx, pose.y - ny
    # headings tangent to the edge do not count as away (rounding decides their sign)
    away = (np.cos(angles) * ax + np.sin(angles) * ay) > _AWAY_TOL * math.hypot(ax, ay)
    return angles, free, away


def reset_heading(env_phys, pose: UserPose, strategy: ResetStrategy,
                  user_radius: float = USER_RADIUS, centroid=None) -> float:
    """Physical heading the user is turned to by a reset.

    Both strategies only pick headings facing away from the edge that
    triggered the reset and leaving at least ``RESET_MIN_FREE`` of walking
    room. Reset-to-center takes the direction of the room centroid when it
    qualifies; otherwise, and always for max-clearance, it takes the
    qualifying sample with the most room. With no qualifying sample
    the heading with the most room overall is used.
    """
    angles, free, away = _candidate_headings(env_phys, pose, user_radius)
    if not np.any(free > 0.0):
        raise NoSafeHeading(f"user at {pose.p} is boxed in")
    ok = away & (free >= RESET_MIN_FREE)
    if not np.any(ok):
        return float(angles[int(np.argmax(free))])
    if strategy is ResetStrategy.MAX_CLEARANCE:
        masked = np.where(ok, free, -np.inf)
        return float(angles[int(np.argmax(masked))])
    if centroid is None:
        centroid = env_phys.centroid
    cx, cy = centroid
    target = canonical_angle(math.atan2(cy - pose.y, cx - pose.x))
    nx, ny = nearest_boundary_point(env_phys, pose.p)
    ax, ay = pose.x - nx, pose.y - ny
    faces_away = math.cos(target) * ax + math.sin(target) * ay > _AWAY_TOL * math.hypot(ax, ay)
    if faces_away and sweep_distances(env_phys, pose.p, [target], user_radius)[0] >= RESET_MIN_FREE:
        return target
    # centre blocked: fall back to the most open qualifying direction
    return float(angles[int(np.argmax(np.where(ok, free, -np.inf)))])


def execute_reset(state: DualState, strategy: ResetStrategy, env_phys,
                  turn_speed: float = TURN_SPEED, user_radius: float = USER_RADIUS,
                  ) -> tuple[DualState, float]:
    """Turn the user 360 degrees virtually while reorienting them physically.

    Returns the new state and the time the reset takes. Positions and the
    virtual heading are unchanged.
    """
    heading = reset_heading(env_phys, state.phys, strategy, user_radius)
    phys = UserPose(state.phys.x, state.phys.y, heading)
    return DualState(phys, state.virt), TAU / turn_speed
