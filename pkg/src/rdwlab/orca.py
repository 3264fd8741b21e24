"""Optimal reciprocal collision avoidance for disc agents.

Follows the RVO2 formulation: every neighbour contributes a half-plane of
admissible velocities (each agent takes half the responsibility for
avoiding a collision within the time horizon), static edges contribute
half-planes bounding the speed toward them, and the velocity closest to
the preferred one is found by incremental 2D linear programming. When the
constraints are infeasible a 3D program minimizes the worst violation,
keeping edge constraints hard.

Half-planes are rows ``(px, py, dx, dy)``; velocity ``v`` is admissible
when ``det(d, p - v) <= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

RVO_EPSILON = 1e-5


@dataclass
class Agent:
    position: tuple[float, float]
    velocity: tuple[float, float]
    radius: float
    pref_speed: float
    goal: tuple[float, float]

    def preferred_velocity(self) -> tuple[float, float]:
        dx, dy = self.goal[0] - self.position[0], self.goal[1] - self.position[1]
        d = math.hypot(dx, dy)
        if d < 1e-12:
            return (0.0, 0.0)
        s = self.pref_speed / d
        return (dx * s, dy * s)


@numba.njit(cache=True)
def _det(ax, ay, bx, by):
    return ax * by - ay * bx


@numba.njit(cache=True)
def _lp1(lines, line_no, radius, opt_x, opt_y, direction_opt, result):
    px, py, dx, dy = lines[line_no, 0], lines[line_no, 1], lines[line_no, 2], lines[line_no, 3]
    dot = px * dx + py * dy
    disc = dot * dot + radius * radius - (px * px + py * py)
    if disc < 0.0:
        return False
    sq = math.sqrt(disc)
    t_left = -dot - sq
    t_right = -dot + sq
    for i in range(line_no):
        qx, qy, ex, ey = lines[i, 0], lines[i, 1], lines[i, 2], lines[i, 3]
        den = _det(dx, dy, ex, ey)
        num = _det(ex, ey, px - qx, py - qy)
        if abs(den) <= RVO_EPSILON:
            if num < 0.0:
                return False
            continue
        t = num / den
        if den >= 0.0:
            t_right = min(t_right, t)
        else:
            t_left = max(t_left, t)
        if t_left > t_right:
            return False
    if direction_opt:
        if opt_x * dx + opt_y * dy > 0.0:
            t = t_right
        else:
            t = t_left
    else:
        t = dx * (opt_x - px) + dy * (opt_y - py)
        if t < t_left:
            t = t_left
        elif t > t_right:
            t = t_right
    result[0] = px + t * dx
    result[1] = py + t * dy
    return True


@numba.njit(cache=True)
def _lp2(lines, n, radius, opt_x, opt_y, direction_opt, result):
    if direction_opt:
        result[0], result[1] = opt_x * radius, opt_y * radius
    elif opt_x * opt_x + opt_y * opt_y > radius * radius:
        s = radius / math.sqrt(opt_x * opt_x + opt_y * opt_y)
        result[0], result[1] = opt_x * s, opt_y * s
    else:
        result[0], result[1] = opt_x, opt_y
    for i in range(n):
        if _det(lines[i, 2], lines[i, 3], lines[i, 0] - result[0], lines[i, 1] - result[1]) > 0.0:
            tx, ty = result[0], result[1]
            if not _lp1(lines, i, radius, opt_x, opt_y, direction_opt, result):
                result[0], result[1] = tx, ty
                return i
    return n


@numba.njit(cache=True)
def _lp3(lines, n, n_obst, begin, radius, result):
    distance = 0.0
    proj = np.empty((n, 4))
    for i in range(begin, n):
        px, py, dx, dy = lines[i, 0], lines[i, 1], lines[i, 2], lines[i, 3]
        if _det(dx, dy, px - result[0], py - result[1]) > distance:
            m = 0
            for j in range(n_obst):
                proj[m] = lines[j]
                m += 1
            for j in range(n_obst, i):
                qx, qy, ex, ey = lines[j, 0], lines[j, 1], lines[j, 2], lines[j, 3]
                det = _det(dx, dy, ex, ey)
                if abs(det) <= RVO_EPSILON:
                    if dx * ex + dy * ey > 0.0:
                        continue
                    lx, ly = 0.5 * (px + qx), 0.5 * (py + qy)
                else:
                    s = _det(ex, ey, px - qx, py - qy) / det
                    lx, ly = px + s * dx, py + s * dy
                ux, uy = ex - dx, ey - dy
                ul = math.sqrt(ux * ux + uy * uy)
                proj[m, 0], proj[m, 1] = lx, ly
                proj[m, 2], proj[m, 3] = ux / ul, uy / ul
                m += 1
            tx, ty = result[0], result[1]
            if _lp2(proj, m, radius, -dy, dx, True, result) < m:
                result[0], result[1] = tx, ty
            distance = _det(dx, dy, px - result[0], py - result[1])


@numba.njit(cache=True)
def _orca_lines(i, pos, vel, rad, segs, tau, tau_obst, dt, max_speed):
    """Edge half-planes first, then one per neighbour. Returns (lines, n_edge_lines)."""
    n_agents = pos.shape[0]
    lines = np.empty((segs.shape[0] + n_agents, 4))
    m = 0
    px, py = pos[i, 0], pos[i, 1]
    r = rad[i]
    reach = r + tau_obst * max_speed
    for k in range(segs.shape[0]):
        ax, ay = segs[k, 0], segs[k, 1]
        ex, ey = segs[k, 2] - ax, segs[k, 3] - ay
        l2 = ex * ex + ey * ey
        t = 0.0
        if l2 > 0.0:
            t = min(1.0, max(0.0, ((px - ax) * ex + (py - ay) * ey) / l2))
        cx, cy = ax + t * ex, ay + t * ey
        nx, ny = px - cx, py - cy
        d = math.sqrt(nx * nx + ny * ny)
        if d >= reach or d == 0.0:
            continue
        nx, ny = nx / d, ny / d
        if d > r:
            b = -(d - r) / tau_obst
        else:
            b = (r - d) / dt
        lines[m, 0], lines[m, 1] = b * nx, b * ny
        lines[m, 2], lines[m, 3] = ny, -nx
        m += 1
    n_obst = m
    inv_tau = 1.0 / tau
    vx, vy = vel[i, 0], vel[i, 1]
    for j in range(n_agents):
        if j == i:
            continue
        rpx, rpy = pos[j, 0] - px, pos[j, 1] - py
        rvx, rvy = vx - vel[j, 0], vy - vel[j, 1]
        dist_sq = rpx * rpx + rpy * rpy
        cr = r + rad[j]
        cr_sq = cr * cr
        if dist_sq > cr_sq:
            wx, wy = rvx - inv_tau * rpx, rvy - inv_tau * rpy
            w_sq = wx * wx + wy * wy
            dot1 = wx * rpx + wy * rpy
            if dot1 < 0.0 and dot1 * dot1 > cr_sq * w_sq:
                wl = math.sqrt(w_sq)
                ux_, uy_ = wx / wl, wy / wl
                ldx, ldy = uy_, -ux_
                s = cr * inv_tau - wl
                ux, uy = s * ux_, s * uy_
            else:
                leg = math.sqrt(dist_sq - cr_sq)
                if _det(rpx, rpy, wx, wy) > 0.0:
                    ldx = (rpx * leg - rpy * cr) / dist_sq
                    ldy = (rpx * cr + rpy * leg) / dist_sq
                else:
                    ldx = -(rpx * leg + rpy * cr) / dist_sq
                    ldy = -(-rpx * cr + rpy * leg) / dist_sq
                dot2 = rvx * ldx + rvy * ldy
                ux, uy = dot2 * ldx - rvx, dot2 * ldy - rvy
        else:
            inv_dt = 1.0 / dt
            wx, wy = rvx - inv_dt * rpx, rvy - inv_dt * rpy
            wl = math.sqrt(wx * wx + wy * wy)
            if wl == 0.0:
                # coincident centres: separate along an arbitrary fixed axis
                wx, wy, wl = 1.0, 0.0, 1.0
            ux_, uy_ = wx / wl, wy / wl
            ldx, ldy = uy_, -ux_
            s = cr * inv_dt - wl
            ux, uy = s * ux_, s * uy_
        lines[m, 0], lines[m, 1] = vx + 0.5 * ux, vy + 0.5 * uy
        lines[m, 2], lines[m, 3] = ldx, ldy
        m += 1
    return lines[:m].copy(), n_obst


@numba.njit(cache=True)
def _solve(lines, n_obst, max_speed, pref_x, pref_y):
    result = np.zeros(2)
    n = lines.shape[0]
    fail = _lp2(lines, n, max_speed, pref_x, pref_y, False, result)
    if fail < n:
        _lp3(lines, n, n_obst, fail, max_speed, result)
    return result


@numba.njit(cache=True)
def _orca_step(pos, vel, rad, pref, max_speed, segs, tau, tau_obst, dt):
    out = np.empty_like(vel)
    for i in range(pos.shape[0]):
        lines, n_obst = _orca_lines(i, pos, vel, rad, segs, tau, tau_obst, dt, max_speed[i])
        v = _solve(lines, n_obst, max_speed[i], pref[i, 0], pref[i, 1])
        out[i, 0], out[i, 1] = v[0], v[1]
    return out


@numba.njit(cache=True)
def _speed_along(lines, hx, hy, desired, max_speed):
    """Largest admissible speed <= desired along unit heading (hx, hy); 0 when none is admissible."""
    lo, hi = 0.0, max_speed
    for k in range(lines.shape[0]):
        px, py, dx, dy = lines[k, 0], lines[k, 1], lines[k, 2], lines[k, 3]
        c = _det(dx, dy, px, py)
        a = _det(dx, dy, hx, hy)
        # constraint: c - s * a <= 0
        if abs(a) < 1e-12:
            if c > 0.0:
                return 0.0
            continue
        if a > 0.0:
            lo = max(lo, c / a)
        else:
            hi = min(hi, c / a)
    if lo > hi:
        return 0.0
    return min(max(desired, lo), hi)


def orca_velocity(agent: Agent, neighbors, tau: float = 2.0, dt: float = 0.05,
                  edges=None, tau_obst: float = 1.0, max_speed: float | None = None):
    """New velocity for ``agent`` given its neighbours (and optional static edges)."""
    agents = [agent, *neighbors]
    pos = np.array([a.position for a in agents], dtype=np.float64)
    vel = np.array([a.velocity for a in agents], dtype=np.float64)
    rad = np.array([a.radius for a in agents], dtype=np.float64)
    segs = np.zeros((0, 4)) if edges is None else np.asarray(edges, dtype=np.float64)
    vmax = agent.pref_speed if max_speed is None else max_speed
    lines, n_obst = _orca_lines(0, pos, vel, rad, segs, tau, tau_obst, dt, vmax)
    px, py = agent.preferred_velocity()
    v = _solve(lines, n_obst, vmax, px, py)
    return (float(v[0]), float(v[1]))
