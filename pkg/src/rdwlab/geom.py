"""Planar geometry for the redirection pipeline.

Everything here is a pure function of its inputs. Hot loops (ray casting,
visibility sweeps, clearance queries) are compiled with numba; the Python
wrappers convert to and from the small dataclasses used elsewhere.

Walkable space is described by a :class:`SegmentSet`: the edges of one
closed boundary ring plus any number of obstacle rings. A point is walkable
when it is inside the boundary ring and outside every obstacle ring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numba
import numpy as np

TAU = 2.0 * math.pi

# |cross(v_i - k, v_{i+1} - k)| below this is treated as collinear (m^2)
COLLINEAR_TOL = 1e-9
# event angles closer than this are merged (rad)
_ANGLE_MERGE_TOL = 1e-12


class GeometryError(ValueError):
    pass


class KernelInObstacle(GeometryError):
    """Raised when a visibility query starts outside walkable space."""


class DegenerateEnvironment(GeometryError):
    """Raised when an environment has no closed boundary ring."""


# ---------------------------------------------------------------------------
# angles


def canonical_angle(a: float) -> float:
    """Wrap ``a`` into [0, 2*pi)."""
    r = math.fmod(a, TAU)
    if r < 0.0:
        r += TAU
    # fmod of a tiny negative number can round back up to TAU
    if r >= TAU:
        r -= TAU
    return r


def circular_diff(a: float, b: float) -> float:
    """Unsigned angular distance between two headings, in [0, pi]."""
    d = math.fmod(abs(a - b), TAU)
    return min(d, TAU - d)


def wrap_pi(a: float) -> float:
    """Wrap ``a`` into (-pi, pi]."""
    r = canonical_angle(a)
    if r > math.pi:
        r -= TAU
    return r


def signed_angle(from_angle: float, to_angle: float) -> float:
    """Signed rotation taking heading ``from_angle`` to ``to_angle``; positive is CCW."""
    return wrap_pi(to_angle - from_angle)


def unit_vector(theta: float) -> tuple[float, float]:
    return (math.cos(theta), math.sin(theta))


# ---------------------------------------------------------------------------
# polygons


def as_polygon(vertices) -> np.ndarray:
    arr = np.asarray(vertices, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryError(f"polygon must be an (n, 2) array, got shape {arr.shape}")
    return arr


def signed_area(vertices) -> float:
    """Shoelace area; positive for counter-clockwise winding."""
    v = np.asarray(vertices, dtype=np.float64)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def ensure_ccw(vertices) -> np.ndarray:
    v = as_polygon(vertices)
    if signed_area(v) < 0:
        v = v[::-1].copy()
    return v


def is_simple(vertices) -> bool:
    """True when no two non-adjacent edges of the closed polygon touch."""
    v = as_polygon(vertices)
    n = len(v)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            c, d = v[j], v[(j + 1) % n]
            if _segments_touch(a, b, c, d):
                return False
    return True


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a, b, p) -> bool:
    return (min(a[0], b[0]) - 1e-12 <= p[0] <= max(a[0], b[0]) + 1e-12
            and min(a[1], b[1]) - 1e-12 <= p[1] <= max(a[1], b[1]) + 1e-12)


def _segments_touch(a, b, c, d) -> bool:
    d1, d2 = _orient(c, d, a), _orient(c, d, b)
    d3, d4 = _orient(a, b, c), _orient(a, b, d)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and _on_segment(c, d, a):
        return True
    if d2 == 0 and _on_segment(c, d, b):
        return True
    if d3 == 0 and _on_segment(a, b, c):
        return True
    if d4 == 0 and _on_segment(a, b, d):
        return True
    return False


def point_in_polygon(p, vertices) -> bool:
    """Even-odd crossing test. Points exactly on an edge may go either way."""
    v = as_polygon(vertices)
    return bool(_inside_ring(v, float(p[0]), float(p[1])))


def regular_polygon(center, circumradius: float, n: int = 16) -> np.ndarray:
    k = np.arange(n) * (TAU / n)
    return np.column_stack([center[0] + circumradius * np.cos(k),
                            center[1] + circumradius * np.sin(k)])


# ---------------------------------------------------------------------------
# segment sets


@dataclass(frozen=True, eq=False)
class SegmentSet:
    """Flattened edge list of a boundary ring plus obstacle rings.

    ``segs`` rows are (ax, ay, bx, by); ``ring`` gives the ring index of each
    row and ``is_boundary[ring]`` flags the boundary. Edges that properly
    cross another edge are split at the crossing so that angular sweeps see
    every change of the nearest edge as an endpoint event.
    """

    segs: np.ndarray
    ring: np.ndarray
    is_boundary: np.ndarray

    @classmethod
    def from_rings(cls, boundary, obstacles=()) -> "SegmentSet":
        rings = [as_polygon(boundary)] + [as_polygon(o) for o in obstacles]
        rows, ring_ids = [], []
        for r, verts in enumerate(rings):
            nxt = np.roll(verts, -1, axis=0)
            rows.append(np.hstack([verts, nxt]))
            ring_ids.append(np.full(len(verts), r, dtype=np.int64))
        segs = np.vstack(rows)
        ring = np.concatenate(ring_ids)
        if len(rings) > 1:
            segs, ring = _split_crossings(segs, ring)
        flags = np.zeros(len(rings), dtype=np.bool_)
        flags[0] = True
        for a in (segs, ring, flags):
            a.setflags(write=False)
        return cls(segs, ring, flags)

    def __len__(self) -> int:
        return len(self.segs)


def _segment_set(env) -> SegmentSet:
    if isinstance(env, SegmentSet):
        return env
    try:
        return env.segments
    except AttributeError:
        raise DegenerateEnvironment("environment has no boundary segments") from None


# ---------------------------------------------------------------------------
# compiled kernels


@numba.njit(cache=True)
def _split_crossings(segs, ring):
    n = segs.shape[0]
    cuts = np.zeros((n, n))
    ncut = np.zeros(n, dtype=np.int64)
    for i in range(n):
        ax, ay, bx, by = segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3]
        ex, ey = bx - ax, by - ay
        for j in range(n):
            if ring[i] == ring[j]:
                continue
            cx, cy, dx, dy = segs[j, 0], segs[j, 1], segs[j, 2], segs[j, 3]
            fx, fy = dx - cx, dy - cy
            den = ex * fy - ey * fx
            if den == 0.0:
                continue
            wx, wy = cx - ax, cy - ay
            u = (wx * fy - wy * fx) / den
            v = (wx * ey - wy * ex) / den
            if 1e-12 < u < 1.0 - 1e-12 and -1e-12 <= v <= 1.0 + 1e-12:
                cuts[i, ncut[i]] = u
                ncut[i] += 1
    total = n + ncut.sum()
    out = np.empty((total, 4))
    out_ring = np.empty(total, dtype=np.int64)
    k = 0
    for i in range(n):
        ax, ay, bx, by = segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3]
        us = np.sort(cuts[i, :ncut[i]])
        prev_x, prev_y = ax, ay
        for c in range(ncut[i]):
            x = ax + us[c] * (bx - ax)
            y = ay + us[c] * (by - ay)
            out[k, 0], out[k, 1], out[k, 2], out[k, 3] = prev_x, prev_y, x, y
            out_ring[k] = ring[i]
            k += 1
            prev_x, prev_y = x, y
        out[k, 0], out[k, 1], out[k, 2], out[k, 3] = prev_x, prev_y, bx, by
        out_ring[k] = ring[i]
        k += 1
    return out, out_ring


@numba.njit(cache=True)
def _nearest_hit(segs, px, py, dx, dy):
    best = np.inf
    best_i = -1
    for i in range(segs.shape[0]):
        ax, ay = segs[i, 0], segs[i, 1]
        ex, ey = segs[i, 2] - ax, segs[i, 3] - ay
        den = dx * ey - dy * ex
        if den == 0.0:
            continue
        wx, wy = ax - px, ay - py
        t = (wx * ey - wy * ex) / den
        u = (wx * dy - wy * dx) / den
        if t > 0.0 and u >= 0.0 and u <= 1.0 and t < best:
            best = t
            best_i = i
    return best, best_i


@numba.njit(cache=True)
def _ray_distances(segs, px, py, angles):
    out = np.empty(angles.shape[0])
    for k in range(angles.shape[0]):
        t, _ = _nearest_hit(segs, px, py, math.cos(angles[k]), math.sin(angles[k]))
        out[k] = t
    return out


@numba.njit(cache=True)
def _line_param(seg, px, py, dx, dy):
    ax, ay = seg[0], seg[1]
    ex, ey = seg[2] - ax, seg[3] - ay
    den = dx * ey - dy * ex
    if den == 0.0:
        return np.nan
    return ((ax - px) * ey - (ay - py) * ex) / den


@numba.njit(cache=True)
def _visibility_vertices(segs, px, py):
    n = segs.shape[0]
    raw = np.empty(2 * n)
    for i in range(n):
        raw[2 * i] = math.atan2(segs[i, 1] - py, segs[i, 0] - px)
        raw[2 * i + 1] = math.atan2(segs[i, 3] - py, segs[i, 2] - px)
    for i in range(2 * n):
        if raw[i] < 0.0:
            raw[i] += 2.0 * math.pi
    raw.sort()
    events = np.empty(2 * n)
    m = 0
    for i in range(2 * n):
        if m == 0 or raw[i] - events[m - 1] > 1e-12:
            events[m] = raw[i]
            m += 1
    if m > 1 and events[0] + 2.0 * math.pi - events[m - 1] <= 1e-12:
        m -= 1
    gap = 1.0
    for i in range(m):
        nxt = events[i + 1] if i + 1 < m else events[0] + 2.0 * math.pi
        g = nxt - events[i]
        if g < gap:
            gap = g
    delta = min(1e-7, 0.25 * gap)

    out = np.empty((2 * m, 2))
    k = 0
    for e in range(m):
        a = events[e]
        dx, dy = math.cos(a), math.sin(a)
        _, i_minus = _nearest_hit(segs, px, py, math.cos(a - delta), math.sin(a - delta))
        _, i_plus = _nearest_hit(segs, px, py, math.cos(a + delta), math.sin(a + delta))
        if i_minus < 0 or i_plus < 0:
            continue
        t_minus = _line_param(segs[i_minus], px, py, dx, dy)
        t_plus = _line_param(segs[i_plus], px, py, dx, dy)
        if not (t_minus > 0.0):
            t_minus, _ = _nearest_hit(segs, px, py, dx, dy)
        if not (t_plus > 0.0):
            t_plus, _ = _nearest_hit(segs, px, py, dx, dy)
        out[k, 0], out[k, 1] = px + t_minus * dx, py + t_minus * dy
        k += 1
        if i_plus != i_minus and abs(t_plus - t_minus) > 1e-12:
            out[k, 0], out[k, 1] = px + t_plus * dx, py + t_plus * dy
            k += 1
    return _simplify_ring(out[:k])


@numba.njit(cache=True)
def _simplify_ring(v):
    # drops duplicate vertices and vertices interior to a straight edge
    keep = np.ones(v.shape[0], dtype=np.bool_)
    changed = True
    while changed:
        changed = False
        idx = np.nonzero(keep)[0]
        n = idx.shape[0]
        if n <= 3:
            break
        for j in range(n):
            p = v[idx[j - 1]]
            c = v[idx[j]]
            q = v[idx[(j + 1) % n]]
            ux, uy = c[0] - p[0], c[1] - p[1]
            wx, wy = q[0] - c[0], q[1] - c[1]
            if ux * ux + uy * uy < 1e-24:
                keep[idx[j]] = False
                changed = True
                break
            cr = ux * wy - uy * wx
            if abs(cr) < 1e-9 and ux * wx + uy * wy > 0.0:
                keep[idx[j]] = False
                changed = True
                break
    return v[keep].copy()


@numba.njit(cache=True)
def _slice_table(verts, kx, ky, heading):
    # columns: v1x v1y v2x v2y bisector avg_length offset area
    n = verts.shape[0]
    out = np.empty((n, 8))
    m = 0
    two_pi = 2.0 * math.pi
    for i in range(n):
        ax, ay = verts[i, 0] - kx, verts[i, 1] - ky
        j = (i + 1) % n
        bx, by = verts[j, 0] - kx, verts[j, 1] - ky
        cr = ax * by - ay * bx
        if abs(cr) < 1e-9:
            continue
        a1 = math.atan2(ay, ax)
        a2 = math.atan2(by, bx)
        span = (a2 - a1) % two_pi
        bis = (a1 + 0.5 * span) % two_pi
        if bis >= two_pi:
            bis -= two_pi
        d = abs(heading - bis) % two_pi
        off = min(d, two_pi - d)
        out[m, 0], out[m, 1] = verts[i, 0], verts[i, 1]
        out[m, 2], out[m, 3] = verts[j, 0], verts[j, 1]
        out[m, 4] = bis
        out[m, 5] = 0.5 * (math.sqrt(ax * ax + ay * ay) + math.sqrt(bx * bx + by * by))
        out[m, 6] = off
        out[m, 7] = 0.5 * cr
        m += 1
    return out[:m].copy()


@numba.njit(cache=True)
def _inside_ring(v, px, py):
    inside = False
    n = v.shape[0]
    for i in range(n):
        x1, y1 = v[i, 0], v[i, 1]
        x2, y2 = v[(i + 1) % n, 0], v[(i + 1) % n, 1]
        if (y1 > py) != (y2 > py):
            xc = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < xc:
                inside = not inside
    return inside


@numba.njit(cache=True)
def _point_seg_dist2(px, py, ax, ay, bx, by):
    ex, ey = bx - ax, by - ay
    l2 = ex * ex + ey * ey
    t = 0.0
    if l2 > 0.0:
        t = ((px - ax) * ex + (py - ay) * ey) / l2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    cx, cy = ax + t * ex - px, ay + t * ey - py
    return cx * cx + cy * cy


@numba.njit(cache=True)
def _walkable(segs, ring, is_boundary, px, py):
    nr = is_boundary.shape[0]
    parity = np.zeros(nr, dtype=np.bool_)
    for i in range(segs.shape[0]):
        y1, y2 = segs[i, 1], segs[i, 3]
        if (y1 > py) != (y2 > py):
            x1, x2 = segs[i, 0], segs[i, 2]
            xc = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < xc:
                parity[ring[i]] = not parity[ring[i]]
    for r in range(nr):
        if is_boundary[r] != parity[r]:
            return False
    return True


@numba.njit(cache=True)
def _clearance(segs, ring, is_boundary, px, py):
    best = np.inf
    for i in range(segs.shape[0]):
        d2 = _point_seg_dist2(px, py, segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3])
        if d2 < best:
            best = d2
    d = math.sqrt(best)
    if _walkable(segs, ring, is_boundary, px, py):
        return d
    return -d


@numba.njit(cache=True)
def _nearest_point(segs, px, py):
    best = np.inf
    bx_, by_ = px, py
    for i in range(segs.shape[0]):
        ax, ay = segs[i, 0], segs[i, 1]
        ex, ey = segs[i, 2] - ax, segs[i, 3] - ay
        l2 = ex * ex + ey * ey
        t = 0.0
        if l2 > 0.0:
            t = min(1.0, max(0.0, ((px - ax) * ex + (py - ay) * ey) / l2))
        cx, cy = ax + t * ex, ay + t * ey
        d2 = (cx - px) ** 2 + (cy - py) ** 2
        if d2 < best:
            best = d2
            bx_, by_ = cx, cy
    return bx_, by_


@numba.njit(cache=True)
def _segment_distance(segs, ax, ay, bx, by):
    best = np.inf
    ex, ey = bx - ax, by - ay
    for i in range(segs.shape[0]):
        cx, cy, dx, dy = segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3]
        fx, fy = dx - cx, dy - cy
        o1 = ex * (cy - ay) - ey * (cx - ax)
        o2 = ex * (dy - ay) - ey * (dx - ax)
        o3 = fx * (ay - cy) - fy * (ax - cx)
        o4 = fx * (by - cy) - fy * (bx - cx)
        if ((o1 > 0.0) != (o2 > 0.0)) and ((o3 > 0.0) != (o4 > 0.0)) \
                and o1 != 0.0 and o2 != 0.0 and o3 != 0.0 and o4 != 0.0:
            return 0.0
        d = min(_point_seg_dist2(ax, ay, cx, cy, dx, dy),
                _point_seg_dist2(bx, by, cx, cy, dx, dy),
                _point_seg_dist2(cx, cy, ax, ay, bx, by),
                _point_seg_dist2(dx, dy, ax, ay, bx, by))
        if d < best:
            best = d
    return math.sqrt(best)


@numba.njit(cache=True)
def _repulsion(segs, px, py):
    sx, sy = 0.0, 0.0
    for i in range(segs.shape[0]):
        ax, ay = segs[i, 0], segs[i, 1]
        ex, ey = segs[i, 2] - ax, segs[i, 3] - ay
        l2 = ex * ex + ey * ey
        t = 0.0
        if l2 > 0.0:
            t = min(1.0, max(0.0, ((px - ax) * ex + (py - ay) * ey) / l2))
        dx, dy = px - (ax + t * ex), py - (ay + t * ey)
        d2 = dx * dx + dy * dy
        if d2 > 0.0:
            # unit vector scaled by 1/d
            sx += dx / d2
            sy += dy / d2
    return sx, sy


# ---------------------------------------------------------------------------
# public queries


def point_clearance(env, p) -> float:
    """Signed distance from ``p`` to the nearest boundary or obstacle edge.

    Negative when ``p`` is outside the boundary or inside an obstacle.
    """
    s = _segment_set(env)
    return float(_clearance(s.segs, s.ring, s.is_boundary, float(p[0]), float(p[1])))


def nearest_boundary_point(env, p) -> tuple[float, float]:
    s = _segment_set(env)
    return _nearest_point(s.segs, float(p[0]), float(p[1]))


def ray_distance(env, p, theta: float) -> float:
    """Free distance from ``p`` along heading ``theta`` to the first edge hit."""
    s = _segment_set(env)
    t, _ = _nearest_hit(s.segs, float(p[0]), float(p[1]), math.cos(theta), math.sin(theta))
    return float(t)


def ray_distances(env, p, angles) -> np.ndarray:
    s = _segment_set(env)
    return _ray_distances(s.segs, float(p[0]), float(p[1]), np.asarray(angles, dtype=np.float64))


def repulsion_vector(env, p) -> tuple[float, float]:
    """Sum over edges of the unit vector away from each edge's nearest point, weighted 1/distance."""
    s = _segment_set(env)
    return _repulsion(s.segs, float(p[0]), float(p[1]))


def segment_clear(env, a, b, inflation: float = 0.0) -> bool:
    """True iff the capsule of radius ``inflation`` around ``ab`` lies in walkable space."""
    s = _segment_set(env)
    ax, ay, bx, by = float(a[0]), float(a[1]), float(b[0]), float(b[1])
    if not _walkable(s.segs, s.ring, s.is_boundary, ax, ay):
        return False
    return bool(_segment_distance(s.segs, ax, ay, bx, by) > inflation)


# ---------------------------------------------------------------------------
# visibility polygons and slices


@dataclass(frozen=True)
class Slice:
    """One fan triangle of a visibility polygon; ``verts[0]`` is the kernel."""

    verts: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]
    bisector: float
    avg_length: float
    angle_offset: float
    area: float


@dataclass(frozen=True, eq=False)
class VisibilityPolygon:
    """Star-shaped visible region about ``kernel``.

    ``table`` holds one row per slice:
    ``(v1x, v1y, v2x, v2y, bisector, avg_length, angle_offset, area)``.
    """

    kernel: tuple[float, float]
    vertices: np.ndarray
    heading: float
    table: np.ndarray = field(repr=False)

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def bisectors(self) -> np.ndarray:
        return self.table[:, 4]

    @property
    def avg_lengths(self) -> np.ndarray:
        return self.table[:, 5]

    @property
    def offsets(self) -> np.ndarray:
        return self.table[:, 6]

    @property
    def areas(self) -> np.ndarray:
        return self.table[:, 7]

    def slice(self, i: int) -> Slice:
        return _row_to_slice(self.kernel, self.table[i])

    @cached_property
    def slices(self) -> list[Slice]:
        return [_row_to_slice(self.kernel, row) for row in self.table]

    def __len__(self) -> int:
        return len(self.table)


def _row_to_slice(kernel, row) -> Slice:
    k = (float(kernel[0]), float(kernel[1]))
    return Slice(
        verts=(k, (float(row[0]), float(row[1])), (float(row[2]), float(row[3]))),
        bisector=float(row[4]),
        avg_length=float(row[5]),
        angle_offset=float(row[6]),
        area=float(row[7]),
    )


def visibility_polygon(env, p, heading: float = 0.0) -> VisibilityPolygon:
    """Visible region of walkable space from ``p``, already cut into slices.

    Events are the edge endpoints sorted by angle about ``p``. For each event
    the nearest edge just before and just after it is found by casting rays
    a hair to either side; the polygon gets the hit on each of those edges
    along the exact event ray. ``heading`` only affects the slice offsets.
    """
    s = _segment_set(env)
    if len(s) < 3:
        raise DegenerateEnvironment("environment needs a closed boundary with at least 3 edges")
    px, py = float(p[0]), float(p[1])
    if not (_clearance(s.segs, s.ring, s.is_boundary, px, py) > 0.0):
        raise KernelInObstacle(f"kernel ({px}, {py}) is not strictly inside walkable space")
    verts = _visibility_vertices(s.segs, px, py)
    table = _slice_table(verts, px, py, float(heading))
    return VisibilityPolygon((px, py), verts, canonical_angle(heading), table)


def slice_polygon(poly: VisibilityPolygon, observer_heading: float) -> list[Slice]:
    """Fan-triangulate ``poly`` about its kernel as seen with ``observer_heading``.

    Consecutive vertex pairs collinear with the kernel contribute no slice:
    the next slice starts from the later vertex of the pair.
    """
    kx, ky = poly.kernel
    table = _slice_table(np.ascontiguousarray(poly.vertices, dtype=np.float64), kx, ky,
                         float(observer_heading))
    return [_row_to_slice(poly.kernel, row) for row in table]


def with_heading(poly: VisibilityPolygon, heading: float) -> VisibilityPolygon:
    """Return ``poly`` with slice offsets recomputed for a new observer heading."""
    table = poly.table.copy()
    d = np.abs(heading - table[:, 4]) % TAU
    table[:, 6] = np.minimum(d, TAU - d)
    return VisibilityPolygon(poly.kernel, poly.vertices, canonical_angle(heading), table)


@numba.njit(cache=True)
def _sweep_distances(segs, px, py, angles, radius):
    out = np.empty(angles.shape[0])
    for k in range(angles.shape[0]):
        dx, dy = math.cos(angles[k]), math.sin(angles[k])
        best, _ = _nearest_hit(segs, px, py, dx, dy)
        if radius > 0.0:
            nx, ny = -dy * radius, dx * radius
            t1, _ = _nearest_hit(segs, px + nx, py + ny, dx, dy)
            t2, _ = _nearest_hit(segs, px - nx, py - ny, dx, dy)
            best = min(best, t1, t2)
        out[k] = best
    return out


def sweep_distances(env, p, angles, radius: float) -> np.ndarray:
    """Travel distance along each heading before a disc of ``radius`` (three-ray probe) hits an edge."""
    s = _segment_set(env)
    return _sweep_distances(s.segs, float(p[0]), float(p[1]),
                            np.asarray(angles, dtype=np.float64), float(radius))
