"""Environment model, environment-pair files and the built-in experiment pairs.

An environment pair file is UTF-8 text::

    name: my-pair
    physical:
      boundary: [(-5, -5), (5, -5), (5, 5), (-5, 5)]
      obstacles: [[(-1, -1), (1, -1), (1, 1), (-1, 1)]]
    virtual:
      boundary: [(-10, -10), (10, -10), (10, 10), (-10, 10)]
      obstacles: []
      dynamic: [{radius: 0.5}]

Values may span several lines until their brackets balance; ``#`` starts a
comment. The same schema is accepted as JSON, with points as ``[x, y]``.
"""

from __future__ import annotations

import ast
import json
import math
import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

from .geom import (
    SegmentSet,
    ensure_ccw,
    is_simple,
    point_in_polygon,
    regular_polygon,
    signed_area,
)

DISC_SIDES = 16
BUILTIN_IDS = (1, 2, 3, 4)


class EnvError(ValueError):
    pass


class ParseError(EnvError):
    pass


class ValidationError(EnvError):
    pass


class TimeOutOfRange(EnvError):
    pass


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def polygonize_disc(center, radius: float, sides: int = DISC_SIDES) -> np.ndarray:
    """Regular polygon circumscribing the disc (its edges are tangent to the circle)."""
    return regular_polygon(center, radius / math.cos(math.pi / sides), sides)


@dataclass(frozen=True, eq=False)
class DynamicDisc:
    """A moving circular obstacle sampled every ``dt`` seconds."""

    radius: float
    trajectory: np.ndarray | None = None
    dt: float = 0.05

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError(f"disc radius must be positive, got {self.radius}")
        if self.trajectory is not None:
            object.__setattr__(self, "trajectory", _freeze(self.trajectory))

    @property
    def duration(self) -> float:
        if self.trajectory is None:
            return -math.inf
        return (len(self.trajectory) - 1) * self.dt


@dataclass(frozen=True, eq=False)
class EnvSnapshot:
    """Boundary plus every obstacle (static and polygonized dynamic) at one instant."""

    boundary: np.ndarray
    obstacle_polys: tuple[np.ndarray, ...]

    @cached_property
    def segments(self) -> SegmentSet:
        return SegmentSet.from_rings(self.boundary, self.obstacle_polys)

    @cached_property
    def centroid(self) -> tuple[float, float]:
        return polygon_centroid(self.boundary)


@dataclass(frozen=True, eq=False)
class Environment:
    boundary: np.ndarray
    static_obstacles: tuple[np.ndarray, ...] = ()
    dynamic_obstacles: tuple[DynamicDisc, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "boundary", _freeze(self.boundary))
        object.__setattr__(self, "static_obstacles",
                           tuple(_freeze(o) for o in self.static_obstacles))
        object.__setattr__(self, "dynamic_obstacles", tuple(self.dynamic_obstacles))

    @property
    def is_static(self) -> bool:
        return not self.dynamic_obstacles

    @cached_property
    def static_snapshot(self) -> EnvSnapshot:
        """Snapshot ignoring dynamic discs; also the snapshot of a static environment."""
        return EnvSnapshot(self.boundary, self.static_obstacles)

    def snapshot(self, t: float) -> EnvSnapshot:
        return snapshot(self, t)

    def with_trajectories(self, trajectories, dt: float = 0.05) -> "Environment":
        """Attach one ``(T, 2)`` trajectory per dynamic disc."""
        trajectories = list(trajectories)
        if len(trajectories) != len(self.dynamic_obstacles):
            raise ValidationError(
                f"{len(trajectories)} trajectories for {len(self.dynamic_obstacles)} discs")
        discs = tuple(DynamicDisc(d.radius, tr, dt)
                      for d, tr in zip(self.dynamic_obstacles, trajectories))
        return replace(self, dynamic_obstacles=discs)


@dataclass(frozen=True, eq=False)
class EnvPair:
    phys: Environment
    virt: Environment
    name: str = "pair"


def polygon_centroid(vertices) -> tuple[float, float]:
    v = np.asarray(vertices, dtype=np.float64)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = 0.5 * cr.sum()
    cx = ((x + xn) * cr).sum() / (6.0 * a)
    cy = ((y + yn) * cr).sum() / (6.0 * a)
    return (float(cx), float(cy))


def snapshot(env: Environment, t: float) -> EnvSnapshot:
    """Freeze ``env`` at time ``t``; discs sit at their nearest trajectory sample."""
    if env.is_static:
        return env.static_snapshot
    polys = list(env.static_obstacles)
    for disc in env.dynamic_obstacles:
        if disc.trajectory is None or t < -1e-9 or t > disc.duration + 0.5 * disc.dt:
            raise TimeOutOfRange(f"t={t} outside disc trajectory coverage [0, {disc.duration}]")
        i = min(int(round(t / disc.dt)), len(disc.trajectory) - 1)
        polys.append(polygonize_disc(disc.trajectory[i], disc.radius))
    return EnvSnapshot(env.boundary, tuple(polys))


def snapshot_at_index(env: Environment, i: int) -> EnvSnapshot:
    """Like :func:`snapshot` but indexed by trajectory sample."""
    if env.is_static:
        return env.static_snapshot
    polys = list(env.static_obstacles)
    for disc in env.dynamic_obstacles:
        if disc.trajectory is None or not 0 <= i < len(disc.trajectory):
            raise TimeOutOfRange(f"sample {i} outside disc trajectory")
        polys.append(polygonize_disc(disc.trajectory[i], disc.radius))
    return EnvSnapshot(env.boundary, tuple(polys))


# ---------------------------------------------------------------------------
# validation


def _check_ring(verts, what: str) -> np.ndarray:
    v = np.asarray(verts, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 2:
        raise ValidationError(f"{what}: expected a list of (x, y) points")
    if len(v) >= 2 and np.all(np.abs(v[0] - v[-1]) < 1e-9):
        # explicitly closed ring
        v = v[:-1]
    if len(v) < 3:
        raise ValidationError(f"{what}: needs at least 3 vertices, got {len(v)}")
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{what}: non-finite coordinate")
    step = np.linalg.norm(v - np.roll(v, -1, axis=0), axis=1)
    if np.any(step < 1e-9):
        raise ValidationError(f"{what}: consecutive vertices coincide")
    if abs(signed_area(v)) < 1e-12:
        raise ValidationError(f"{what}: zero area")
    if not is_simple(v):
        raise ValidationError(f"{what}: polygon is self-intersecting")
    return ensure_ccw(v)


def _inside_or_on(p, ring: np.ndarray) -> bool:
    if point_in_polygon(p, ring):
        return True
    # on-edge test
    a, b = ring, np.roll(ring, -1, axis=0)
    e = b - a
    t = np.clip(np.einsum("ij,ij->i", p - a, e) / np.einsum("ij,ij->i", e, e), 0, 1)
    d = np.linalg.norm(a + t[:, None] * e - p, axis=1)
    return bool(d.min() <= 1e-9)


def validate_environment(boundary, obstacles=(), dynamic=(), label: str = "environment") -> Environment:
    if boundary is None:
        raise ValidationError(f"{label}: missing boundary")
    b = _check_ring(boundary, f"{label} boundary")
    obs = []
    for i, o in enumerate(obstacles, 1):
        ring = _check_ring(o, f"{label} obstacle {i}")
        for p in ring:
            if not _inside_or_on(p, b):
                raise ValidationError(f"{label} obstacle {i}: vertex {tuple(p)} outside boundary")
        obs.append(ring)
    discs = []
    for d in dynamic:
        if isinstance(d, DynamicDisc):
            discs.append(d)
        else:
            try:
                discs.append(DynamicDisc(float(d["radius"])))
            except (KeyError, TypeError) as exc:
                raise ValidationError(f"{label}: bad dynamic entry {d!r}") from exc
    return Environment(b, tuple(obs), tuple(discs))


# ---------------------------------------------------------------------------
# parsing and serialization

_SECTIONS = ("physical", "virtual")
_BARE_KEY = re.compile(r"([{,]\s*)([A-Za-z_]\w*)(\s*:)")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _literal(text: str, where: str):
    try:
        return ast.literal_eval(_BARE_KEY.sub(r"\1'\2'\3", text))
    except (ValueError, SyntaxError) as exc:
        raise ParseError(f"{where}: cannot parse value {text.strip()!r}") from exc


def _parse_text(source: str) -> dict:
    doc: dict = {}
    section = None
    pending_key, pending, depth = None, [], 0
    for lineno, raw in enumerate(source.splitlines(), 1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        if pending_key is not None:
            pending.append(line)
            depth += line.count("[") + line.count("(") + line.count("{")
            depth -= line.count("]") + line.count(")") + line.count("}")
            if depth <= 0:
                doc[section][pending_key] = _literal(" ".join(pending), f"line {lineno}")
                pending_key, pending = None, []
            continue
        indented = line[0].isspace()
        if ":" not in line:
            raise ParseError(f"line {lineno}: expected 'key: value'")
        key, _, value = line.strip().partition(":")
        key, value = key.strip(), value.strip()
        if not indented:
            if key in _SECTIONS:
                if value:
                    raise ParseError(f"line {lineno}: section header '{key}:' takes no value")
                section = key
                doc[section] = {}
            elif key == "name":
                doc["name"] = value
                section = None
            else:
                raise ParseError(f"line {lineno}: unknown top-level key {key!r}")
            continue
        if section is None:
            raise ParseError(f"line {lineno}: {key!r} outside a physical:/virtual: section")
        if key not in ("boundary", "obstacles", "dynamic"):
            raise ParseError(f"line {lineno}: unknown key {key!r}")
        depth = value.count("[") + value.count("(") + value.count("{")
        depth -= value.count("]") + value.count(")") + value.count("}")
        if depth > 0:
            pending_key, pending = key, [value]
        else:
            doc[section][key] = _literal(value, f"line {lineno}")
    if pending_key is not None:
        raise ParseError(f"unterminated value for {pending_key!r}")
    return doc


def parse_pair_document(source: str) -> dict:
    """Parse text or JSON into the raw ``{name, physical, virtual}`` mapping."""
    if source.lstrip().startswith("{"):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    else:
        doc = _parse_text(source)
    for s in _SECTIONS:
        if s not in doc or not isinstance(doc[s], dict):
            raise ParseError(f"missing '{s}:' section")
    return doc


def load_environment_pair(source: str, name: str | None = None) -> EnvPair:
    doc = parse_pair_document(source)
    envs = {}
    for s in _SECTIONS:
        sec = doc[s]
        envs[s] = validate_environment(sec.get("boundary"), sec.get("obstacles", []) or [],
                                       sec.get("dynamic", []) or [], label=s)
    return EnvPair(envs["physical"], envs["virtual"], name or doc.get("name") or "pair")


def load_environment_file(path) -> EnvPair:
    path = Path(path)
    return load_environment_pair(path.read_text(encoding="utf-8"), name=None)


def _fmt(x: float) -> str:
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def _fmt_ring(ring) -> str:
    return "[" + ", ".join(f"({_fmt(x)}, {_fmt(y)})" for x, y in ring) + "]"


def serialize_pair(pair: EnvPair, fmt: str = "text") -> str:
    if fmt == "json":
        doc = {"name": pair.name}
        for s, env in zip(_SECTIONS, (pair.phys, pair.virt)):
            doc[s] = {
                "boundary": env.boundary.tolist(),
                "obstacles": [o.tolist() for o in env.static_obstacles],
            }
            if env.dynamic_obstacles:
                doc[s]["dynamic"] = [{"radius": d.radius} for d in env.dynamic_obstacles]
        return json.dumps(doc, indent=2) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"name: {pair.name}"]
    for s, env in zip(_SECTIONS, (pair.phys, pair.virt)):
        lines.append(f"{s}:")
        lines.append(f"  boundary: {_fmt_ring(env.boundary)}")
        if env.static_obstacles:
            lines.append("  obstacles: [")
            body = [f"    {_fmt_ring(o)}" for o in env.static_obstacles]
            lines.append(",\n".join(body))
            lines.append("  ]")
        else:
            lines.append("  obstacles: []")
        if env.dynamic_obstacles:
            discs = ", ".join(f"{{radius: {_fmt(d.radius)}}}" for d in env.dynamic_obstacles)
            lines.append(f"  dynamic: [{discs}]")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# built-in pairs

_BUILTIN_CACHE: dict[int, EnvPair] = {}


def builtin_source(experiment: int) -> str:
    if experiment not in BUILTIN_IDS:
        raise ValueError(f"experiment must be one of {BUILTIN_IDS}, got {experiment!r}")
    return resources.files("rdwlab.data").joinpath(f"experiment{experiment}.env").read_text("utf-8")


def builtin_pair(experiment: int) -> EnvPair:
    """Environment pair used in experiment 1, 2, 3 or 4."""
    if experiment not in _BUILTIN_CACHE:
        _BUILTIN_CACHE[experiment] = load_environment_pair(builtin_source(experiment))
    return _BUILTIN_CACHE[experiment]
