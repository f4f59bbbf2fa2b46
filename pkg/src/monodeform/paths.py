"""Piecewise paths in the complex plane with continuous branch tracking.

A path is a chain of Line and Arc segments, each parameterized on t in [0,1]
at constant speed.  For every tracked branch point p, the argument of z - p
is accumulated continuously along the path: straight segments change the
argument by less than pi (so a single principal-phase increment is exact),
and arcs are subdivided finely enough that the same holds per piece.  Arcs
centered on a tracked point accumulate their parameter sweep exactly, so a
full positive circle contributes exactly 2*pi.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import PathThroughSingularity
from .odecore import exclusion_radius

ENDPOINT_TOL = 1e-12
POINT_MATCH_TOL = 1e-9


@dataclass(frozen=True)
class Line:
    z0: complex
    z1: complex

    def point(self, t: float) -> complex:
        return self.z0 + t * (self.z1 - self.z0)

    def velocity(self, t: float) -> complex:
        return self.z1 - self.z0

    @property
    def length(self) -> float:
        return abs(self.z1 - self.z0)

    def reversed(self) -> "Line":
        return Line(self.z1, self.z0)

    def distance_to(self, p: complex) -> float:
        d = self.z1 - self.z0
        if abs(d) == 0:
            return abs(p - self.z0)
        rel = p - self.z0
        t = (rel.real * d.real + rel.imag * d.imag) / (abs(d) ** 2)
        t = min(1.0, max(0.0, t))
        return abs(p - self.point(t))


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    theta0: float
    theta1: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("arc radius must be positive")

    def angle(self, t: float) -> float:
        return self.theta0 + t * (self.theta1 - self.theta0)

    def point(self, t: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * self.angle(t))

    def velocity(self, t: float) -> complex:
        return 1j * self.radius * (self.theta1 - self.theta0) * cmath.exp(1j * self.angle(t))

    @property
    def length(self) -> float:
        return self.radius * abs(self.theta1 - self.theta0)

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.theta1, self.theta0)

    def distance_to(self, p: complex) -> float:
        rel = p - self.center
        if abs(self.theta1 - self.theta0) >= 2 * math.pi - 1e-15:
            return abs(abs(rel) - self.radius)
        phi = cmath.phase(rel) if abs(rel) > 0 else self.theta0
        lo, hi = sorted((self.theta0, self.theta1))
        k = math.floor((lo - phi) / (2 * math.pi))
        inside = any(lo <= phi + 2 * math.pi * (k + j) <= hi for j in range(4))
        if inside:
            return abs(abs(rel) - self.radius)
        return min(abs(p - self.point(0.0)), abs(p - self.point(1.0)))


Segment = Union[Line, Arc]


@dataclass(frozen=True)
class PathSpec:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("empty path")
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.point(1.0) - b.point(0.0)) > ENDPOINT_TOL:
                raise ValueError("consecutive segments do not share endpoints")

    @property
    def start(self) -> complex:
        return self.segments[0].point(0.0)

    @property
    def end(self) -> complex:
        return self.segments[-1].point(1.0)

    @property
    def is_closed(self) -> bool:
        return abs(self.start - self.end) <= ENDPOINT_TOL

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    def reversed(self) -> "PathSpec":
        return PathSpec(tuple(s.reversed() for s in reversed(self.segments)))

    def __add__(self, other: "PathSpec") -> "PathSpec":
        if abs(self.end - other.start) > ENDPOINT_TOL:
            raise ValueError("paths do not chain: endpoint mismatch")
        return PathSpec(self.segments + other.segments)

    def distance_to(self, p: complex) -> float:
        return min(s.distance_to(p) for s in self.segments)

    def arc_centers(self) -> list[complex]:
        return [s.center for s in self.segments if isinstance(s, Arc)]


def line_path(z0: complex, z1: complex) -> PathSpec:
    return PathSpec((Line(z0, z1),))


def loop_around(
    center: complex,
    radius: float,
    basepoint: complex,
    avoid: Sequence[complex] = (),
    orientation: int = +1,
) -> PathSpec:
    """Positively oriented loop: line in from the basepoint, full circle, line back."""
    d = basepoint - center
    if abs(d) < radius - ENDPOINT_TOL:
        raise PathThroughSingularity("basepoint lies inside the loop circle")
    for s in avoid:
        if abs(s - center) <= POINT_MATCH_TOL * (1 + abs(s)):
            continue
        if abs(s - center) < 2 * radius * (1 - 1e-12):
            raise PathThroughSingularity(
                f"singularity {s} within 2x loop radius of center {center}"
            )
    theta0 = cmath.phase(d)
    entry = center + radius * cmath.exp(1j * theta0)
    arc = Arc(center, radius, theta0, theta0 + orientation * 2 * math.pi)
    segs: list[Segment] = []
    if abs(basepoint - entry) > ENDPOINT_TOL:
        segs.append(Line(basepoint, entry))
    segs.append(arc)
    if abs(basepoint - entry) > ENDPOINT_TOL:
        segs.append(Line(entry, basepoint))
    path = PathSpec(tuple(segs))
    clearance_violations = validate_clearance(path, [s for s in avoid], skip=(center,))
    if clearance_violations:
        raise PathThroughSingularity(str(clearance_violations[0]))
    return path


def validate_clearance(
    path: PathSpec, points: Sequence[complex], skip: Sequence[complex] = ()
) -> list[str]:
    """Report tracked points the path approaches within the exclusion radius.

    Points listed in `skip` are exempt from their own centered arcs (a loop
    circles around its center by construction); connector segments are still
    checked against them.
    """
    out = []
    for p in points:
        skipped = any(abs(p - s) <= POINT_MATCH_TOL * (1 + abs(p)) for s in skip)
        segs = [
            seg for seg in path.segments
            if not (skipped and isinstance(seg, Arc)
                    and abs(seg.center - p) <= POINT_MATCH_TOL * (1 + abs(p)))
        ]
        if not segs:
            continue
        dist = min(seg.distance_to(p) for seg in segs)
        if dist < exclusion_radius(p):
            out.append(f"path passes within {dist:.3e} of singularity {p}")
    return out


# --- branch tracking ------------------------------------------------------


@dataclass(frozen=True)
class BranchState:
    """Continuously tracked arguments of z - p at one point of a path."""

    anchor: complex
    args: tuple[tuple[complex, float], ...]

    def arg(self, point: complex) -> float:
        for p, a in self.args:
            if abs(p - point) <= POINT_MATCH_TOL * (1 + abs(point)):
                return a
        raise KeyError(f"no tracked branch point at {point}")

    def has(self, point: complex) -> bool:
        return any(abs(p - point) <= POINT_MATCH_TOL * (1 + abs(point)) for p, _ in self.args)

    @staticmethod
    def principal(z: complex, points: Sequence[complex]) -> "BranchState":
        return BranchState(z, tuple((p, cmath.phase(z - p)) for p in points))

    def winding(self, point: complex, reference: "BranchState") -> float:
        return (self.arg(point) - reference.arg(point)) / (2 * math.pi)


def _arc_nodes(seg: Arc, p: complex) -> list[float]:
    """Parameter nodes fine enough that each piece turns < pi/2 seen from p."""
    if abs(seg.center - p) <= POINT_MATCH_TOL * (1 + abs(p)):
        return [0.0, 1.0]
    d_min = abs(abs(p - seg.center) - seg.radius)
    if d_min <= 1e-12 * (1 + abs(p)):
        raise PathThroughSingularity(f"arc passes through tracked point {p}")
    sweep = abs(seg.theta1 - seg.theta0)
    n = max(1, math.ceil(sweep * max(1.0, seg.radius / d_min) / (0.5 * math.pi)))
    return [i / n for i in range(n + 1)]


class ArgTracker:
    """Per-segment tables of accumulated arguments along a path."""

    def __init__(self, path: PathSpec, points: Sequence[complex],
                 start: Optional[BranchState] = None):
        self.path = path
        self.points = list(points)
        if start is None:
            start = BranchState.principal(path.start, self.points)
        # tables[i][j] = (t_nodes, arg_nodes) for segment i, point j
        self.tables: list[list[tuple[list[float], list[float]]]] = []
        current = [start.arg(p) for p in self.points]
        for seg in path.segments:
            row = []
            for j, p in enumerate(self.points):
                nodes = _arc_nodes(seg, p) if isinstance(seg, Arc) else [0.0, 1.0]
                args = [current[j]]
                exact_center = isinstance(seg, Arc) and abs(seg.center - p) <= POINT_MATCH_TOL * (1 + abs(p))
                for t_prev, t_next in zip(nodes, nodes[1:]):
                    if exact_center:
                        inc = seg.angle(t_next) - seg.angle(t_prev)
                    else:
                        inc = cmath.phase(
                            (seg.point(t_next) - p) / (seg.point(t_prev) - p)
                        )
                    args.append(args[-1] + inc)
                row.append((nodes, args))
                current[j] = args[-1]
            self.tables.append(row)
        self._start = start
        self._final = BranchState(path.end, tuple(zip(self.points, current)))

    def arg(self, seg_index: int, t: float, point: complex) -> float:
        j = next(
            i for i, p in enumerate(self.points)
            if abs(p - point) <= POINT_MATCH_TOL * (1 + abs(point))
        )
        nodes, args = self.tables[seg_index][j]
        seg = self.path.segments[seg_index]
        # bracketing node at or below t
        k = 0
        for i, tn in enumerate(nodes):
            if tn <= t + 1e-15:
                k = i
        if isinstance(seg, Arc) and abs(seg.center - point) <= POINT_MATCH_TOL * (1 + abs(point)):
            return args[k] + (seg.angle(t) - seg.angle(nodes[k]))
        return args[k] + cmath.phase((seg.point(t) - point) / (seg.point(nodes[k]) - point))

    def state_at(self, seg_index: int, t: float) -> BranchState:
        z = self.path.segments[seg_index].point(t)
        return BranchState(z, tuple((p, self.arg(seg_index, t, p)) for p in self.points))

    @property
    def start_state(self) -> BranchState:
        return self._start

    @property
    def end_state(self) -> BranchState:
        return self._final

    def windings(self) -> dict[complex, float]:
        return {
            p: (self._final.arg(p) - self._start.arg(p)) / (2 * math.pi)
            for p in self.points
        }


# --- JSON ------------------------------------------------------------------


def _c2j(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def path_to_json(path: PathSpec) -> dict:
    segs = []
    for s in path.segments:
        if isinstance(s, Line):
            segs.append({"line": [_c2j(s.z0), _c2j(s.z1)]})
        else:
            segs.append({"arc": {"center": _c2j(s.center), "r": s.radius,
                                 "th0": s.theta0, "th1": s.theta1}})
    return {"segments": segs}


def path_from_json(data) -> PathSpec:
    segs: list[Segment] = []
    for s in data["segments"]:
        if "line" in s:
            (a, b) = s["line"]
            segs.append(Line(complex(a[0], a[1]), complex(b[0], b[1])))
        elif "arc" in s:
            d = s["arc"]
            segs.append(Arc(complex(d["center"][0], d["center"][1]),
                            float(d["r"]), float(d["th0"]), float(d["th1"])))
        else:
            raise ValueError(f"unknown segment {s}")
    return PathSpec(tuple(segs))


def path_hash(path: PathSpec) -> str:
    blob = json.dumps(path_to_json(path), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
