"""Planar (bird's-eye-view) geometry primitives.

Points are plain float arrays: a single point has shape ``(2,)`` and a set of
points has shape ``(N, 2)``. The small value types below are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateInput, NonConvexInput, ValidationError

BOUNDARY_TOL = 1e-9
SLIVER_AREA = 1e-12
COLLINEAR_TOL = 1e-10  # hull area relative to squared extent


def as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(2)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("point has non-finite component", "point")
    return arr


def as_points(pts) -> np.ndarray:
    arr = np.asarray(pts, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 2))
    arr = arr.reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("points contain non-finite values", "points")
    return arr


def cross2(a, b):
    """Scalar 2D cross product, broadcasting over leading axes."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def wrap_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    r = math.remainder(float(theta), 2.0 * math.pi)
    if r <= -math.pi:
        r += 2.0 * math.pi
    return r


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Line2:
    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        origin = as_point(self.origin)
        direction = as_point(self.direction)
        if abs(np.hypot(*direction) - 1.0) > 1e-9:
            raise ValidationError("line direction must be a unit vector", "direction")
        object.__setattr__(self, "origin", _readonly(origin))
        object.__setattr__(self, "direction", _readonly(direction))

    @classmethod
    def from_angle(cls, origin, angle: float) -> "Line2":
        return cls(origin, (math.cos(angle), math.sin(angle)))

    def signed_distance(self, pts) -> np.ndarray:
        """Signed perpendicular offset; positive to the left of ``direction``."""
        pts = np.asarray(pts, dtype=float)
        return cross2(self.direction, pts - self.origin)


def point_line_distance(p, line: Line2) -> float:
    return float(abs(line.signed_distance(as_point(p))))


def segment_line_distance(a, b, line: Line2) -> float:
    """Minimum distance from segment ``ab`` to an infinite line; 0 if they cross."""
    sa = float(line.signed_distance(as_point(a)))
    sb = float(line.signed_distance(as_point(b)))
    if sa * sb <= 0.0:
        return 0.0
    return min(abs(sa), abs(sb))


@dataclass(frozen=True, eq=False)
class Polygon2:
    """Closed CCW polygon; the last vertex connects back to the first."""

    vertices: np.ndarray

    def __post_init__(self):
        v = as_points(self.vertices)
        if len(v) < 3:
            raise ValidationError("polygon needs at least 3 vertices", "vertices")
        if not signed_area(v) > 0.0:
            raise ValidationError("polygon must be counter-clockwise with positive area", "vertices")
        object.__setattr__(self, "vertices", _readonly(v))

    @classmethod
    def from_points(cls, pts) -> "Polygon2":
        """Build a polygon, reversing the vertex order if it is clockwise."""
        v = as_points(pts)
        if len(v) >= 3 and signed_area(v) < 0.0:
            v = v[::-1]
        return cls(v)

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        if not isinstance(other, Polygon2):
            return NotImplemented
        return self.vertices.shape == other.vertices.shape and bool(
            np.array_equal(self.vertices, other.vertices)
        )

    def __hash__(self):
        return hash(self.vertices.tobytes())

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        c = cross2(v, w)
        a = c.sum() / 2.0
        return ((v + w) * c[:, None]).sum(axis=0) / (6.0 * a)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def is_convex(self, tol: float = 1e-12) -> bool:
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        turn = cross2(e, np.roll(e, -1, axis=0))
        scale = max(1.0, float(np.abs(v).max())) ** 2
        return bool(np.all(turn >= -tol * scale))

    def is_simple(self) -> bool:
        """True if no two non-adjacent edges touch."""
        a, b = self.edges()
        n = len(a)
        if n == 3:
            return True
        i, j = np.triu_indices(n, k=2)
        keep = ~((i == 0) & (j == n - 1))
        i, j = i[keep], j[keep]
        return not bool(np.any(_segments_touch(a[i], b[i], a[j], b[j])))


def signed_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return float((x[:-1] @ y[1:] - y[:-1] @ x[1:] + x[-1] * y[0] - y[-1] * x[0]) / 2.0)


def _segments_touch(p1, p2, q1, q2) -> np.ndarray:
    d1 = cross2(q2 - q1, p1 - q1)
    d2 = cross2(q2 - q1, p2 - q1)
    d3 = cross2(p2 - p1, q1 - p1)
    d4 = cross2(p2 - p1, q2 - p1)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)

    def on_seg(a, b, c, d):
        return (np.abs(d) <= 1e-12) & (
            (np.minimum(a[:, 0], b[:, 0]) <= c[:, 0])
            & (c[:, 0] <= np.maximum(a[:, 0], b[:, 0]))
            & (np.minimum(a[:, 1], b[:, 1]) <= c[:, 1])
            & (c[:, 1] <= np.maximum(a[:, 1], b[:, 1]))
        )

    touch = on_seg(q1, q2, p1, d1) | on_seg(q1, q2, p2, d2) | on_seg(p1, p2, q1, d3) | on_seg(p1, p2, q2, d4)
    return proper | touch


@dataclass(frozen=True)
class OrientedBox2:
    """Rectangle footprint. ``length`` runs along ``heading``; ``width`` across it."""

    cx: float
    cy: float
    length: float
    width: float
    heading: float = 0.0

    def __post_init__(self):
        for name in ("cx", "cy", "length", "width", "heading"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValidationError("must be finite", name)
            object.__setattr__(self, name, val)
        if self.length <= 0:
            raise ValidationError("must be > 0", "length")
        if self.width <= 0:
            raise ValidationError("must be > 0", "width")
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    @property
    def center(self) -> np.ndarray:
        return np.array([self.cx, self.cy])

    @property
    def area(self) -> float:
        return self.length * self.width

    def corners(self) -> np.ndarray:
        hl, hw = self.length / 2.0, self.width / 2.0
        local = np.array([[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]])
        return self.from_local(local)

    def polygon(self) -> Polygon2:
        return Polygon2(self.corners())

    def to_local(self, pts) -> np.ndarray:
        """World points into the box frame (x along heading)."""
        pts = np.asarray(pts, dtype=float)
        return (pts - self.center) @ rotation_matrix(self.heading)

    def from_local(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ rotation_matrix(self.heading).T + self.center

    def contains(self, pts, padding: float = 0.0, tol: float = BOUNDARY_TOL) -> np.ndarray:
        local = self.to_local(as_points(pts))
        return (np.abs(local[:, 0]) <= self.length / 2.0 + padding + tol) & (
            np.abs(local[:, 1]) <= self.width / 2.0 + padding + tol
        )

    def perimeter_samples(self, n: int = 256) -> np.ndarray:
        """``n`` points evenly spaced by arc length around the footprint."""
        return sample_polygon_boundary(self.corners(), n)

    def scaled(self, k: float) -> "OrientedBox2":
        return OrientedBox2(self.cx, self.cy, self.length * k, self.width * k, self.heading)


@dataclass(frozen=True)
class RigidMotion2:
    """Rotation about the origin followed by a translation."""

    rotation: float = 0.0
    tx: float = 0.0
    ty: float = 0.0

    @property
    def translation(self) -> np.ndarray:
        return np.array([self.tx, self.ty])

    def apply(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ rotation_matrix(self.rotation).T + self.translation

    def then(self, other: "RigidMotion2") -> "RigidMotion2":
        """The motion that applies ``self`` first and ``other`` second."""
        t = other.apply(self.translation)
        return RigidMotion2(wrap_angle(self.rotation + other.rotation), float(t[0]), float(t[1]))

    def inverse(self) -> "RigidMotion2":
        t = -(self.translation @ rotation_matrix(self.rotation))
        return RigidMotion2(wrap_angle(-self.rotation), float(t[0]), float(t[1]))

    @classmethod
    def identity(cls) -> "RigidMotion2":
        return cls()


@dataclass(frozen=True, eq=False)
class PointSet:
    """A boundary given as a cloud of samples."""

    points: np.ndarray

    def __post_init__(self):
        pts = as_points(self.points)
        if len(pts) == 0:
            raise ValidationError("point set must be non-empty", "points")
        object.__setattr__(self, "points", _readonly(pts))

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(np.array_equal(self.points, other.points))

    def __hash__(self):
        return hash(self.points.tobytes())

    @property
    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)


Boundary = Union[PointSet, Polygon2]


def boundary_points(b: Boundary) -> np.ndarray:
    return b.points if isinstance(b, PointSet) else b.vertices


def boundary_center(b: Boundary) -> np.ndarray:
    return b.centroid


def apply_motion(m: RigidMotion2, b):
    """Move a boundary, box or raw point array rigidly."""
    if isinstance(b, PointSet):
        return PointSet(m.apply(b.points))
    if isinstance(b, Polygon2):
        return Polygon2(m.apply(b.vertices))
    if isinstance(b, OrientedBox2):
        c = m.apply(b.center)
        return OrientedBox2(c[0], c[1], b.length, b.width, b.heading + m.rotation)
    return m.apply(as_points(b))


def convex_hull(points) -> Polygon2:
    """Andrew's monotone chain. Collinear points on hull edges are dropped."""
    pts = as_points(points)
    if len(pts) < 3:
        raise DegenerateInput(f"convex hull needs >= 3 points, got {len(pts)}")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    pts = [tuple(p) for p in pts[keep]]

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    hull = np.array(hull)
    # relative test: rounding noise on collinear input leaves a sliver of ~1e-16 * extent**2
    extent = float(np.ptp(hull, axis=0).max()) if len(hull) else 0.0
    if len(hull) < 3 or not signed_area(hull) > COLLINEAR_TOL * extent**2:
        raise DegenerateInput("points are collinear")
    return Polygon2(hull)


def points_in_polygon(pts, poly: Polygon2, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Vectorised inside-or-on-boundary test for a simple polygon."""
    pts = as_points(pts)
    if len(pts) == 0:
        return np.zeros(0, dtype=bool)
    a, b = poly.edges()
    px = pts[:, None, 0]
    py = pts[:, None, 1]
    # crossing number
    ay, by = a[None, :, 1], b[None, :, 1]
    ax, bx = a[None, :, 0], b[None, :, 0]
    straddle = (ay > py) != (by > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_at = ax + (py - ay) * (bx - ax) / (by - ay)
    inside = (np.count_nonzero(straddle & (px < x_at), axis=1) % 2) == 1
    # boundary band
    e = b - a
    len2 = np.einsum("ij,ij->i", e, e)
    rel = pts[:, None, :] - a[None, :, :]
    tpar = np.clip(np.einsum("nij,ij->ni", rel, e) / np.where(len2 > 0, len2, 1.0), 0.0, 1.0)
    closest = a[None] + tpar[..., None] * e[None]
    d2 = np.sum((pts[:, None, :] - closest) ** 2, axis=2)
    on_edge = np.any(d2 <= tol * tol, axis=1)
    return inside | on_edge


def point_in_polygon(p, poly: Polygon2) -> bool:
    return bool(points_in_polygon(as_point(p)[None], poly)[0])


def clip_convex(subject: np.ndarray, clip: Polygon2) -> np.ndarray:
    """Sutherland-Hodgman: the part of ``subject`` inside convex CCW ``clip``."""
    out = [tuple(p) for p in subject]
    cv = clip.vertices
    for k in range(len(cv)):
        if not out:
            break
        c1 = cv[k - 1]
        c2 = cv[k]
        ex, ey = c2[0] - c1[0], c2[1] - c1[1]

        def side(p):
            return ex * (p[1] - c1[1]) - ey * (p[0] - c1[0])

        inp = out
        out = []
        s = inp[-1]
        ss = side(s)
        for e in inp:
            es = side(e)
            if es >= 0:
                if ss < 0:
                    out.append(_intersect(s, e, ss, es))
                out.append(e)
            elif ss >= 0:
                out.append(_intersect(s, e, ss, es))
            s, ss = e, es
    return np.array(out, dtype=float).reshape(-1, 2)


def _intersect(s, e, ss, es):
    t = ss / (ss - es)
    return (s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1]))


def polygon_intersection_area(p: Polygon2, q: Polygon2) -> float:
    if not p.is_convex():
        raise NonConvexInput("first polygon is not convex")
    if not q.is_convex():
        raise NonConvexInput("second polygon is not convex")
    clipped = clip_convex(p.vertices, q)
    if len(clipped) < 3:
        return 0.0
    area = abs(signed_area(clipped))
    return 0.0 if area < SLIVER_AREA else area


def box_iou_bev(a: OrientedBox2, b: OrientedBox2) -> float:
    inter = polygon_intersection_area(a.polygon(), b.polygon())
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return float(min(1.0, max(0.0, inter / union)))


def polygons_overlap(p: Polygon2, q: Polygon2, tol: float = BOUNDARY_TOL) -> bool:
    """Boundary-inclusive overlap test for two simple polygons."""
    pv, qv = p.vertices, q.vertices
    if np.any(pv.min(axis=0) > qv.max(axis=0) + tol) or np.any(qv.min(axis=0) > pv.max(axis=0) + tol):
        return False
    if np.any(points_in_polygon(p.vertices, q, tol)) or np.any(points_in_polygon(q.vertices, p, tol)):
        return True
    a1, b1 = p.edges()
    a2, b2 = q.edges()
    i, j = np.meshgrid(np.arange(len(a1)), np.arange(len(a2)), indexing="ij")
    i, j = i.ravel(), j.ravel()
    return bool(np.any(_segments_touch(a1[i], b1[i], a2[j], b2[j])))


def sample_polygon_boundary(vertices, n: int) -> np.ndarray:
    """``n`` points at equal arc-length spacing along a closed polyline."""
    v = np.asarray(vertices, dtype=float)
    w = np.roll(v, -1, axis=0)
    seg = np.hypot(*(w - v).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = np.arange(n) * (cum[-1] / n)
    k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(v) - 1)
    t = (s - cum[k]) / np.where(seg[k] > 0, seg[k], 1.0)
    return v[k] + t[:, None] * (w[k] - v[k])
