"""Scene data model, the JSONL scene format, and a synthetic scene generator.

A scene file is UTF-8 JSONL with one record per line, keyed by ``kind``::

    {"kind": "ego", "t": 0.0, "x": 0.0, "y": 0.0, "heading": 0.0}
    {"kind": "object_frame", "track_id": "3", "frame": 0,
     "box": {"cx": 12.0, "cy": 3.2, "length": 4.5, "width": 1.9, "heading": 0.0},
     "points": [[10.1, 2.25], ...]}
    {"kind": "object_agg", "track_id": "3", "points": [[...], ...], "frame": 0}
    {"kind": "detection", "frame": 0, "box": {...}, "score": 0.93,
     "contour": [[x, y], ...]}

Ego records define the frames in timestamp order. ``object_agg`` points are
world coordinates registered at ``frame`` (default: the track's first frame
with a box). ``contour`` is optional. Unknown keys are ignored.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidConfig, MissingFrame, ParseError, ValidationError
from .geom import (
    Line2,
    OrientedBox2,
    PointSet,
    Polygon2,
    RigidMotion2,
    as_points,
    rotation_matrix,
    sample_polygon_boundary,
    wrap_angle,
)

DEFAULT_FRAME_PERIOD = 0.1
CROP_PADDING = 0.30
BOX_BOUNDARY_SAMPLES = 256
TIME_TOL = 1e-6


@dataclass(frozen=True)
class EgoPose:
    t: float
    x: float
    y: float
    heading: float

    def __post_init__(self):
        for name in ("t", "x", "y", "heading"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValidationError("must be finite", name)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    @property
    def center(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @property
    def lateral_line(self) -> Line2:
        """Line through the ego center along its heading."""
        return Line2.from_angle(self.center, self.heading)

    @property
    def longitudinal_line(self) -> Line2:
        return Line2.from_angle(self.center, self.heading + math.pi / 2.0)

    def moved(self, m: RigidMotion2) -> "EgoPose":
        c = m.apply(self.center)
        return EgoPose(self.t, c[0], c[1], self.heading + m.rotation)


def rigid_motion_between(box_a: OrientedBox2, box_b: OrientedBox2) -> RigidMotion2:
    """The motion carrying ``box_a``'s pose onto ``box_b``'s."""
    rot = wrap_angle(box_b.heading - box_a.heading)
    t = box_b.center - rotation_matrix(rot) @ box_a.center
    return RigidMotion2(rot, float(t[0]), float(t[1]))


@dataclass(eq=False)
class TrackedObject:
    track_id: str
    boxes: dict = field(default_factory=dict)  # frame -> OrientedBox2
    points: dict = field(default_factory=dict)  # frame -> (N, 2) visible points
    aggregated_points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    agg_frame: int | None = None

    def __post_init__(self):
        self.track_id = str(self.track_id)
        self.aggregated_points = as_points(self.aggregated_points)
        self.points = {int(f): as_points(p) for f, p in self.points.items()}
        if self.agg_frame is None and self.boxes:
            self.agg_frame = min(self.boxes)

    def __eq__(self, other):
        if not isinstance(other, TrackedObject):
            return NotImplemented
        return (
            self.track_id == other.track_id
            and self.boxes == other.boxes
            and self.points.keys() == other.points.keys()
            and all(np.array_equal(self.points[f], other.points[f]) for f in self.points)
            and np.array_equal(self.aggregated_points, other.aggregated_points)
            and self.agg_frame == other.agg_frame
        )

    def motion(self, frame_from: int, frame_to: int) -> RigidMotion2:
        try:
            return rigid_motion_between(self.boxes[frame_from], self.boxes[frame_to])
        except KeyError as exc:
            raise MissingFrame(f"track {self.track_id} has no box at frame {exc.args[0]}") from None

    def gt_boundary(self, frame: int, fallback: bool = True) -> PointSet | None:
        """Aggregated points moved to ``frame``; box perimeter samples if there are none."""
        if frame not in self.boxes:
            raise MissingFrame(f"track {self.track_id} has no box at frame {frame}")
        if len(self.aggregated_points):
            return PointSet(self.motion(self.agg_frame, frame).apply(self.aggregated_points))
        if fallback:
            return PointSet(self.boxes[frame].perimeter_samples(BOX_BOUNDARY_SAMPLES))
        return None


@dataclass(frozen=True)
class Detection:
    frame: int
    box: OrientedBox2
    score: float
    contour: Polygon2 | None = None

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValidationError("score must be finite", "score")

    def boundary(self, use_contour: bool = True) -> Polygon2:
        if use_contour and self.contour is not None:
            return self.contour
        return self.box.polygon()


@dataclass(eq=False)
class Scene:
    ego: tuple
    objects: tuple
    detections: tuple
    frame_period: float = DEFAULT_FRAME_PERIOD

    def __post_init__(self):
        self.ego = tuple(self.ego)
        self.objects = tuple(self.objects)
        self.detections = tuple(self.detections)
        validate_scene(self)
        self._det_by_frame = None

    def __eq__(self, other):
        if not isinstance(other, Scene):
            return NotImplemented
        return (
            self.ego == other.ego
            and self.objects == other.objects
            and self.detections == other.detections
            and self.frame_period == other.frame_period
        )

    @property
    def num_frames(self) -> int:
        return len(self.ego)

    def frame_offset(self, frame: int, t: float) -> int:
        """Index of the frame ``t`` seconds after ``frame``."""
        target = self.ego[frame].t + t
        k = int(round(t / self.frame_period)) + frame
        for cand in (k, k - 1, k + 1):
            if 0 <= cand < len(self.ego) and abs(self.ego[cand].t - target) <= TIME_TOL:
                return cand
        raise MissingFrame(f"no ego pose {t:g}s after frame {frame}")

    def detections_in_frame(self, frame: int) -> list:
        if self._det_by_frame is None:
            by = {}
            for i, d in enumerate(self.detections):
                by.setdefault(d.frame, []).append(i)
            self._det_by_frame = by
        return [self.detections[i] for i in self._det_by_frame.get(frame, [])]

    def objects_in_frame(self, frame: int) -> list:
        return [o for o in self.objects if frame in o.boxes]

    def frame_points(self, frame: int) -> np.ndarray:
        pts = [o.points[frame] for o in self.objects if frame in o.points and len(o.points[frame])]
        return np.concatenate(pts) if pts else np.zeros((0, 2))

    def with_detections(self, detections: Iterable[Detection]) -> "Scene":
        return Scene(self.ego, self.objects, tuple(detections), self.frame_period)


def validate_scene(scene: Scene, padding: float = CROP_PADDING) -> None:
    if not scene.frame_period > 0:
        raise ValidationError("must be > 0", "frame_period")
    times = [e.t for e in scene.ego]
    for i in range(1, len(times)):
        if not times[i] > times[i - 1]:
            raise ValidationError("ego timestamps must be strictly increasing", f"ego[{i}].t")
    n = len(scene.ego)
    for obj in scene.objects:
        for f, box in obj.boxes.items():
            if not 0 <= f < n:
                raise ValidationError(f"frame {f} out of range", f"object[{obj.track_id}].frame")
        for f, pts in obj.points.items():
            if not 0 <= f < n:
                raise ValidationError(f"frame {f} out of range", f"object[{obj.track_id}].frame")
            if len(pts) and f in obj.boxes and not np.all(obj.boxes[f].contains(pts, padding, 1e-6)):
                raise ValidationError(
                    "visible point outside the padded box", f"object[{obj.track_id}].frame[{f}].points"
                )
        if len(obj.aggregated_points) and obj.agg_frame not in obj.boxes:
            raise ValidationError("reference frame has no box", f"object[{obj.track_id}].agg_frame")
    for i, d in enumerate(scene.detections):
        if not 0 <= d.frame < n:
            raise ValidationError(f"frame {d.frame} out of range", f"detection[{i}].frame")


# ---------------------------------------------------------------- JSONL io


def _box_from_record(rec, where: str) -> OrientedBox2:
    if not isinstance(rec, dict):
        raise ValidationError("box must be an object", where)
    try:
        vals = [rec[k] for k in ("cx", "cy", "length", "width", "heading")]
    except KeyError as exc:
        raise ValidationError(f"missing key {exc.args[0]!r}", where) from None
    try:
        return OrientedBox2(*vals)
    except ValidationError as exc:
        raise ValidationError(str(exc).split(": ", 1)[-1], f"{where}.{exc.field}") from None
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc), where) from None


def _points_from_record(val, where: str) -> np.ndarray:
    try:
        arr = np.asarray(val, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("points must be [[x, y], ...]", where) from None
    if arr.size == 0:
        return np.zeros((0, 2))
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError("points must be [[x, y], ...]", where)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("non-finite coordinate", where)
    return arr


def _box_to_record(b: OrientedBox2) -> dict:
    return {"cx": b.cx, "cy": b.cy, "length": b.length, "width": b.width, "heading": b.heading}


def _points_to_list(pts) -> list:
    return [[float(x), float(y)] for x, y in np.asarray(pts).reshape(-1, 2)]


def parse_scene(lines: Iterable[str]) -> Scene:
    ego = []
    frames = {}  # track -> {frame: (box, pts)}
    aggs = {}
    dets = []
    seen_any = False
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        seen_any = True
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", lineno) from None
        if not isinstance(rec, dict) or "kind" not in rec:
            raise ParseError("record must be an object with a 'kind' key", lineno)
        kind = rec["kind"]
        where = f"line {lineno}"
        try:
            if kind == "ego":
                ego.append(EgoPose(rec["t"], rec["x"], rec["y"], rec["heading"]))
            elif kind == "object_frame":
                tid = str(rec["track_id"])
                frame = int(rec["frame"])
                box = _box_from_record(rec["box"], f"{where}.box")
                pts = _points_from_record(rec.get("points", []), f"{where}.points")
                if frame in frames.setdefault(tid, {}):
                    raise ValidationError(f"duplicate frame {frame} for track {tid}", f"{where}.frame")
                frames[tid][frame] = (box, pts)
            elif kind == "object_agg":
                tid = str(rec["track_id"])
                pts = _points_from_record(rec["points"], f"{where}.points")
                ref = rec.get("frame")
                aggs[tid] = (pts, None if ref is None else int(ref))
            elif kind == "detection":
                box = _box_from_record(rec["box"], f"{where}.box")
                contour = None
                if rec.get("contour") is not None:
                    cpts = _points_from_record(rec["contour"], f"{where}.contour")
                    try:
                        contour = Polygon2(cpts)
                    except ValidationError as exc:
                        raise ValidationError(str(exc).split(": ", 1)[-1], f"{where}.contour") from None
                    if not contour.is_simple():
                        raise ValidationError("contour is not simple", f"{where}.contour")
                score = float(rec["score"])
                if not (math.isfinite(score) and 0.0 <= score <= 1.0):
                    raise ValidationError("score must lie in [0, 1]", f"{where}.score")
                dets.append(Detection(int(rec["frame"]), box, score, contour))
            else:
                raise ParseError(f"unknown record kind {kind!r}", lineno)
        except KeyError as exc:
            raise ParseError(f"{kind} record missing key {exc.args[0]!r}", lineno) from None
        except (TypeError,) as exc:
            raise ParseError(f"bad value in {kind} record ({exc})", lineno) from None
        except ValidationError as exc:
            if exc.field and exc.field.startswith("line "):
                raise
            raise ValidationError(str(exc).split(": ", 1)[-1], f"{where}.{exc.field or kind}") from None
        except ValueError as exc:
            raise ParseError(f"bad value in {kind} record ({exc})", lineno) from None
    if not seen_any:
        raise ParseError("scene file is empty")
    if not ego:
        raise ParseError("scene has no ego records")
    objects = []
    for tid in sorted(set(frames) | set(aggs), key=_track_sort_key):
        per = frames.get(tid, {})
        agg, ref = aggs.get(tid, (np.zeros((0, 2)), None))
        objects.append(
            TrackedObject(
                tid,
                boxes={f: b for f, (b, _) in sorted(per.items())},
                points={f: p for f, (_, p) in sorted(per.items())},
                aggregated_points=agg,
                agg_frame=ref,
            )
        )
    period = ego[1].t - ego[0].t if len(ego) > 1 else DEFAULT_FRAME_PERIOD
    return Scene(tuple(ego), tuple(objects), tuple(dets), period)


def _track_sort_key(tid: str):
    return (0, int(tid), "") if tid.isdigit() else (1, 0, tid)


def load_scene(path) -> Scene:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        return parse_scene(fh)


def dump_scene(scene: Scene) -> str:
    buf = io.StringIO()

    def emit(rec):
        buf.write(json.dumps(rec, separators=(",", ":")))
        buf.write("\n")

    for e in scene.ego:
        emit({"kind": "ego", "t": e.t, "x": e.x, "y": e.y, "heading": e.heading})
    for obj in scene.objects:
        for f, box in sorted(obj.boxes.items()):
            emit(
                {
                    "kind": "object_frame",
                    "track_id": obj.track_id,
                    "frame": f,
                    "box": _box_to_record(box),
                    "points": _points_to_list(obj.points.get(f, np.zeros((0, 2)))),
                }
            )
        if len(obj.aggregated_points):
            emit(
                {
                    "kind": "object_agg",
                    "track_id": obj.track_id,
                    "frame": obj.agg_frame,
                    "points": _points_to_list(obj.aggregated_points),
                }
            )
    for d in scene.detections:
        rec = {"kind": "detection", "frame": d.frame, "box": _box_to_record(d.box), "score": d.score}
        if d.contour is not None:
            rec["contour"] = _points_to_list(d.contour.vertices)
        emit(rec)
    return buf.getvalue()


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(dump_scene(scene), encoding="utf-8")


# ------------------------------------------------------------- synthesis


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for :func:`synth_scene`. Distances in meters, angles in radians."""

    n_objects: int = 20
    n_frames: int = 100
    frame_period: float = DEFAULT_FRAME_PERIOD
    ego_speed: float = 8.0
    ego_yaw_rate: float = 0.0
    lanes: tuple = (-6.5, -3.3, 0.0, 3.3, 6.5)
    lane_jitter: float = 0.4
    object_speed: tuple = (0.0, 6.0)
    length_range: tuple = (3.8, 5.2)
    width_range: tuple = (1.7, 2.1)
    heading_jitter: float = 0.05
    corner_radius: float = 0.0
    point_spacing: float = 0.08
    agg_points: int = 512
    max_range: float = 40.0
    sparsity_range: float = 15.0
    point_noise: float = 0.0
    translation_noise: float = 0.0
    heading_noise: float = 0.0
    size_noise: float = 0.0
    detect_prob: float = 1.0
    false_positives: float = 0.0

    def validate(self) -> None:
        if self.n_objects <= 0:
            raise InvalidConfig("n_objects must be > 0")
        if self.n_frames <= 0:
            raise InvalidConfig("n_frames must be > 0")
        if not self.frame_period > 0:
            raise InvalidConfig("frame_period must be > 0")
        for name in ("translation_noise", "heading_noise", "size_noise", "point_noise", "corner_radius",
                     "false_positives", "lane_jitter", "heading_jitter"):
            if not getattr(self, name) >= 0:
                raise InvalidConfig(f"{name} must be >= 0")
        if self.point_noise > CROP_PADDING / 3:
            raise InvalidConfig("point_noise must be <= 0.1 to keep points inside the padded box")
        if not 0.0 <= self.detect_prob <= 1.0:
            raise InvalidConfig("detect_prob must lie in [0, 1]")
        if not self.point_spacing > 0 or self.agg_points < 8:
            raise InvalidConfig("point_spacing must be > 0 and agg_points >= 8")
        if self.corner_radius * 2 >= min(self.width_range[0], self.length_range[0]):
            raise InvalidConfig("corner_radius too large for the object sizes")


def object_outline(length: float, width: float, corner_radius: float = 0.0, arc_steps: int = 8) -> np.ndarray:
    """CCW outline of a (rounded) rectangle in its own frame."""
    hl, hw = length / 2.0, width / 2.0
    if corner_radius <= 0:
        return np.array([[hl, hw], [-hl, hw], [-hl, -hw], [hl, -hw]])
    r = corner_radius
    out = []
    centers = [(hl - r, hw - r, 0.0), (-hl + r, hw - r, 0.5 * math.pi), (-hl + r, -hw + r, math.pi),
               (hl - r, -hw + r, 1.5 * math.pi)]
    for cx, cy, a0 in centers:
        for k in range(arc_steps + 1):
            a = a0 + 0.5 * math.pi * k / arc_steps
            out.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    return np.array(out)


def _outline_normals(outline: np.ndarray, samples: np.ndarray) -> np.ndarray:
    """Outward normal of the outline edge nearest to each sample."""
    a = outline
    b = np.roll(outline, -1, axis=0)
    e = b - a
    len2 = np.einsum("ij,ij->i", e, e)
    rel = samples[:, None, :] - a[None]
    t = np.clip(np.einsum("nij,ij->ni", rel, e) / len2, 0, 1)
    d2 = np.sum((rel - t[..., None] * e[None]) ** 2, axis=2)
    k = np.argmin(d2, axis=1)
    ek = e[k] / np.sqrt(len2[k])[:, None]
    return np.stack([ek[:, 1], -ek[:, 0]], axis=1)


def _path_pose(s: float, lateral: float, curvature: float):
    if abs(curvature) < 1e-12:
        return np.array([s, lateral]), 0.0
    th = curvature * s
    base = np.array([math.sin(th) / curvature, (1 - math.cos(th)) / curvature])
    normal = np.array([-math.sin(th), math.cos(th)])
    return base + lateral * normal, th


def visible_mask(samples: np.ndarray, normals: np.ndarray, center: np.ndarray, sensor: np.ndarray) -> np.ndarray:
    """Samples whose surface faces the sensor and that lie on the sensor-facing half."""
    facing = np.einsum("ij,ij->i", normals, sensor - samples) > 0
    u = sensor - center
    near_half = (samples - center) @ u >= 0
    return facing & near_half


def synth_scene(config: SynthConfig = SynthConfig(), seed: int = 0) -> Scene:
    """Deterministic synthetic scene; see :class:`SynthConfig`."""
    config.validate()
    rng = np.random.default_rng(seed)
    cfg = config
    n_f = cfg.n_frames
    times = np.arange(n_f) * cfg.frame_period
    duration = times[-1]
    curvature = cfg.ego_yaw_rate / cfg.ego_speed if cfg.ego_speed > 0 else 0.0

    ego = []
    for t in times:
        pos, th = _path_pose(cfg.ego_speed * t, 0.0, curvature)
        ego.append(EgoPose(float(t), pos[0], pos[1], th))

    objects = []
    s_hi = cfg.ego_speed * duration + 30.0
    attempts = 0
    while len(objects) < cfg.n_objects:
        attempts += 1
        if attempts > 100 * cfg.n_objects:
            raise InvalidConfig("could not place objects within sensor range")
        i = len(objects)
        lane = float(rng.choice(cfg.lanes))
        lateral = lane + rng.uniform(-cfg.lane_jitter, cfg.lane_jitter)
        length = rng.uniform(*cfg.length_range)
        width = rng.uniform(*cfg.width_range)
        yaw_off = rng.normal(0.0, cfg.heading_jitter)
        if abs(lane) < 1e-9:
            # same lane as the ego: start ahead, slower than the ego so it is caught up with
            s0 = rng.uniform(14.0, max(20.0, s_hi))
            speed = rng.uniform(0.6, 0.9) * cfg.ego_speed
        else:
            s0 = rng.uniform(-15.0, s_hi)
            speed = rng.uniform(*cfg.object_speed)
        outline = object_outline(length, width, cfg.corner_radius)
        perimeter = float(np.sum(np.hypot(*(np.roll(outline, -1, 0) - outline).T)))
        n_dense = max(16, int(perimeter / cfg.point_spacing))
        dense_local = sample_polygon_boundary(outline, n_dense)
        normals_local = _outline_normals(outline, dense_local)
        if cfg.agg_points > len(outline):
            # keep the outline vertices: support distances are often attained there
            agg_local = np.r_[outline[1:], sample_polygon_boundary(outline, cfg.agg_points - len(outline) + 1)]
        else:
            agg_local = sample_polygon_boundary(outline, cfg.agg_points)
        boxes, points = {}, {}
        for f, t in enumerate(times):
            pos, th = _path_pose(s0 + speed * t, lateral, curvature)
            box = OrientedBox2(pos[0], pos[1], length, width, th + yaw_off)
            e = ego[f]
            rng_dist = float(np.hypot(*(box.center - e.center)))
            if rng_dist > cfg.max_range:
                # labels only exist while the object is within sensor range
                continue
            boxes[f] = box
            world = box.from_local(dense_local)
            normals = normals_local @ rotation_matrix(box.heading).T
            vis = visible_mask(world, normals, box.center, e.center)
            keep_p = min(1.0, (cfg.sparsity_range / max(rng_dist, 1e-6)) ** 2)
            keep = vis & (rng.random(len(world)) < keep_p)
            pts = world[keep]
            if cfg.point_noise > 0 and len(pts):
                pts = pts + rng.normal(0.0, cfg.point_noise, pts.shape).clip(-3 * cfg.point_noise, 3 * cfg.point_noise)
            points[f] = pts
        if not boxes:
            continue
        first = min(boxes)
        objects.append(
            TrackedObject(str(i), boxes, points, aggregated_points=boxes[first].from_local(agg_local), agg_frame=first)
        )

    detections = []
    for f in range(n_f):
        e = ego[f]
        for obj in objects:
            box = obj.boxes.get(f)
            if box is None:
                continue
            if rng.random() >= cfg.detect_prob:
                continue
            dx, dy = rng.normal(0.0, 1.0, 2) * cfg.translation_noise
            dh = rng.normal(0.0, 1.0) * cfg.heading_noise
            dl, dw = rng.normal(0.0, 1.0, 2) * cfg.size_noise
            jitter = rng.random()
            det_box = OrientedBox2(
                box.cx + dx,
                box.cy + dy,
                max(0.5, box.length + dl),
                max(0.5, box.width + dw),
                box.heading + dh,
            )
            mag = math.hypot(dx, dy) + abs(dh) * box.length / 2.0 + abs(dl) + abs(dw)
            score = math.exp(-2.0 * mag) * (1.0 - 0.1 * jitter)
            detections.append(Detection(f, det_box, float(score)))
        for _ in range(rng.poisson(cfg.false_positives) if cfg.false_positives > 0 else 0):
            r = rng.uniform(3.0, cfg.max_range)
            a = rng.uniform(-math.pi, math.pi)
            c = e.center + r * np.array([math.cos(a), math.sin(a)])
            fp = OrientedBox2(c[0], c[1], rng.uniform(*cfg.length_range), rng.uniform(*cfg.width_range),
                              rng.uniform(-math.pi, math.pi))
            detections.append(Detection(f, fp, float(rng.uniform(0.0, 0.5))))
    return Scene(tuple(ego), tuple(objects), tuple(detections), cfg.frame_period)


def subset_frames(scene: Scene, frames: Sequence[int]) -> Scene:
    """Restrict a scene to the given contiguous frame range (renumbered from 0)."""
    frames = list(frames)
    remap = {f: i for i, f in enumerate(frames)}
    objs = []
    for o in scene.objects:
        boxes = {remap[f]: b for f, b in o.boxes.items() if f in remap}
        if not boxes:
            continue
        pts = {remap[f]: p for f, p in o.points.items() if f in remap}
        agg = o.aggregated_points
        ref = o.agg_frame
        if len(agg) and ref not in remap:
            first = min(f for f in o.boxes if f in remap)
            agg = o.motion(ref, first).apply(agg)
            ref = first
        objs.append(TrackedObject(o.track_id, boxes, pts, agg, remap.get(ref)))
    dets = [replace(d, frame=remap[d.frame]) for d in scene.detections if d.frame in remap]
    return Scene(tuple(scene.ego[f] for f in frames), tuple(objs), tuple(dets), scene.frame_period)
