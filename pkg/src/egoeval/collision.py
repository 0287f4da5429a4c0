"""Collision events from ground truth and from detections, and how errors relate to them.

An event is keyed by ``(track, frame, t)``: looking from ``frame``, does the
object touch the enlarged ego footprint ``t`` seconds later? Ground truth
uses the object's aggregated points carried to the later frame. The
prediction carries the detection's shape by the same ground-truth motion.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .apeval import center_pairs, fmt, pair_table
from .errors import InvalidConfig, MissingFrame
from .geom import BOUNDARY_TOL, OrientedBox2, Polygon2, apply_motion, box_iou_bev, polygons_overlap
from .scene import EgoPose, Scene

EGO_DIMS = (4.8, 2.0)  # length, width in meters


@dataclass(frozen=True)
class CollisionConfig:
    ego_scale: float = 1.8
    horizon: float = 10.0
    step: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.ego_scale) and self.ego_scale >= 1.0):
            raise InvalidConfig("ego_scale must be >= 1")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise InvalidConfig("horizon must be > 0")
        if not (math.isfinite(self.step) and self.step > 0):
            raise InvalidConfig("step must be > 0")

    def offsets(self) -> list[float]:
        n = int(math.floor(self.horizon / self.step + 1e-9))
        return [round(k * self.step, 9) for k in range(n + 1)]


@dataclass(frozen=True, order=True)
class CollisionEvent:
    track_id: str
    frame: int
    kind: str  # "gt" or "pred"
    t_offset: float

    @property
    def key(self):
        return (self.track_id, self.frame, self.t_offset)


def ego_footprint(pose: EgoPose, ego_dims=EGO_DIMS, scale: float = 1.0) -> OrientedBox2:
    length, width = ego_dims
    return OrientedBox2(pose.x, pose.y, length * scale, width * scale, pose.heading)


def _check_dims(ego_dims):
    if len(ego_dims) != 2 or not all(math.isfinite(v) and v > 0 for v in ego_dims):
        raise InvalidConfig("ego dimensions must be two positive numbers")


def _frame_pairs(scene: Scene, t: float):
    """(frame, frame t seconds later) for every frame that has one."""
    out = []
    for f in range(scene.num_frames):
        try:
            out.append((f, scene.frame_offset(f, t)))
        except MissingFrame:
            continue
    return out


def gt_collisions(scene: Scene, ego_dims=EGO_DIMS, cfg: CollisionConfig = CollisionConfig(), boundary: str = "points"):
    """Ground-truth events. ``boundary="box"`` uses the object boxes instead of aggregated points."""
    _check_dims(ego_dims)
    if boundary not in ("points", "box"):
        raise InvalidConfig(f"unknown boundary {boundary!r}")
    contact: dict = {}  # (track, frame) -> bool, independent of where we look from

    def touches(obj, f1):
        key = (obj.track_id, f1)
        if key not in contact:
            fp = ego_footprint(scene.ego[f1], ego_dims, cfg.ego_scale)
            if boundary == "box":
                hit = polygons_overlap(fp.polygon(), obj.boxes[f1].polygon())
            else:
                hit = bool(fp.contains(obj.gt_boundary(f1).points, tol=BOUNDARY_TOL).any())
            contact[key] = hit
        return contact[key]

    events = []
    for t in cfg.offsets():
        for f, f1 in _frame_pairs(scene, t):
            for obj in scene.objects_in_frame(f):
                if f1 in obj.boxes and touches(obj, f1):
                    events.append(CollisionEvent(obj.track_id, f, "gt", t))
    return events


def _pred_shape(det, representation: str) -> Polygon2:
    if representation == "box":
        return det.box.polygon()
    return det.boundary(use_contour=True)


def pred_collisions(
    scene: Scene,
    representation: str = "box",
    ego_dims=EGO_DIMS,
    cfg: CollisionConfig = CollisionConfig(),
    radius: float = 2.0,
):
    """Predicted events from detections paired to objects by nearest center.

    ``representation`` is ``box`` or ``cvc``/``starpoly``, the latter using
    each detection's stored contour (its box when there is none).
    Returns ``(events, unmatched)`` where ``unmatched`` counts detections
    that were paired with no object and therefore skipped.
    """
    _check_dims(ego_dims)
    if representation not in ("box", "cvc", "starpoly"):
        raise InvalidConfig(f"unknown representation {representation!r}")
    pairs = {f: center_pairs(scene, f, radius) for f in range(scene.num_frames)}
    unmatched = len(scene.detections) - sum(len(p) for p in pairs.values())
    shapes: dict = {}
    events = []
    for t in cfg.offsets():
        for f, f1 in _frame_pairs(scene, t):
            fp = ego_footprint(scene.ego[f1], ego_dims, cfg.ego_scale).polygon()
            for i, obj in pairs[f]:
                if f1 not in obj.boxes:
                    continue
                if i not in shapes:
                    shapes[i] = _pred_shape(scene.detections[i], representation)
                shape = apply_motion(obj.motion(f, f1), shapes[i])
                if polygons_overlap(fp, shape):
                    events.append(CollisionEvent(obj.track_id, f, "pred", t))
    return events, unmatched


def label_events(gt_events: Sequence[CollisionEvent], pred_events: Sequence[CollisionEvent]) -> dict:
    """``{(track, frame, t): "TP" | "FP" | "FN"}`` from the two event sets."""
    g = {e.key for e in gt_events}
    p = {e.key for e in pred_events}
    out = {k: "TP" for k in g & p}
    out.update({k: "FN" for k in g - p})
    out.update({k: "FP" for k in p - g})
    return out


def cda(labels: dict, t: float) -> float:
    """TP / (TP + FP + FN) among events at offset ``t``; nan when there are none."""
    vals = [v for k, v in labels.items() if abs(k[2] - t) < 1e-9]
    return vals.count("TP") / len(vals) if vals else float("nan")


@dataclass
class GroupStats:
    group: str
    count: int
    mean_iou: float
    median_iou: float
    mean_sde: float  # pair SDE at the detection frame
    median_sde: float
    mean_sde_at_t: float  # pair SDE at the collision offset
    median_sde_at_t: float
    unscored: int = 0  # events whose object had no paired detection

    @property
    def empty(self) -> bool:
        return self.count == 0


@dataclass
class TimeRow:
    t: float
    cda: float
    mean_iou: float
    mean_sde: float
    tp: int
    fp: int
    fn: int
    pairs: int


@dataclass
class CollisionStudy:
    groups: list
    per_t: list
    unmatched_detections: int
    labels: dict = field(repr=False, default_factory=dict)
    # pairs dropped at each t because the object's track ended first
    left_track: dict = field(default_factory=dict)


def _stats(vals) -> tuple[float, float]:
    v = np.asarray([x for x in vals if not math.isnan(x)], dtype=float)
    if len(v) == 0:
        return float("nan"), float("nan")
    return float(v.mean()), float(np.median(v))


def collision_study(
    scene: Scene,
    cfg: CollisionConfig = CollisionConfig(),
    representation: str = "box",
    ego_dims=EGO_DIMS,
    radius: float = 2.0,
) -> CollisionStudy:
    """Group IoU/SDE by collision outcome (TP vs FP/FN) and track CDA over the horizon."""
    gt = gt_collisions(scene, ego_dims, cfg)
    pred, unmatched = pred_collisions(scene, representation, ego_dims, cfg, radius)
    labels = label_events(gt, pred)

    pairs = {f: center_pairs(scene, f, radius) for f in range(scene.num_frames)}
    use_contour = representation != "box"
    iou0, sde0, sde_t = {}, {}, {}
    per_t, left = [], {}
    for t in cfg.offsets():
        ious, sdes, dropped = [], [], 0
        for f, f1 in _frame_pairs(scene, t):
            alive = [(i, o) for i, o in pairs[f] if f1 in o.boxes]
            dropped += len(pairs[f]) - len(alive)
            scored = [(i, o) for i, o in alive if len(o.aggregated_points)]
            if scored:
                # diagonal of the paired table: each detection against its own object
                tab = pair_table(
                    scene, f, t, use_contour, radius, [(i, scene.detections[i]) for i, _ in scored], [o for _, o in scored]
                )
                k = np.arange(len(scored))
                for (i, o), v in zip(scored, tab.sde[k, k]):
                    sde_t[(o.track_id, f, t)] = float(v)
                    sdes.append(float(v))
                if t == 0:
                    for (i, o), v in zip(scored, tab.iou[k, k]):
                        iou0[(o.track_id, f)] = float(v)
                        sde0[(o.track_id, f)] = sde_t[(o.track_id, f, t)]
            for i, o in alive:
                if (o.track_id, f) not in iou0:
                    iou0[(o.track_id, f)] = box_iou_bev(scene.detections[i].box, o.boxes[f])
                ious.append(iou0[(o.track_id, f)])
        left[t] = dropped
        lab = [v for k, v in labels.items() if abs(k[2] - t) < 1e-9]
        per_t.append(
            TimeRow(
                t,
                cda(labels, t),
                _stats(ious)[0],
                _stats(sdes)[0],
                lab.count("TP"),
                lab.count("FP"),
                lab.count("FN"),
                len(ious),
            )
        )

    groups = []
    for name, members in (("TP", ("TP",)), ("FP/FN", ("FP", "FN"))):
        keys = sorted(k for k, v in labels.items() if v in members)
        scored = [k for k in keys if (k[0], k[1]) in iou0]
        m_iou, md_iou = _stats([iou0[(k[0], k[1])] for k in scored])
        m_sde, md_sde = _stats([sde0.get((k[0], k[1]), float("nan")) for k in scored])
        m_sdt, md_sdt = _stats([sde_t.get(k, float("nan")) for k in scored])
        groups.append(GroupStats(name, len(keys), m_iou, md_iou, m_sde, md_sde, m_sdt, md_sdt, len(keys) - len(scored)))
    return CollisionStudy(groups, per_t, unmatched, labels, left)


GROUP_COLUMNS = (
    "group",
    "count",
    "status",
    "mean_iou",
    "median_iou",
    "mean_sde",
    "median_sde",
    "mean_sde_at_t",
    "median_sde_at_t",
    "unscored",
)
TIME_COLUMNS = ("t", "cda", "mean_iou", "mean_sde", "tp", "fp", "fn", "pairs")


def groups_csv(study: CollisionStudy) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(GROUP_COLUMNS)
    for g in study.groups:
        wr.writerow(
            [
                g.group,
                g.count,
                "empty" if g.empty else "ok",
                fmt(g.mean_iou),
                fmt(g.median_iou),
                fmt(g.mean_sde),
                fmt(g.median_sde),
                fmt(g.mean_sde_at_t),
                fmt(g.median_sde_at_t),
                g.unscored,
            ]
        )
    return buf.getvalue()


def per_t_csv(study: CollisionStudy) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(TIME_COLUMNS)
    for r in study.per_t:
        wr.writerow([fmt(r.t), fmt(r.cda), fmt(r.mean_iou), fmt(r.mean_sde), r.tp, r.fp, r.fn, r.pairs])
    return buf.getvalue()
