"""Matching detections to ground truth, PR curves and SDE/IoU based AP.

Matching is greedy in descending score. Under the SDE criterion a detection
takes the unmatched object with the smallest SDE among those below the
threshold; under the IoU criterion it takes the nearest unmatched object
center within ``match_radius`` and is a true positive when the BEV IoU of
the two boxes reaches ``iou_threshold``.

For a time offset ``t`` the SDE of a pair is measured after carrying both
boundaries by the object's ground-truth motion from the detection frame to
the frame ``t`` seconds later (see ``sde.sde_at``). Distances used by APD
weights and range buckets are taken at the detection frame.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyInput, InvalidConfig, MissingFrame, ZeroDistanceWarning
from .geom import box_iou_bev
from .scene import Detection, EgoPose, Scene, TrackedObject
from .sde import sde_at, sde_stats

METRICS = ("sde-ap", "sde-apd", "iou-ap", "iou-apd")
DEFAULT_BUCKETS = ((0.0, 5.0), (5.0, 10.0), (10.0, 20.0), (20.0, 40.0))
ALL_RANGE = (0.0, math.inf)
DISTANCE_FLOOR = 0.5  # meters; closer centers get the weight of this distance


@dataclass(frozen=True)
class MatchConfig:
    criterion: str = "sde"  # "sde" or "iou"
    sde_threshold: float = 0.20
    iou_threshold: float = 0.70
    match_radius: float = 2.0
    # restrict SDE candidates to pairs below the threshold, so a failed
    # detection never consumes an object
    gate: bool = True

    def __post_init__(self):
        if self.criterion not in ("sde", "iou"):
            raise InvalidConfig(f"unknown criterion {self.criterion!r}")
        if not self.sde_threshold > 0:
            raise InvalidConfig("sde_threshold must be > 0")
        if not 0 < self.iou_threshold <= 1:
            raise InvalidConfig("iou_threshold must be in (0, 1]")
        if not self.match_radius > 0:
            raise InvalidConfig("match_radius must be > 0")


@dataclass(frozen=True)
class WeightConfig:
    beta: float = 3.0

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise InvalidConfig("beta must be finite and >= 0")


@dataclass
class APResult:
    ap: float
    pr_points: list  # (precision, recall, score_threshold), thresholds descending
    key: dict = field(default_factory=dict)
    defined: bool = True
    n_gt: int = 0
    n_det: int = 0
    skipped_gt: int = 0


@dataclass(frozen=True)
class MatchRecord:
    detection: Detection
    track_id: str | None
    quality: float  # SDE (m) or IoU; nan when unmatched
    tp: bool


# ---------------------------------------------------------------------------
# per-frame pair tables


def ego_frame_offsets(ego: EgoPose, pts) -> np.ndarray:
    """(forward, left) coordinates of world points relative to the ego pose."""
    d = np.atleast_2d(np.asarray(pts, dtype=float)) - ego.center
    c, s = math.cos(ego.heading), math.sin(ego.heading)
    return np.stack([d[:, 0] * c + d[:, 1] * s, -d[:, 0] * s + d[:, 1] * c], axis=1)


def manhattan_to_ego(ego: EgoPose, pts) -> np.ndarray:
    """Manhattan distance measured along the ego's own axes."""
    return np.abs(ego_frame_offsets(ego, pts)).sum(axis=1)


def range_to_ego(ego: EgoPose, pts) -> np.ndarray:
    d = np.atleast_2d(np.asarray(pts, dtype=float)) - ego.center
    return np.hypot(d[:, 0], d[:, 1])


def _pose_lines(ego: EgoPose):
    """(origin, [lateral dir, longitudinal dir]) of the two ego lines."""
    h = ego.heading
    dirs = np.array([[math.cos(h), math.sin(h)], [-math.sin(h), math.cos(h)]])
    return ego.center, dirs


def _polygon_supports(verts: np.ndarray, starts: np.ndarray, origin, dirs) -> np.ndarray:
    """Support distances of many polygons (vertices concatenated) to two lines; shape (P, 2)."""
    rel = verts - origin
    out = np.empty((len(starts), 2))
    for k in range(2):
        s = dirs[k, 0] * rel[:, 1] - dirs[k, 1] * rel[:, 0]
        lo = np.minimum.reduceat(s, starts)
        hi = np.maximum.reduceat(s, starts)
        dist = np.minimum(np.abs(lo), np.abs(hi))
        out[:, k] = np.where((lo <= 0.0) & (hi >= 0.0), 0.0, dist)
    return out


def _point_supports(pts: np.ndarray, origin, dirs) -> np.ndarray:
    rel = pts - origin
    out = np.empty(2)
    for k in range(2):
        s = dirs[k, 0] * rel[:, 1] - dirs[k, 1] * rel[:, 0]
        out[k] = 0.0 if s.min() <= 0.0 <= s.max() else np.abs(s).min()
    return out


@dataclass
class FrameTable:
    """Everything matching needs for one detection frame and time offset."""

    frame: int
    eval_frame: int
    det_index: np.ndarray  # positions in scene.detections
    scores: np.ndarray
    track_ids: list
    sde_lat: np.ndarray  # (D, G) signed, gt minus prediction
    sde_lon: np.ndarray
    center_dist: np.ndarray  # (D, G) detection center to object box center
    iou: np.ndarray  # (D, G), nan outside the match radius
    det_manhattan: np.ndarray
    det_range: np.ndarray
    gt_manhattan: np.ndarray
    gt_range: np.ndarray

    @property
    def sde(self) -> np.ndarray:
        return np.maximum(np.abs(self.sde_lat), np.abs(self.sde_lon))


def pair_table(
    scene: Scene,
    frame: int,
    t: float = 0.0,
    use_contour: bool = False,
    match_radius: float = 2.0,
    dets: Sequence[tuple[int, Detection]] | None = None,
    tracks: Sequence[TrackedObject] | None = None,
) -> FrameTable:
    """Pairwise SDE@t, center distance and IoU between a frame's detections and objects.

    Objects need a box at both ends of the offset and aggregated points;
    raises MissingFrame when the scene has no frame ``t`` seconds later.
    """
    f1 = scene.frame_offset(frame, t)
    if dets is None:
        dets = [(i, d) for i, d in enumerate(scene.detections) if d.frame == frame]
    if tracks is None:
        tracks = [o for o in scene.objects_in_frame(frame) if f1 in o.boxes and len(o.aggregated_points)]
    D, G = len(dets), len(tracks)
    ego0, ego1 = scene.ego[frame], scene.ego[f1]
    sde_lat = np.zeros((D, G))
    sde_lon = np.zeros((D, G))
    if D:
        polys = [d.boundary(use_contour).vertices for _, d in dets]
        starts = np.cumsum([0] + [len(p) for p in polys[:-1]])
        verts = np.concatenate(polys)
    for j, trk in enumerate(tracks):
        # measuring moved shapes against the future pose is the same as
        # measuring unmoved shapes against the pose pulled back by the motion
        pose = ego1.moved(trk.motion(frame, f1).inverse())
        origin, dirs = _pose_lines(pose)
        gt_sd = _point_supports(trk.gt_boundary(frame).points, origin, dirs)
        if D:
            sd = _polygon_supports(verts, starts, origin, dirs)
            sde_lat[:, j] = gt_sd[0] - sd[:, 0]
            sde_lon[:, j] = gt_sd[1] - sd[:, 1]
    det_centers = np.array([d.box.center for _, d in dets]).reshape(-1, 2)
    gt_centers = np.array([o.boxes[frame].center for o in tracks]).reshape(-1, 2)
    if D and G:
        diff = det_centers[:, None, :] - gt_centers[None, :, :]
        center_dist = np.hypot(diff[..., 0], diff[..., 1])
    else:
        center_dist = np.zeros((D, G))
    iou = np.full((D, G), np.nan)
    for a, b in zip(*np.nonzero(center_dist <= match_radius)):
        iou[a, b] = box_iou_bev(dets[a][1].box, tracks[b].boxes[frame])
    return FrameTable(
        frame=frame,
        eval_frame=f1,
        det_index=np.array([i for i, _ in dets], dtype=int),
        scores=np.array([d.score for _, d in dets], dtype=float),
        track_ids=[o.track_id for o in tracks],
        sde_lat=sde_lat,
        sde_lon=sde_lon,
        center_dist=center_dist,
        iou=iou,
        det_manhattan=manhattan_to_ego(ego0, det_centers) if D else np.zeros(0),
        det_range=range_to_ego(ego0, det_centers) if D else np.zeros(0),
        gt_manhattan=manhattan_to_ego(ego0, gt_centers) if G else np.zeros(0),
        gt_range=range_to_ego(ego0, gt_centers) if G else np.zeros(0),
    )


def scene_tables(scene: Scene, t: float = 0.0, use_contour: bool = False, match_radius: float = 2.0):
    """Pair tables for every frame that has a frame ``t`` seconds later.

    Returns ``(tables, skipped_gt)``; ``skipped_gt`` counts objects left out
    for lacking aggregated points. Objects whose track ends before the later
    frame are left out too, and so are the detections center-paired to any
    left-out object.
    """
    tables, skipped = [], 0
    det_by_frame: dict = {}
    for i, d in enumerate(scene.detections):
        det_by_frame.setdefault(d.frame, []).append((i, d))
    for f in range(scene.num_frames):
        try:
            f1 = scene.frame_offset(f, t)
        except MissingFrame:
            continue
        objs = scene.objects_in_frame(f)
        tracks = [o for o in objs if f1 in o.boxes and len(o.aggregated_points)]
        skipped += sum(1 for o in objs if f1 in o.boxes and not len(o.aggregated_points))
        dets = det_by_frame.get(f, [])
        if len(tracks) < len(objs):
            # detections of objects that cannot be scored leave with them
            kept = {o.track_id for o in tracks}
            gone = {i for i, o in center_pairs(scene, f, match_radius) if o.track_id not in kept}
            dets = [(i, d) for i, d in dets if i not in gone]
        tables.append(pair_table(scene, f, t, use_contour, match_radius, dets, tracks))
    if not tables:
        raise MissingFrame(f"no frame of the scene has a frame {t:g}s later")
    return tables, skipped


# ---------------------------------------------------------------------------
# matching


def greedy_match(table: FrameTable, cfg: MatchConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Assignment (object column or -1), quality and TP flag per detection row."""
    D, G = table.center_dist.shape
    assign = np.full(D, -1)
    quality = np.full(D, np.nan)
    tp = np.zeros(D, dtype=bool)
    taken = np.zeros(G, dtype=bool)
    if D == 0 or G == 0:
        return assign, quality, tp
    sde = table.sde
    for i in np.argsort(-table.scores, kind="stable"):
        if cfg.criterion == "sde":
            cost = sde[i]
            ok = ~taken
            if cfg.gate:
                ok &= cost < cfg.sde_threshold
        else:
            cost = table.center_dist[i]
            ok = ~taken & (cost <= cfg.match_radius)
        if not ok.any():
            continue
        j = int(np.argmin(np.where(ok, cost, np.inf)))
        taken[j] = True
        assign[i] = j
        if cfg.criterion == "sde":
            quality[i] = sde[i, j]
            tp[i] = quality[i] < cfg.sde_threshold
        else:
            quality[i] = table.iou[i, j]
            tp[i] = quality[i] >= cfg.iou_threshold
    return assign, quality, tp


def match(
    detections: Sequence[Detection],
    objects: Sequence[TrackedObject],
    cfg: MatchConfig,
    scene: Scene,
    frame: int,
    use_contour: bool = False,
) -> list[MatchRecord]:
    """Match one frame's detections to objects at offset zero."""
    dets = list(enumerate(detections))
    tracks = [o for o in objects if frame in o.boxes and len(o.aggregated_points)]
    table = pair_table(scene, frame, 0.0, use_contour, cfg.match_radius, dets, tracks)
    assign, quality, tp = greedy_match(table, cfg)
    return [
        MatchRecord(d, table.track_ids[assign[i]] if assign[i] >= 0 else None, float(quality[i]), bool(tp[i]))
        for i, d in dets
    ]


# ---------------------------------------------------------------------------
# PR curves and AP


def distance_weight(dist, beta: float) -> np.ndarray:
    """``max(d, 0.5)**-beta``; warns when a center sits on the ego center."""
    d = np.asarray(dist, dtype=float)
    if np.any(d <= 1e-9):
        warnings.warn("object center coincides with the ego center; weight capped", ZeroDistanceWarning, stacklevel=2)
    return np.maximum(d, DISTANCE_FLOOR) ** -float(beta)


def pr_curve(scores, tp, tp_weight, fp_weight, total_gt_weight):
    """Precision/recall at every distinct score threshold, highest first."""
    scores = np.asarray(scores, dtype=float)
    if len(scores) == 0:
        return np.zeros(0), np.zeros(0), np.zeros(0)
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    tpw = np.where(tp, tp_weight, 0.0)[order]
    fpw = np.where(tp, 0.0, fp_weight)[order]
    ctp, cfp = np.cumsum(tpw), np.cumsum(fpw)
    last = np.r_[s[1:] != s[:-1], True]  # last index of each tie group
    ctp, cfp, thr = ctp[last], cfp[last], s[last]
    denom = ctp + cfp
    precision = np.where(denom > 0, ctp / np.where(denom > 0, denom, 1.0), 0.0)
    recall = ctp / total_gt_weight if total_gt_weight > 0 else np.zeros_like(ctp)
    return np.clip(precision, 0.0, 1.0), np.clip(recall, 0.0, 1.0), thr


def average_precision(precision, recall) -> float:
    """Trapezoidal area under the monotone precision envelope.

    The curve starts at recall 0 with the first envelope value.
    """
    p = np.asarray(precision, dtype=float)
    r = np.asarray(recall, dtype=float)
    if len(p) == 0:
        return 0.0
    env = np.maximum.accumulate(p[::-1])[::-1]
    rr = np.r_[0.0, r]
    pp = np.r_[env[0], env]
    return float(np.clip(np.sum(np.diff(rr) * (pp[1:] + pp[:-1]) / 2.0), 0.0, 1.0))


@dataclass
class _Pooled:
    scores: np.ndarray
    tp: np.ndarray
    tp_dist: np.ndarray  # manhattan distance of the matched object (nan if none)
    fp_dist: np.ndarray  # manhattan distance of the detection itself
    det_range: np.ndarray  # range used for bucketing
    gt_dist: np.ndarray
    gt_range: np.ndarray


def _pool(tables: Sequence[FrameTable], cfg: MatchConfig) -> _Pooled:
    sc, tps, tpd, fpd, dr, gd, gr = [], [], [], [], [], [], []
    for tab in tables:
        assign, _, tp = greedy_match(tab, cfg)
        m = assign >= 0
        sc.append(tab.scores)
        tps.append(tp)
        tpd.append(np.where(m, tab.gt_manhattan[np.maximum(assign, 0)] if len(tab.gt_manhattan) else np.nan, np.nan))
        fpd.append(tab.det_manhattan)
        # matched detections follow their object into its bucket
        dr.append(np.where(m, tab.gt_range[np.maximum(assign, 0)] if len(tab.gt_range) else 0.0, tab.det_range))
        gd.append(tab.gt_manhattan)
        gr.append(tab.gt_range)
    cat = lambda xs: np.concatenate(xs) if xs else np.zeros(0)  # noqa: E731
    return _Pooled(cat(sc), cat(tps).astype(bool), cat(tpd), cat(fpd), cat(dr), cat(gd), cat(gr))


def _in_bucket(x, bucket) -> np.ndarray:
    lo, hi = bucket
    return (x >= lo) & (x < hi)


def _result(pool: _Pooled, beta: float | None, bucket, key: dict, skipped: int) -> APResult:
    det_in = _in_bucket(pool.det_range, bucket)
    gt_in = _in_bucket(pool.gt_range, bucket)
    n_gt = int(gt_in.sum())
    if n_gt == 0:
        return APResult(float("nan"), [], key, False, 0, int(det_in.sum()), skipped)
    tp = pool.tp[det_in]
    if beta is None:
        tp_w = np.ones(len(tp))
        fp_w = np.ones(len(tp))
        total = float(n_gt)
    else:
        tp_w = np.where(tp, distance_weight(np.where(tp, pool.tp_dist[det_in], 1.0), beta), 0.0)
        fp_w = distance_weight(pool.fp_dist[det_in], beta)
        total = float(distance_weight(pool.gt_dist[gt_in], beta).sum())
    p, r, thr = pr_curve(pool.scores[det_in], tp, tp_w, fp_w, total)
    pts = [(float(a), float(b), float(c)) for a, b, c in zip(p, r, thr)]
    return APResult(average_precision(p, r), pts, key, True, n_gt, int(det_in.sum()), skipped)


def _check_t(scene: Scene, t: float) -> None:
    if t < 0:
        raise MissingFrame("negative time offset")
    try:
        scene.frame_offset(0, t)
    except MissingFrame:
        raise MissingFrame(f"t={t:g}s is not a whole number of frames within the scene") from None


def ap(
    scene: Scene,
    cfg: MatchConfig = MatchConfig(),
    t: float = 0.0,
    use_contour: bool = False,
    bucket=ALL_RANGE,
    tables=None,
) -> APResult:
    """Detections pooled over frames and swept by score threshold."""
    if tables is None:
        _check_t(scene, t)
        tables, skipped = scene_tables(scene, t, use_contour, cfg.match_radius)
    else:
        tables, skipped = tables
    key = {"metric": f"{cfg.criterion}-ap", "bucket": bucket, "t": t}
    return _result(_pool(tables, cfg), None, bucket, key, skipped)


def apd(
    scene: Scene,
    cfg: MatchConfig = MatchConfig(),
    w: WeightConfig = WeightConfig(),
    t: float = 0.0,
    use_contour: bool = False,
    bucket=ALL_RANGE,
    tables=None,
) -> APResult:
    """AP with every count weighted by inverse Manhattan distance to the ego, ``d**-beta``.

    True positives use the matched object's distance, false positives their
    own center's, and the recall denominator sums over all objects. Weighted
    counts are pooled over frames before forming precision and recall.
    """
    if tables is None:
        _check_t(scene, t)
        tables, skipped = scene_tables(scene, t, use_contour, cfg.match_radius)
    else:
        tables, skipped = tables
    key = {"metric": f"{cfg.criterion}-apd", "bucket": bucket, "t": t, "beta": w.beta}
    return _result(_pool(tables, cfg), w.beta, bucket, key, skipped)


def metric_config(metric: str, delta: float = 0.2, iou_threshold: float = 0.7, match_radius: float = 2.0) -> MatchConfig:
    if metric not in METRICS:
        raise InvalidConfig(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    crit = metric.split("-")[0]
    return MatchConfig(crit, sde_threshold=delta, iou_threshold=iou_threshold, match_radius=match_radius)


def breakdown_report(
    scene: Scene,
    metrics: Iterable[str] = ("sde-ap",),
    buckets: Iterable = (ALL_RANGE,),
    t_list: Iterable[float] = (0.0,),
    deltas: Iterable[float] = (0.2,),
    betas: Iterable[float] = (3.0,),
    use_contour: bool = False,
    iou_threshold: float = 0.7,
    match_radius: float = 2.0,
) -> list[APResult]:
    """One APResult per metric x bucket x t x threshold x beta.

    Thresholds only apply to SDE metrics and betas only to APD metrics;
    the other combinations are emitted once. Empty buckets come back with
    ``defined=False``.
    """
    metrics, buckets = list(metrics), [tuple(b) for b in buckets]
    t_list, deltas, betas = list(t_list), list(deltas), list(betas)
    if not (metrics and buckets and t_list and deltas and betas):
        raise EmptyInput("every grid must be non-empty")
    for m in metrics:
        metric_config(m)
    out = []
    for t in t_list:
        _check_t(scene, t)
        tables = scene_tables(scene, t, use_contour, match_radius)
        for metric in metrics:
            kind, weighted = metric.split("-")
            for delta in deltas if kind == "sde" else [None]:
                cfg = metric_config(metric, delta if delta is not None else 0.2, iou_threshold, match_radius)
                pool = _pool(tables[0], cfg)
                for beta in betas if weighted == "apd" else [None]:
                    for b in buckets:
                        key = {"metric": metric, "bucket": b, "t": t, "delta": delta, "beta": beta}
                        out.append(_result(pool, beta, b, key, tables[1]))
    return out


# ---------------------------------------------------------------------------
# SDE of center-paired detections (representation comparisons)


def center_pairs(scene: Scene, frame: int, radius: float = 2.0) -> list[tuple[int, TrackedObject]]:
    """Greedy nearest-center pairing of a frame's detections to objects, by descending score."""
    dets = [(i, d) for i, d in enumerate(scene.detections) if d.frame == frame]
    objs = scene.objects_in_frame(frame)
    if not dets or not objs:
        return []
    dc = np.array([d.box.center for _, d in dets])
    oc = np.array([o.boxes[frame].center for o in objs])
    diff = dc[:, None, :] - oc[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    taken = np.zeros(len(objs), dtype=bool)
    pairs = []
    for k in np.argsort(-np.array([d.score for _, d in dets]), kind="stable"):
        ok = ~taken & (dist[k] <= radius)
        if ok.any():
            j = int(np.argmin(np.where(ok, dist[k], np.inf)))
            taken[j] = True
            pairs.append((dets[k][0], objs[j]))
    return sorted(pairs, key=lambda p: p[0])


def paired_sde(scene: Scene, t: float = 0.0, use_contour: bool = True, radius: float = 2.0, bucket=ALL_RANGE):
    """SDE@t records of every center-paired detection whose object survives ``t`` seconds.

    Pairs are formed at the detection frame, so they do not depend on the
    representation being scored.
    """
    records = []
    for f in range(scene.num_frames):
        try:
            f1 = scene.frame_offset(f, t)
        except MissingFrame:
            continue
        for i, trk in center_pairs(scene, f, radius):
            if f1 not in trk.boxes or not len(trk.aggregated_points):
                continue
            if not _in_bucket(range_to_ego(scene.ego[f], trk.boxes[f].center)[0], bucket):
                continue
            det = scene.detections[i]
            records.append(sde_at(det.boundary(use_contour), trk, scene.ego, f, t))
    return records


def mean_sde(scene: Scene, t: float = 0.0, use_contour: bool = True, radius: float = 2.0, bucket=ALL_RANGE) -> float:
    recs = paired_sde(scene, t, use_contour, radius, bucket)
    return sde_stats(recs).mean_sde if recs else float("nan")


# ---------------------------------------------------------------------------
# CSV output

AP_COLUMNS = ("metric", "bucket", "t", "delta", "beta", "ap")
PR_COLUMNS = ("metric", "bucket", "t", "delta", "beta", "threshold", "precision", "recall")


def fmt(x) -> str:
    """Stable text for CSV cells."""
    if x is None:
        return ""
    if isinstance(x, (tuple, list)):
        return "-".join(fmt(v) for v in x)
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.10g}"


def _key_cells(r: APResult) -> list[str]:
    k = r.key
    return [k.get("metric", ""), fmt(k.get("bucket")), fmt(k.get("t")), fmt(k.get("delta")), fmt(k.get("beta"))]


def ap_csv(results: Sequence[APResult]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(AP_COLUMNS)
    for r in results:
        wr.writerow(_key_cells(r) + [fmt(r.ap)])
    return buf.getvalue()


def pr_csv(results: Sequence[APResult]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(PR_COLUMNS)
    for r in results:
        cells = _key_cells(r)
        for p, rc, thr in r.pr_points:
            wr.writerow(cells + [fmt(thr), fmt(p), fmt(rc)])
    return buf.getvalue()

