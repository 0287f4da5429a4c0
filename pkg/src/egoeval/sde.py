"""Support distances and support distance errors (SDE, SDE@t)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyInput, MissingFrame
from .geom import Boundary, Line2, PointSet, Polygon2, apply_motion
from .scene import TIME_TOL, EgoPose, TrackedObject

__all__ = [
    "Boundary",
    "SupportDistances",
    "SdeRecord",
    "SdeSummary",
    "support_distances",
    "line_support",
    "sde",
    "sde_at",
    "sde_stats",
    "offset_frame",
]


@dataclass(frozen=True)
class SupportDistances:
    lat: float
    lon: float


@dataclass(frozen=True)
class SdeRecord:
    sde_lat_signed: float
    sde_lon_signed: float
    sde: float
    t_offset: float = 0.0
    # both boundaries straddle both ego lines; SDE is zero by construction there
    flagged: bool = False

    @property
    def signed(self) -> float:
        """The dominant component, keeping its sign."""
        if abs(self.sde_lat_signed) >= abs(self.sde_lon_signed):
            return self.sde_lat_signed
        return self.sde_lon_signed


def line_support(b: Boundary, line: Line2) -> float:
    """Minimum distance from a boundary to an infinite line."""
    if isinstance(b, Polygon2):
        s = line.signed_distance(b.vertices)
        # the closed edge chain crosses the line iff vertex offsets change sign
        if s.min() <= 0.0 <= s.max():
            return 0.0
        return float(np.abs(s).min())
    if isinstance(b, PointSet):
        s = line.signed_distance(b.points)
        # samples on both sides: the boundary they describe crosses the line
        if s.min() <= 0.0 <= s.max():
            return 0.0
        return float(np.abs(s).min())
    raise TypeError(f"not a boundary: {type(b).__name__}")


def support_distances(b: Boundary, e: EgoPose) -> SupportDistances:
    return SupportDistances(line_support(b, e.lateral_line), line_support(b, e.longitudinal_line))


def _record(sd_pred: SupportDistances, sd_gt: SupportDistances, t: float) -> SdeRecord:
    lat = sd_gt.lat - sd_pred.lat
    lon = sd_gt.lon - sd_pred.lon
    flagged = sd_gt.lat == 0.0 and sd_gt.lon == 0.0 and sd_pred.lat == 0.0 and sd_pred.lon == 0.0
    return SdeRecord(lat, lon, max(abs(lat), abs(lon)), t, flagged)


def sde(pred: Boundary, gt: Boundary, e: EgoPose) -> SdeRecord:
    """Positive components mean the prediction protrudes towards the ego lines."""
    return _record(support_distances(pred, e), support_distances(gt, e), 0.0)


def offset_frame(ego: Sequence[EgoPose], t0: int, t: float) -> int:
    target = ego[t0].t + t
    for k in range(t0, len(ego)):
        if abs(ego[k].t - target) <= TIME_TOL:
            return k
        if ego[k].t > target + TIME_TOL:
            break
    raise MissingFrame(f"no ego pose {t:g}s after frame {t0}")


def sde_at(
    pred: Boundary,
    track: TrackedObject,
    ego: Sequence[EgoPose],
    t0: int,
    t: float,
    gt: Boundary | None = None,
) -> SdeRecord:
    """SDE of a frame-``t0`` prediction, carried ``t`` seconds ahead by the track's motion.

    ``gt`` defaults to the track's aggregated points at ``t0``.
    """
    if t0 not in track.boxes:
        raise MissingFrame(f"track {track.track_id} has no box at frame {t0}")
    t1 = offset_frame(ego, t0, t)
    if t1 not in track.boxes:
        raise MissingFrame(f"track {track.track_id} has no box at frame {t1}")
    m = track.motion(t0, t1)
    if gt is None:
        gt = track.gt_boundary(t0)
    rec = sde(apply_motion(m, pred), apply_motion(m, gt), ego[t1])
    return SdeRecord(rec.sde_lat_signed, rec.sde_lon_signed, rec.sde, float(t), rec.flagged)


@dataclass(frozen=True)
class SdeSummary:
    count: int
    mean_lat: float
    mean_lon: float
    mean_sde: float
    median_lat: float
    median_lon: float
    median_sde: float
    median_signed: float
    lat_share: float  # fraction with |lat| > |lon|
    lon_share: float  # fraction with |lon| > |lat|
    hist_counts: np.ndarray
    hist_edges: np.ndarray


def sde_stats(records: Sequence[SdeRecord], bins=None) -> SdeSummary:
    """Summary statistics plus a histogram of the signed dominant component."""
    if len(records) == 0:
        raise EmptyInput("no SDE records")
    lat = np.array([r.sde_lat_signed for r in records])
    lon = np.array([r.sde_lon_signed for r in records])
    val = np.array([r.sde for r in records])
    signed = np.array([r.signed for r in records])
    if bins is None:
        bins = np.linspace(-1.0, 1.0, 41)
    counts, edges = np.histogram(np.clip(signed, bins[0], bins[-1]), bins=bins)
    alat, alon = np.abs(lat), np.abs(lon)
    return SdeSummary(
        count=len(records),
        mean_lat=float(alat.mean()),
        mean_lon=float(alon.mean()),
        mean_sde=float(val.mean()),
        median_lat=float(np.median(alat)),
        median_lon=float(np.median(alon)),
        median_sde=float(np.median(val)),
        median_signed=float(np.median(signed)),
        lat_share=float(np.mean(alat > alon)),
        lon_share=float(np.mean(alon > alat)),
        hist_counts=counts,
        hist_edges=edges,
    )
