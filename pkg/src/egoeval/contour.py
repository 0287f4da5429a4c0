"""Convex visible contours: the hull of the current frame's points inside a padded box."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, InsufficientPoints, InvalidConfig
from .geom import OrientedBox2, Polygon2, as_points, convex_hull
from .scene import CROP_PADDING


@dataclass(frozen=True)
class CropConfig:
    padding: float = CROP_PADDING

    def __post_init__(self):
        if not self.padding >= 0:
            raise InvalidConfig("padding must be >= 0")


def crop_points(box: OrientedBox2, frame_points, cfg: CropConfig = CropConfig()) -> np.ndarray:
    """Points whose box-frame coordinates fall inside the box grown by ``cfg.padding`` per side."""
    pts = as_points(frame_points)
    if len(pts) == 0:
        return pts
    return pts[box.contains(pts, cfg.padding, tol=0.0)]


def cvc(box: OrientedBox2, frame_points, cfg: CropConfig = CropConfig()) -> Polygon2:
    cropped = crop_points(box, frame_points, cfg)
    if len(cropped) < 3:
        raise InsufficientPoints(f"{len(cropped)} points inside the padded box")
    try:
        return convex_hull(cropped)
    except DegenerateInput as exc:
        raise InsufficientPoints(str(exc)) from None


def cvc_or_box(box: OrientedBox2, frame_points, cfg: CropConfig = CropConfig()) -> tuple[Polygon2, bool]:
    """The CVC, or the box footprint when there are too few points. Second item: fell back."""
    try:
        return cvc(box, frame_points, cfg), False
    except InsufficientPoints:
        return box.polygon(), True


@dataclass
class FitStats:
    """Outcome of annotating a scene's detections with contours."""

    representation: str
    fitted: int = 0
    fallbacks: int = 0
    coverage: list = None  # final coverage loss per StarPoly fit
    total: list = None

    def __post_init__(self):
        self.coverage = [] if self.coverage is None else self.coverage
        self.total = [] if self.total is None else self.total

    @property
    def mean_coverage(self) -> float:
        return float(np.mean(self.coverage)) if self.coverage else float("nan")

    @property
    def mean_total(self) -> float:
        return float(np.mean(self.total)) if self.total else float("nan")


def _fit_one(job):
    rep, box, pts, cfg = job
    if rep == "cvc":
        poly, fell_back = cvc_or_box(box, pts, cfg)
        return poly.vertices, fell_back, None, None
    from .starpoly import fit_star

    res = fit_star(box, crop_points(box, pts, cfg))
    terms = res.terms
    return (
        res.polygon.vertices,
        res.fell_back,
        None if terms is None else terms.coverage,
        None if terms is None else terms.total,
    )


def annotate_scene(scene, representation: str = "starpoly", cfg: CropConfig = CropConfig(), jobs: int = 1):
    """Return ``(scene with detection contours, FitStats)``.

    Every detection gets a contour: the CVC or StarPoly fit of the current
    frame's points inside its padded box, or its box footprint when too few
    points are available. Results do not depend on ``jobs``.
    """
    from dataclasses import replace

    if representation not in ("cvc", "starpoly"):
        raise InvalidConfig(f"unknown representation {representation!r}")
    frame_pts = {}
    work = []
    for d in scene.detections:
        if d.frame not in frame_pts:
            frame_pts[d.frame] = scene.frame_points(d.frame)
        pts = frame_pts[d.frame]
        # crop in the parent so workers receive only the relevant points
        near = pts[d.box.contains(pts, cfg.padding, tol=0.0)] if len(pts) else pts
        work.append((representation, d.box, near, cfg))
    if jobs > 1 and len(work) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_fit_one, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        results = [_fit_one(w) for w in work]
    stats = FitStats(representation)
    dets = []
    for d, (verts, fell_back, cov, tot) in zip(scene.detections, results):
        if fell_back:
            stats.fallbacks += 1
        else:
            stats.fitted += 1
            if cov is not None:
                stats.coverage.append(cov)
                stats.total.append(tot)
        dets.append(replace(d, contour=Polygon2(verts)))
    return scene.with_detections(dets), stats
