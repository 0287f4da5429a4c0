"""Egocentric evaluation of bird's-eye-view detections.

Support distance error (SDE, SDE@t), SDE based AP and APD, convex visible
contours, star-polygon contours fitted to point clouds, and a collision
study linking detection errors to collision outcomes.
"""

__version__ = "0.1.0"

from .geom import OrientedBox2, Polygon2, PointSet, RigidMotion2, convex_hull, box_iou_bev
from .scene import Detection, EgoPose, Scene, SynthConfig, TrackedObject, load_scene, save_scene, synth_scene
from .sde import sde, sde_at, support_distances
from .contour import cvc, crop_points, annotate_scene
from .starpoly import fit, fit_star, loss, loss_gradient
from .apeval import MatchConfig, WeightConfig, ap, apd, breakdown_report
from .collision import CollisionConfig, collision_study

__all__ = [
    "OrientedBox2", "Polygon2", "PointSet", "RigidMotion2", "convex_hull", "box_iou_bev",
    "Detection", "EgoPose", "Scene", "SynthConfig", "TrackedObject", "load_scene", "save_scene", "synth_scene",
    "sde", "sde_at", "support_distances",
    "cvc", "crop_points", "annotate_scene",
    "fit", "fit_star", "loss", "loss_gradient",
    "MatchConfig", "WeightConfig", "ap", "apd", "breakdown_report",
    "CollisionConfig", "collision_study",
]
