"""Do metric errors line up with collision mistakes?

Ground-truth collisions come from object points entering a scaled ego
footprint within the horizon. Predicted collisions use the detections moved
by the same motion. Pairs are grouped by whether the collision verdict was
right (TP) or wrong (FP/FN). A planning-aware metric should be clearly worse
in the wrong group.
"""

from egoeval import CollisionConfig, SynthConfig, collision_study, synth_scene

scene = synth_scene(
    SynthConfig(n_objects=50, n_frames=100, translation_noise=0.2, heading_noise=0.04, size_noise=0.1), seed=1
)
study = collision_study(scene, CollisionConfig(horizon=5.0))

print(f"{'group':<6} {'events':>7} {'mean IoU':>9} {'mean SDE':>9}")
for g in study.groups:
    print(f"{g.group:<6} {g.count:>7} {g.mean_iou:9.3f} {g.mean_sde:9.3f}")

print(f"\n{'t (s)':>6} {'CDA':>6} {'TP':>4} {'FP':>4} {'FN':>4}")
for row in study.per_t:
    print(f"{row.t:6.1f} {row.cda:6.3f} {row.tp:4d} {row.fp:4d} {row.fn:4d}")
