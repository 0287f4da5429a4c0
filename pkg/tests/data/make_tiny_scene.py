"""Regenerate tiny_scene.jsonl (2 frames, 1 object, 2 detections)."""

from pathlib import Path

from egoeval.scene import SynthConfig, save_scene, synth_scene

cfg = SynthConfig(n_objects=1, n_frames=2, translation_noise=0.1, heading_noise=0.02, agg_points=16, point_spacing=0.5)
save_scene(synth_scene(cfg, seed=5), Path(__file__).with_name("tiny_scene.jsonl"))
