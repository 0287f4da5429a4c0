"""``egoeval`` command line: synth, fit, eval, collide.

Exit codes: 0 success, 2 bad usage, configuration or input, 1 anything else.
With ``--json-errors`` failures are reported on stderr as one JSON line.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

from . import __version__
from .apeval import ALL_RANGE, DEFAULT_BUCKETS, METRICS, ap_csv, breakdown_report, fmt, pr_csv
from .collision import CollisionConfig, collision_study, groups_csv, per_t_csv
from .contour import annotate_scene
from .errors import EgoEvalError, InvalidConfig, ParseError
from .scene import SynthConfig, load_scene, save_scene, synth_scene

MANIFEST = "manifest.json"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def default_jobs() -> int:
    env = os.environ.get("EGOEVAL_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"EGOEVAL_JOBS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return vals


def _metrics(text: str) -> list[str]:
    vals = [x.strip() for x in text.split(",") if x.strip()]
    bad = [v for v in vals if v not in METRICS]
    if bad or not vals:
        raise argparse.ArgumentTypeError(f"unknown metric {','.join(bad) or text!r}; choose from {', '.join(METRICS)}")
    return vals


def _buckets(text: str):
    """``all``, ``default`` or ranges such as ``0-5,5-10,20-inf``."""
    if text == "all":
        return [ALL_RANGE]
    if text == "default":
        return [ALL_RANGE, *DEFAULT_BUCKETS]
    out = []
    for part in text.split(","):
        try:
            lo, hi = part.split("-")
            lo, hi = float(lo), float(hi)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad bucket {part!r}; use lo-hi") from None
        if not lo < hi:
            raise argparse.ArgumentTypeError(f"bad bucket {part!r}; need lo < hi")
        out.append((lo, hi))
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="egoeval", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"egoeval {__version__}")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: $EGOEVAL_JOBS or all cores)")
    p.add_argument("--json-errors", action="store_true", help="report failures as single-line JSON on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="write a synthetic scene")
    s.add_argument("--objects", type=int, default=20)
    s.add_argument("--frames", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise", type=float, default=0.0, help="detection box noise; translation sigma in meters")
    s.add_argument("--false-positives", type=float, default=0.0, help="mean false positives per frame")
    s.add_argument("--point-noise", type=float, default=0.0)
    s.add_argument("-o", "--output", required=True)

    f = sub.add_parser("fit", help="attach CVC or StarPoly contours to every detection")
    f.add_argument("scene")
    f.add_argument("--rep", choices=("starpoly", "cvc"), default="starpoly")
    f.add_argument("-o", "--output", required=True)

    e = sub.add_parser("eval", help="AP tables and PR curves")
    e.add_argument("scene")
    e.add_argument("--metric", type=_metrics, default=["sde-ap"], help=f"comma list of {', '.join(METRICS)}")
    e.add_argument("--delta", type=_floats, default=[0.2], help="SDE thresholds in meters")
    e.add_argument("--beta", type=_floats, default=[3.0], help="APD distance exponents")
    e.add_argument("--t", type=_floats, default=[0.0], help="time offsets in seconds")
    e.add_argument("--buckets", type=_buckets, default=[ALL_RANGE], help="all | default | lo-hi,...")
    e.add_argument("--rep", choices=("box", "contour"), default="box")
    e.add_argument("--iou", type=float, default=0.7, help="IoU threshold for iou metrics")
    e.add_argument("-o", "--out-dir", default=".")

    c = sub.add_parser("collide", help="collision study CSVs")
    c.add_argument("scene")
    c.add_argument("--horizon", type=float, default=10.0)
    c.add_argument("--step", type=float, default=1.0)
    c.add_argument("--ego-length", type=float, default=4.8)
    c.add_argument("--ego-width", type=float, default=2.0)
    c.add_argument("--ego-scale", type=float, default=1.8)
    c.add_argument("--rep", choices=("box", "cvc", "starpoly"), default="box")
    c.add_argument("-o", "--out-dir", default=".")
    return p


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_manifest(out_dir: Path, args, inputs, outputs, started: float, seed=None) -> None:
    config = {k: v for k, v in vars(args).items() if k not in ("json_errors",)}
    manifest = {
        "command": args.command,
        "config": json.loads(json.dumps(config, default=str)),
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {str(Path(p).name): _sha256(p) for p in outputs},
        "seed": seed,
        "version": __version__,
        "wall_time_s": round(time.time() - started, 3),
    }
    _write(out_dir / MANIFEST, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load(path):
    if not Path(path).is_file():
        raise UsageError(f"no such scene file: {path}")
    return load_scene(path)


def cmd_synth(args, started):
    if args.objects <= 0 or args.frames <= 0:
        raise UsageError("--objects and --frames must be positive")
    if args.noise < 0 or args.false_positives < 0 or args.point_noise < 0:
        raise UsageError("noise levels must be >= 0")
    cfg = SynthConfig(
        n_objects=args.objects,
        n_frames=args.frames,
        translation_noise=args.noise,
        heading_noise=args.noise * 0.2,
        size_noise=args.noise * 0.5,
        false_positives=args.false_positives,
        point_noise=args.point_noise,
    )
    scene = synth_scene(cfg, seed=args.seed)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_scene(scene, out)
    write_manifest(out.parent, args, [], [out], started, args.seed)
    print(f"wrote {out}: {len(scene.objects)} objects, {scene.num_frames} frames, {len(scene.detections)} detections")


def cmd_fit(args, started):
    scene = _load(args.scene)
    fitted, stats = annotate_scene(scene, args.rep, jobs=args.jobs)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_scene(fitted, out)
    write_manifest(out.parent, args, [args.scene], [out], started)
    print(f"{args.rep}: {stats.fitted} fitted, {stats.fallbacks} box fallbacks")
    if args.rep == "starpoly":
        print(f"mean final loss {fmt(stats.mean_total)}, mean coverage loss {fmt(stats.mean_coverage)}")


def cmd_eval(args, started):
    scene = _load(args.scene)
    if any(d <= 0 for d in args.delta):
        raise UsageError("--delta values must be > 0")
    if any(b < 0 for b in args.beta):
        raise UsageError("--beta values must be >= 0")
    if not 0 < args.iou <= 1:
        raise UsageError("--iou must be in (0, 1]")
    results = breakdown_report(
        scene,
        args.metric,
        args.buckets,
        args.t,
        args.delta,
        args.beta,
        use_contour=args.rep == "contour",
        iou_threshold=args.iou,
    )
    out_dir = Path(args.out_dir)
    ap_path, pr_path = out_dir / "ap.csv", out_dir / "pr.csv"
    _write(ap_path, ap_csv(results))
    _write(pr_path, pr_csv(results))
    write_manifest(out_dir, args, [args.scene], [ap_path, pr_path], started)
    print(f"{'metric':8} {'bucket':>10} {'t':>5} {'delta':>6} {'beta':>5} {'ap':>8}")
    for r in results:
        k = r.key
        print(
            f"{k['metric']:8} {fmt(k['bucket']):>10} {fmt(k['t']):>5} {fmt(k.get('delta')):>6} "
            f"{fmt(k.get('beta')):>5} {fmt(r.ap) if r.defined else 'undefined':>8}"
        )
    skipped = results[0].skipped_gt if results else 0
    if skipped:
        print(f"{skipped} objects without aggregated points were skipped")


def cmd_collide(args, started):
    scene = _load(args.scene)
    try:
        cfg = CollisionConfig(args.ego_scale, args.horizon, args.step)
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from None
    if args.ego_length <= 0 or args.ego_width <= 0:
        raise UsageError("ego dimensions must be > 0")
    if args.rep != "box" and any(d.contour is None for d in scene.detections):
        scene, _ = annotate_scene(scene, args.rep, jobs=args.jobs)
    study = collision_study(scene, cfg, args.rep, (args.ego_length, args.ego_width))
    out_dir = Path(args.out_dir)
    g_path, t_path = out_dir / "collision_groups.csv", out_dir / "collision_per_t.csv"
    _write(g_path, groups_csv(study))
    _write(t_path, per_t_csv(study))
    write_manifest(out_dir, args, [args.scene], [g_path, t_path], started)
    for g in study.groups:
        status = "empty" if g.empty else f"mean IoU {fmt(g.mean_iou)}, mean SDE {fmt(g.mean_sde)}"
        print(f"{g.group:6} {g.count:5d} events  {status}")
    if study.unmatched_detections:
        print(f"{study.unmatched_detections} detections had no object nearby and were skipped")


COMMANDS = {"synth": cmd_synth, "fit": cmd_fit, "eval": cmd_eval, "collide": cmd_collide}


def _fail(json_errors: bool, code: int, kind: str, message: str) -> int:
    if json_errors:
        print(json.dumps({"error": kind, "message": message, "exit_code": code}), file=sys.stderr)
    else:
        print(f"egoeval: {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    json_errors = "--json-errors" in argv
    started = time.time()
    try:
        args = build_parser().parse_args(argv)
        if args.jobs is None:
            args.jobs = default_jobs()
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        COMMANDS[args.command](args, started)
    except UsageError as exc:
        return _fail(json_errors, 2, "usage", str(exc))
    except (EgoEvalError, ValueError, OSError, ParseError) as exc:
        return _fail(json_errors, 2, type(exc).__name__, str(exc))
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        return _fail(json_errors, 1, type(exc).__name__, str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
