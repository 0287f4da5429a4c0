import csv
import hashlib
import io
import json
import subprocess
import sys

import pytest

from egoeval.cli import main


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def rows(path):
    return list(csv.DictReader(io.StringIO(path.read_text(encoding="utf-8"))))


def synth(tmp_path, name="scene.jsonl", *extra):
    out = tmp_path / name
    assert main(["--jobs", "1", "synth", "--objects", "6", "--frames", "40", "--seed", "7", *extra, "-o", str(out)]) == 0
    return out


@pytest.fixture
def clean(tmp_path):
    return synth(tmp_path / "clean")


@pytest.fixture
def noisy(tmp_path):
    return synth(tmp_path / "noisy", "scene.jsonl", "--noise", "0.15", "--false-positives", "0.3")


def test_synth_is_deterministic(tmp_path):
    a = synth(tmp_path / "a")
    b = synth(tmp_path / "b")
    assert sha(a) == sha(b)
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["seed"] == 7 and manifest["outputs"]["scene.jsonl"] == sha(a)


@pytest.mark.parametrize(
    "argv",
    [
        ["synth", "--objects", "0", "-o", "x.jsonl"],
        ["synth", "--noise", "-1", "-o", "x.jsonl"],
        ["synth"],
        ["fit", "missing.jsonl", "-o", "x.jsonl"],
        ["eval", "missing.jsonl"],
        ["collide", "missing.jsonl"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_2(tmp_path, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == 2


def test_json_errors(tmp_path, capsys):
    assert main(["--json-errors", "fit", str(tmp_path / "missing.jsonl"), "-o", str(tmp_path / "o.jsonl")]) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1
    rec = json.loads(err[0])
    assert rec["exit_code"] == 2 and "missing.jsonl" in rec["message"]


def test_malformed_scene_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"kind": "ego", "t": 0}\n')
    assert main(["--json-errors", "eval", str(bad), "-o", str(tmp_path)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ParseError"


def test_eval_zero_noise_all_metrics(clean, tmp_path):
    out = tmp_path / "ev"
    assert main(["--jobs", "1", "eval", str(clean), "--metric", "sde-ap,sde-apd,iou-ap,iou-apd", "-o", str(out)]) == 0
    got = rows(out / "ap.csv")
    assert len(got) == 4
    assert all(abs(float(r["ap"]) - 1.0) < 1e-12 for r in got)
    assert rows(out / "pr.csv")


def test_eval_apd_beta_zero_equals_ap(noisy, tmp_path):
    assert main(["eval", str(noisy), "--metric", "sde-ap", "-o", str(tmp_path / "a")]) == 0
    assert main(["eval", str(noisy), "--metric", "sde-apd", "--beta", "0", "-o", str(tmp_path / "b")]) == 0
    a = rows(tmp_path / "a" / "ap.csv")
    b = rows(tmp_path / "b" / "ap.csv")
    assert float(a[0]["ap"]) == pytest.approx(float(b[0]["ap"]), abs=1e-12)


def test_eval_delta_sweep_monotone(noisy, tmp_path):
    assert main(["eval", str(noisy), "--delta", "0.1,0.2,0.3", "--buckets", "default", "-o", str(tmp_path)]) == 0
    got = rows(tmp_path / "ap.csv")
    assert len(got) == 3 * 5  # the all-range row plus four buckets
    for bucket in {r["bucket"] for r in got}:
        vals = [float(r["ap"]) for r in got if r["bucket"] == bucket and r["ap"] != "nan"]
        assert vals == sorted(vals)


def test_eval_bad_flags(clean, tmp_path):
    assert main(["eval", str(clean), "--delta", "0", "-o", str(tmp_path)]) == 2
    assert main(["eval", str(clean), "--metric", "map", "-o", str(tmp_path)]) == 2
    assert main(["eval", str(clean), "--t", "500", "-o", str(tmp_path)]) == 2


def test_fit_starpoly_zero_noise_coverage(clean, tmp_path, capsys):
    out = tmp_path / "fit" / "fitted.jsonl"
    assert main(["--jobs", "1", "fit", str(clean), "--rep", "starpoly", "-o", str(out)]) == 0
    text = capsys.readouterr().out
    cov = float(text.split("mean coverage loss ")[1].split()[0])
    assert cov < 1e-6
    recs = [json.loads(l) for l in out.read_text().splitlines()]
    dets = [r for r in recs if r["kind"] == "detection"]
    assert dets and all("contour" in r for r in dets)


def test_fit_cvc_contours_everywhere(clean, tmp_path):
    out = tmp_path / "cvc.jsonl"
    assert main(["--jobs", "1", "fit", str(clean), "--rep", "cvc", "-o", str(out)]) == 0
    dets = [json.loads(l) for l in out.read_text().splitlines() if '"detection"' in l]
    assert all(len(d["contour"]) >= 3 for d in dets)


def test_collide_rows_and_rerun(tmp_path):
    scene = tmp_path / "s.jsonl"
    assert main(["synth", "--objects", "12", "--frames", "120", "--seed", "3", "-o", str(scene)]) == 0
    for d in ("a", "b"):
        assert main(["--jobs", "1", "collide", str(scene), "--horizon", "10", "--step", "1", "-o", str(tmp_path / d)]) == 0
    per_t = tmp_path / "a" / "collision_per_t.csv"
    assert len(rows(per_t)) == 11
    groups = rows(tmp_path / "a" / "collision_groups.csv")
    assert [g["group"] for g in groups] == ["TP", "FP/FN"]
    # perfect detections: nothing to put in the error group
    assert groups[1]["status"] == "empty"
    for name in ("collision_per_t.csv", "collision_groups.csv"):
        assert sha(tmp_path / "a" / name) == sha(tmp_path / "b" / name)


def test_collide_bad_horizon(clean, tmp_path):
    assert main(["collide", str(clean), "--horizon", "0", "-o", str(tmp_path)]) == 2
    assert main(["collide", str(clean), "--step", "-1", "-o", str(tmp_path)]) == 2


def test_console_entry_point(tmp_path):
    out = tmp_path / "s.jsonl"
    res = subprocess.run(
        [sys.executable, "-m", "egoeval.cli", "synth", "--objects", "2", "--frames", "5", "-o", str(out)],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and out.exists()
    res = subprocess.run([sys.executable, "-m", "egoeval.cli", "--version"], capture_output=True, text=True)
    assert res.stdout.startswith("egoeval ")
