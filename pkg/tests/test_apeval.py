import math

import numpy as np
import pytest

from egoeval.apeval import (
    ALL_RANGE,
    APResult,
    MatchConfig,
    WeightConfig,
    ap,
    ap_csv,
    apd,
    average_precision,
    breakdown_report,
    distance_weight,
    greedy_match,
    manhattan_to_ego,
    match,
    metric_config,
    pair_table,
    pr_csv,
    pr_curve,
    scene_tables,
)
from egoeval.errors import EmptyInput, InvalidConfig, MissingFrame, ZeroDistanceWarning
from egoeval.geom import OrientedBox2
from egoeval.scene import Detection, EgoPose, Scene, SynthConfig, TrackedObject, synth_scene

from oracles import brute_ap, greedy_replay

SDE = MatchConfig("sde")
IOU = MatchConfig("iou")
NOISY = SynthConfig(n_objects=20, n_frames=40, translation_noise=0.15, heading_noise=0.03, size_noise=0.08, false_positives=0.3)


def one_frame_scene(gt_boxes, dets, ego=(0.0, 0.0, 0.0)):
    """A one-frame scene; ``dets`` are (box, score) pairs."""
    objs = [
        TrackedObject(f"o{k}", boxes={0: b}, aggregated_points=np.r_[b.perimeter_samples(128), b.corners()])
        for k, b in enumerate(gt_boxes)
    ]
    return Scene([EgoPose(0.0, *ego)], objs, [Detection(0, b, s) for b, s in dets])


def labels(scene, cfg, t=0.0):
    tables, _ = scene_tables(scene, t)
    scores, tps = [], []
    for tab in tables:
        _, _, tp = greedy_match(tab, cfg)
        scores.append(tab.scores)
        tps.append(tp)
    return np.concatenate(scores), np.concatenate(tps), sum(len(t.track_ids) for t in tables), tables


# matching


def test_match_examples():
    gt = OrientedBox2(10, 4, 4, 2, 0.1)
    scene = one_frame_scene([gt], [(gt, 0.9), (OrientedBox2(10.05, 4, 4, 2, 0.1), 0.5)])
    recs = match(scene.detections, scene.objects, SDE, scene, 0)
    assert recs[0].tp and recs[0].quality == pytest.approx(0.0, abs=1e-12) and recs[0].track_id == "o0"
    assert recs[1].track_id is None and not recs[1].tp
    scene = one_frame_scene([gt], [(gt, 0.3), (OrientedBox2(10.05, 4, 4, 2, 0.1), 0.5)])
    recs = match(scene.detections, scene.objects, SDE, scene, 0)
    assert recs[1].tp and recs[0].track_id is None


def test_greedy_matches_replay_oracle(rng):
    for _ in range(50):
        gts = [OrientedBox2(*rng.uniform(3, 12, 2), 4, 2, rng.uniform(-3, 3)) for _ in range(4)]
        dets = []
        for _ in range(5):
            g = gts[rng.integers(4)]
            dets.append((OrientedBox2(g.cx + rng.normal(0, 0.3), g.cy + rng.normal(0, 0.3), 4, 2, g.heading), rng.random()))
        scene = one_frame_scene(gts, dets)
        tab = pair_table(scene, 0)
        for cfg in (SDE, MatchConfig("sde", gate=False), IOU):
            assign, _, _ = greedy_match(tab, cfg)
            if cfg.criterion == "sde":
                cost = tab.sde
                ok = cost < cfg.sde_threshold if cfg.gate else np.ones_like(cost, bool)
            else:
                cost = tab.center_dist
                ok = cost <= cfg.match_radius
            assert list(assign) == greedy_replay(tab.scores, cost, ok)


def test_duplicate_adds_exactly_one_fp():
    scene = synth_scene(NOISY, seed=4)
    s0, tp0, _, _ = labels(scene, SDE)
    matched = next(d for d, t in zip(sorted(scene.detections, key=lambda d: d.frame), tp0) if t)
    dup = scene.with_detections(list(scene.detections) + [matched])
    s1, tp1, _, _ = labels(dup, SDE)
    assert tp1.sum() == tp0.sum()
    assert (~tp1).sum() == (~tp0).sum() + 1
    fp_scores_new = sorted(s1[~tp1].tolist())
    fp_scores_old = sorted(s0[~tp0].tolist())
    for s in fp_scores_old:
        fp_scores_new.remove(s)
    assert fp_scores_new == [matched.score]


# AP


def test_ap_examples():
    scene = synth_scene(SynthConfig(n_objects=6, n_frames=20), seed=1)
    for metric in ("sde-ap", "iou-ap"):
        assert ap(scene, metric_config(metric)).ap == 1.0
    empty = scene.with_detections([])
    assert ap(empty, SDE).ap == 0.0


def test_zero_noise_all_metrics_one():
    scene = synth_scene(SynthConfig(n_objects=8, n_frames=40), seed=2)
    for t in (0.0, 1.0, 2.0):
        for cfg in (SDE, IOU):
            assert ap(scene, cfg, t=t).ap == pytest.approx(1.0, abs=1e-12)
            assert apd(scene, cfg, t=t).ap == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_ap_matches_exhaustive_thresholds(seed):
    scene = synth_scene(NOISY, seed=seed)
    for cfg in (SDE, IOU):
        scores, tp, n_gt, _ = labels(scene, cfg)
        got = ap(scene, cfg).ap
        assert got == pytest.approx(brute_ap(scores, tp, n_gt), abs=1e-12)
        assert 0.0 < got < 1.0


def test_apd_matches_exhaustive_thresholds():
    scene = synth_scene(NOISY, seed=5)
    tables, _ = scene_tables(scene)
    scores, tpw, fpw, tps, total = [], [], [], [], 0.0
    for tab in tables:
        assign, _, tp = greedy_match(tab, SDE)
        ego = scene.ego[tab.frame]
        gt_c = np.array([next(o for o in scene.objects if o.track_id == tid).boxes[tab.frame].center for tid in tab.track_ids])
        det_c = np.array([scene.detections[i].box.center for i in tab.det_index])
        for k in range(len(tp)):
            scores.append(tab.scores[k])
            tps.append(tp[k])
            d_gt = abs_manhattan(ego, gt_c[assign[k]]) if assign[k] >= 0 else 1.0
            tpw.append(max(d_gt, 0.5) ** -3)
            fpw.append(max(abs_manhattan(ego, det_c[k]), 0.5) ** -3)
        total += sum(max(abs_manhattan(ego, c), 0.5) ** -3 for c in gt_c)
    ref = brute_ap(scores, tps, None, tpw, fpw, total)
    assert apd(scene, SDE, WeightConfig(3.0)).ap == pytest.approx(ref, abs=1e-12)


def abs_manhattan(ego, p):
    c, s = math.cos(ego.heading), math.sin(ego.heading)
    dx, dy = p[0] - ego.x, p[1] - ego.y
    return abs(dx * c + dy * s) + abs(-dx * s + dy * c)


@pytest.mark.parametrize("seed", [1, 7])
def test_apd_with_zero_beta_is_ap(seed):
    scene = synth_scene(NOISY, seed=seed)
    for cfg in (SDE, IOU):
        for t in (0.0, 1.0):
            assert apd(scene, cfg, WeightConfig(0.0), t=t).ap == pytest.approx(ap(scene, cfg, t=t).ap, abs=1e-12)


def test_ap_non_decreasing_in_delta():
    scene = synth_scene(NOISY, seed=8)
    values = [ap(scene, MatchConfig("sde", sde_threshold=d)).ap for d in (0.05, 0.1, 0.2, 0.4, 0.8, 1.6)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    assert values[0] < values[-1]


def test_pr_validity():
    scene = synth_scene(NOISY, seed=9)
    for res in (ap(scene, SDE), apd(scene, SDE), ap(scene, IOU, t=1.0)):
        p = np.array([x[0] for x in res.pr_points])
        r = np.array([x[1] for x in res.pr_points])
        thr = np.array([x[2] for x in res.pr_points])
        assert np.all((p >= 0) & (p <= 1) & (r >= 0) & (r <= 1))
        assert np.all(np.diff(r) >= 0) and np.all(np.diff(thr) < 0)
        assert 0 <= res.ap <= 1


def test_average_precision_by_hand():
    assert average_precision([1.0, 1.0], [0.5, 1.0]) == 1.0
    # the envelope lifts the dip at recall 1/3
    assert average_precision([1.0, 0.5, 2 / 3], [1 / 3, 1 / 3, 2 / 3]) == pytest.approx(1 / 3 + (1 / 3) * (2 / 3))
    p, r, thr = pr_curve([0.9, 0.9, 0.5], [True, False, True], np.ones(3), np.ones(3), 2.0)
    np.testing.assert_allclose(p, [0.5, 2 / 3])
    np.testing.assert_allclose(r, [0.5, 1.0])
    np.testing.assert_allclose(thr, [0.9, 0.5])


# distance weighting


def test_weight_examples():
    assert distance_weight(2.0, 3.0) == 0.125
    assert distance_weight(0.2, 3.0) == 8.0
    with pytest.warns(ZeroDistanceWarning):
        distance_weight([0.0], 3.0)
    assert manhattan_to_ego(EgoPose(0, 1, 1, math.pi / 2), [[1.0, 4.0]])[0] == pytest.approx(3.0)


def test_single_tp_at_distance_two_has_weight_one_eighth():
    hit = OrientedBox2(1.2, 0.8, 0.8, 0.4, 0.0)  # Manhattan distance 2
    miss = OrientedBox2(2.5, -1.5, 0.8, 0.4, 0.0)  # Manhattan distance 4
    scene = one_frame_scene([hit, miss], [(hit, 0.9)])
    res = apd(scene, SDE, WeightConfig(3.0))
    idtp, idg = 0.125, 0.125 + 4.0**-3
    assert res.pr_points == [(1.0, pytest.approx(idtp / idg), 0.9)]


def _near_far(error_on_near):
    near = OrientedBox2(4.0, 1.0, 4.0, 1.0, 0.0)  # Manhattan 5
    far = OrientedBox2(18.0, 2.0, 4.0, 1.0, 0.0)  # Manhattan 20
    # growing the width symmetrically moves the ego-facing edge 0.3 m closer
    bad, good = (near, far) if error_on_near else (far, near)
    grown = OrientedBox2(bad.cx, bad.cy, bad.length, bad.width + 0.6, bad.heading)
    return one_frame_scene([near, far], [(grown, 0.9), (good, 0.8)])


def test_error_on_near_object_costs_more_apd():
    wn, wf = 5.0**-3, 20.0**-3
    a = apd(_near_far(True), SDE).ap
    b = apd(_near_far(False), SDE).ap
    assert a == pytest.approx((wf / (wn + wf)) ** 2, abs=1e-12)
    assert b == pytest.approx((wn / (wn + wf)) ** 2, abs=1e-12)
    assert a < b
    # unweighted AP cannot tell the two apart
    assert ap(_near_far(True), SDE).ap == ap(_near_far(False), SDE).ap


def test_ego_translation_changes_sde_ap_not_iou_ap():
    gt = OrientedBox2(8.0, 1.0, 4.0, 1.0, 0.0)
    grown = OrientedBox2(8.0, 1.0, 4.0, 1.6, 0.0)
    here = one_frame_scene([gt], [(grown, 0.9)])
    shifted = one_frame_scene([gt], [(grown, 0.9)], ego=(0.0, 1.0, 0.0))
    assert ap(here, IOU).ap == ap(shifted, IOU).ap
    # the lateral line passes through both shapes once the ego is level with them
    assert ap(here, SDE).ap == 0.0
    assert ap(shifted, SDE).ap == 1.0


# breakdowns


def test_single_bucket_equals_unbucketed():
    scene = synth_scene(NOISY, seed=3)
    rows = breakdown_report(scene, ["sde-ap", "sde-apd", "iou-ap", "iou-apd"])
    assert rows[0].ap == ap(scene, SDE).ap
    assert rows[1].ap == apd(scene, SDE).ap
    assert rows[2].ap == ap(scene, IOU).ap
    assert rows[3].ap == apd(scene, IOU).ap


def test_empty_bucket_undefined():
    scene = synth_scene(SynthConfig(n_objects=4, n_frames=10), seed=3)
    res = ap(scene, SDE, bucket=(1000.0, 2000.0))
    assert not res.defined and math.isnan(res.ap)


def test_far_noise_lowers_far_bucket(rng):
    near = [OrientedBox2(rng.uniform(2, 7), y, 4.0, 1.8, 0.0) for y in (-6.0, -3.0, 3.0, 6.0)]
    far = [OrientedBox2(rng.uniform(25, 35), y, 4.0, 1.8, 0.0) for y in (-6.0, -3.0, 3.0, 6.0)]
    dets = [(b, 0.5 + 0.1 * rng.random()) for b in near]
    dets += [(OrientedBox2(b.cx - 0.2, b.cy + rng.choice([-0.3, 0.3]), 4.0, 1.8, 0.0), 0.5 + 0.1 * rng.random()) for b in far]
    scene = one_frame_scene(near + far, dets)
    near_ap = ap(scene, SDE, bucket=(0.0, 10.0)).ap
    far_ap = ap(scene, SDE, bucket=(20.0, 40.0)).ap
    assert near_ap > far_ap


def test_grid_shape_and_errors():
    scene = synth_scene(SynthConfig(n_objects=4, n_frames=30), seed=3)
    rows = breakdown_report(
        scene, ["sde-ap", "iou-apd"], [(0, 10), (10, 40)], [0.0, 1.0], deltas=[0.1, 0.2], betas=[0.0, 3.0]
    )
    # sde-ap: 2 deltas, iou-apd: 2 betas; times 2 buckets and 2 offsets
    assert len(rows) == (2 + 2) * 2 * 2
    with pytest.raises(EmptyInput):
        breakdown_report(scene, [])
    with pytest.raises(InvalidConfig):
        breakdown_report(scene, ["map"])
    with pytest.raises(MissingFrame):
        ap(scene, SDE, t=100.0)
    with pytest.raises(MissingFrame):
        ap(scene, SDE, t=0.15)


def test_config_validation():
    with pytest.raises(InvalidConfig):
        MatchConfig("giou")
    with pytest.raises(InvalidConfig):
        MatchConfig(sde_threshold=0.0)
    with pytest.raises(InvalidConfig):
        MatchConfig(iou_threshold=1.5)
    with pytest.raises(InvalidConfig):
        WeightConfig(-1.0)


# CSV


def test_csv_golden():
    rows = [
        APResult(0.875, [(1.0, 0.5, 0.9), (0.75, 1.0, 0.4)], {"metric": "sde-ap", "bucket": ALL_RANGE, "t": 0.0, "delta": 0.2, "beta": None}),
        APResult(float("nan"), [], {"metric": "iou-apd", "bucket": (5.0, 10.0), "t": 2.0, "delta": None, "beta": 3.0}, defined=False),
    ]
    assert ap_csv(rows) == (
        "metric,bucket,t,delta,beta,ap\n"
        "sde-ap,0-inf,0,0.2,,0.875\n"
        "iou-apd,5-10,2,,3,nan\n"
    )
    assert pr_csv(rows) == (
        "metric,bucket,t,delta,beta,threshold,precision,recall\n"
        "sde-ap,0-inf,0,0.2,,0.9,1,0.5\n"
        "sde-ap,0-inf,0,0.2,,0.4,0.75,1\n"
    )
