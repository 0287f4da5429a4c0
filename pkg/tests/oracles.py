"""Independent, deliberately naive reference implementations used by the tests."""

import math

import numpy as np


def dense_segment_distance(a, b, origin, direction, n=10_000):
    """Min point-to-line distance over ``n`` samples of segment ab."""
    t = np.linspace(0.0, 1.0, n)[:, None]
    pts = np.asarray(a) + t * (np.asarray(b) - np.asarray(a))
    rel = pts - np.asarray(origin)
    return float(np.abs(direction[0] * rel[:, 1] - direction[1] * rel[:, 0]).min())


def dense_polygon_samples(vertices, per_edge=2_000):
    v = np.asarray(vertices, dtype=float)
    w = np.roll(v, -1, axis=0)
    t = np.linspace(0.0, 1.0, per_edge, endpoint=False)[None, :, None]
    return (v[:, None, :] + t * (w - v)[:, None, :]).reshape(-1, 2)


def line_distance(points, origin, angle):
    d = np.array([math.cos(angle), math.sin(angle)])
    rel = np.asarray(points, dtype=float) - np.asarray(origin)
    return np.abs(d[0] * rel[:, 1] - d[1] * rel[:, 0])


def sampled_support(points, origin, heading):
    """(lat, lon) support distances of a dense boundary sample; crossing gives 0."""
    out = []
    for ang in (heading, heading + math.pi / 2):
        d = np.array([math.cos(ang), math.sin(ang)])
        rel = np.asarray(points) - np.asarray(origin)
        s = d[0] * rel[:, 1] - d[1] * rel[:, 0]
        out.append(0.0 if s.min() <= 0.0 <= s.max() else float(np.abs(s).min()))
    return tuple(out)


def box_corners(cx, cy, length, width, heading):
    c, s = math.cos(heading), math.sin(heading)
    local = np.array([[length / 2, width / 2], [-length / 2, width / 2], [-length / 2, -width / 2], [length / 2, -width / 2]])
    return local @ np.array([[c, s], [-s, c]]) + [cx, cy]


def inside_convex(points, corners):
    """Boolean mask of points inside a CCW convex polygon (boundary inclusive)."""
    v = np.asarray(corners)
    w = np.roll(v, -1, axis=0)
    e = w - v
    rel = np.asarray(points)[:, None, :] - v[None]
    side = e[None, :, 0] * rel[..., 1] - e[None, :, 1] * rel[..., 0]
    return np.all(side >= -1e-12, axis=1)


def brute_ap(scores, tp, n_gt, tp_w=None, fp_w=None, total=None):
    """AP by enumerating every distinct score threshold, recounting from scratch each time."""
    scores = np.asarray(scores, dtype=float)
    tp = np.asarray(tp, dtype=bool)
    tp_w = np.ones(len(scores)) if tp_w is None else np.asarray(tp_w, dtype=float)
    fp_w = np.ones(len(scores)) if fp_w is None else np.asarray(fp_w, dtype=float)
    total = float(n_gt) if total is None else total
    if total <= 0:
        return float("nan")
    prec, rec = [], []
    for thr in sorted(set(scores.tolist()), reverse=True):
        keep = scores >= thr
        t = float(tp_w[keep & tp].sum())
        f = float(fp_w[keep & ~tp].sum())
        prec.append(t / (t + f) if t + f > 0 else 0.0)
        rec.append(t / total)
    if not prec:
        return 0.0
    area = 0.0
    for i in range(len(prec)):
        env = max(prec[i:])
        env_prev = max(prec[i - 1:]) if i else env
        r_prev = rec[i - 1] if i else 0.0
        area += (rec[i] - r_prev) * (env + env_prev) / 2.0
    return area


def greedy_replay(scores, cost, ok):
    """Greedy assignment by descending score over an explicit candidate mask."""
    D, G = cost.shape
    taken = set()
    out = [-1] * D
    for i in sorted(range(D), key=lambda k: (-scores[k], k)):
        best, best_c = -1, math.inf
        for j in range(G):
            if j in taken or not ok[i][j]:
                continue
            if cost[i][j] < best_c:
                best, best_c = j, cost[i][j]
        if best >= 0:
            taken.add(best)
            out[i] = best
    return out


def _point_segments_distance(points, vertices):
    v = np.asarray(vertices, dtype=float)
    w = np.roll(v, -1, axis=0)
    p = np.asarray(points, dtype=float)[:, None, :]
    e = w - v
    t = np.clip(np.einsum("pkj,kj->pk", p - v, e) / np.einsum("kj,kj->k", e, e), 0.0, 1.0)
    proj = v + t[..., None] * e
    return np.hypot(*(p - proj).transpose(2, 0, 1)).min(axis=1)


def hausdorff(vertices_a, vertices_b, per_edge=50):
    """Symmetric Hausdorff distance between two polygon outlines, by edge sampling."""
    sa = dense_polygon_samples(vertices_a, per_edge)
    sb = dense_polygon_samples(vertices_b, per_edge)
    return float(max(_point_segments_distance(sa, vertices_b).max(), _point_segments_distance(sb, vertices_a).max()))


def linear_wedge(x, directions):
    """Wedge [d_l, d_r) containing x by scanning every adjacent direction pair."""
    n = len(directions)
    ang = math.atan2(x[1], x[0])
    for l in range(n):
        r = (l + 1) % n
        a_l = math.atan2(directions[l][1], directions[l][0])
        a_r = math.atan2(directions[r][1], directions[r][0])
        # clockwise sweep from d_l to d_r
        span = (a_l - a_r) % (2 * math.pi)
        off = (a_l - ang) % (2 * math.pi)
        if off < span:
            return l, r
    raise AssertionError("no wedge found")


def in_box(points, cx, cy, length, width, heading):
    """Mask of points inside an oriented rectangle, via its local frame."""
    c, s = math.cos(heading), math.sin(heading)
    dx = points[:, 0] - cx
    dy = points[:, 1] - cy
    return (np.abs(dx * c + dy * s) <= length / 2) & (np.abs(-dx * s + dy * c) <= width / 2)


def sampled_iou(a, b, unit_samples):
    """IoU of two (cx, cy, length, width, heading) boxes from samples of the unit square."""
    corners = np.r_[box_corners(*a), box_corners(*b)]
    lo, hi = corners.min(axis=0), corners.max(axis=0)
    p = lo + unit_samples * (hi - lo)
    ia, ib = in_box(p, *a), in_box(p, *b)
    return float((ia & ib).sum() / (ia | ib).sum())
