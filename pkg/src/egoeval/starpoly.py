"""Star-shaped amodal contours fitted to a detection's point cloud.

A star polygon is a center ``h`` plus ``n`` fixed unit directions ``d_i`` in
clockwise order; vertex ``i`` sits at ``h + c_i d_i``, so the shape is fully
described by the radii ``c``. Fitting minimises

    coverage + accuracy_weight * accuracy + tightness_weight * tightness

in the canonical frame of the detection box (box center at the origin, box
heading along +x, longest box side scaled to 1):

* coverage: mean over cloud points ``x`` of ``max(alpha + beta - 1, 0)``,
  where ``x = alpha v_l + beta v_r`` in the wedge ``(d_l, d_r)`` containing
  ``x``. Zero iff every point lies inside the polygon.
* accuracy: mean over visible-boundary points of ``|alpha + beta - 1|``.
* tightness: mean ``|c_i|``.

Radii are kept above ``r_min`` by projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateAtCenter, InvalidConfig
from .geom import OrientedBox2, Polygon2, as_points, cross2

CENTER_TOL = 1e-12
COVER_TOL = 1e-12  # excess treated as covered, so rounding cannot flip a point outside


def square_directions(n: int = 256) -> np.ndarray:
    """Unit directions whose tips are evenly spaced on a square, clockwise from +x."""
    if n < 8:
        raise InvalidConfig("need at least 8 directions")
    u = np.arange(n) * (8.0 / n)
    tips = np.empty((n, 2))
    for k, s in enumerate(u):
        if s < 1:
            tips[k] = (1.0, -s)
        elif s < 3:
            tips[k] = (1.0 - (s - 1.0), -1.0)
        elif s < 5:
            tips[k] = (-1.0, -1.0 + (s - 3.0))
        elif s < 7:
            tips[k] = (-1.0 + (s - 5.0), 1.0)
        else:
            tips[k] = (1.0, 1.0 - (s - 7.0))
    return tips / np.hypot(tips[:, 0], tips[:, 1])[:, None]


def _clockwise_angle(v, ref_angle: float) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return np.mod(ref_angle - np.arctan2(v[..., 1], v[..., 0]), 2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class StarPolygon:
    directions: np.ndarray
    radii: np.ndarray
    center: np.ndarray = field(default_factory=lambda: np.zeros(2))
    r_min: float = 1e-3

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float).reshape(-1, 2)
        c = np.asarray(self.radii, dtype=float).reshape(-1)
        if len(d) < 8:
            raise InvalidConfig("need at least 8 directions")
        if len(c) != len(d):
            raise InvalidConfig("one radius per direction")
        if np.any(np.abs(np.hypot(d[:, 0], d[:, 1]) - 1.0) > 1e-9):
            raise InvalidConfig("directions must be unit vectors")
        phi = _clockwise_angle(d, math.atan2(d[0, 1], d[0, 0]))
        if np.any(np.diff(phi) <= 0):
            raise InvalidConfig("directions must be in strictly clockwise order")
        if np.any(c < self.r_min - 1e-15):
            raise InvalidConfig(f"radii must be >= r_min ({self.r_min})")
        object.__setattr__(self, "directions", d)
        object.__setattr__(self, "radii", c)
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(2))
        object.__setattr__(self, "_phi", phi)

    @property
    def n(self) -> int:
        return len(self.radii)

    def vertices(self) -> np.ndarray:
        return self.center + self.radii[:, None] * self.directions

    def polygon(self) -> Polygon2:
        return Polygon2.from_points(self.vertices())

    def with_radii(self, radii) -> "StarPolygon":
        return StarPolygon(self.directions, radii, self.center, self.r_min)


def wedge_of(x, sp: StarPolygon) -> tuple[int, int]:
    """Indices ``(l, r)`` of the wedge ``[d_l, d_r)`` that contains ``x``'s direction."""
    v = np.asarray(x, dtype=float).reshape(2) - sp.center
    if np.hypot(*v) <= CENTER_TOL:
        raise DegenerateAtCenter("point coincides with the star center")
    l, r = _wedges(v[None], sp)
    return int(l[0]), int(r[0])


def _wedges(v: np.ndarray, sp: StarPolygon) -> tuple[np.ndarray, np.ndarray]:
    d0 = sp.directions[0]
    phi = _clockwise_angle(v, math.atan2(d0[1], d0[0]))
    l = np.searchsorted(sp._phi, phi, side="right") - 1
    l = np.clip(l, 0, sp.n - 1)
    return l, (l + 1) % sp.n


@dataclass(frozen=True, eq=False)
class CanonicalCloud:
    """Points in a box's canonical frame. ``scale`` times the longest box side is 1."""

    points: np.ndarray
    visible_boundary: np.ndarray
    scale: float
    box: OrientedBox2 | None = None

    def to_world(self, pts) -> np.ndarray:
        if self.box is None:
            raise ValueError("cloud was not produced by canonicalize()")
        return self.box.from_local(np.asarray(pts, dtype=float) / self.scale)


def canonicalize(box: OrientedBox2, raw_points, boundary_points=None) -> CanonicalCloud:
    """Move cropped points into ``box``'s canonical frame.

    The visible boundary defaults to the points themselves: surface returns
    are samples of the visible boundary.
    """
    s = 1.0 / max(box.length, box.width)
    pts = box.to_local(as_points(raw_points)) * s
    if boundary_points is None:
        bnd = pts
    else:
        bnd = box.to_local(as_points(boundary_points)) * s
    return CanonicalCloud(pts, bnd, s, box)


@dataclass(frozen=True)
class LossWeights:
    accuracy: float = 0.1
    tightness: float = 0.1

    def __post_init__(self):
        for name in ("accuracy", "tightness"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidConfig(f"{name} weight must be finite and >= 0")


@dataclass(frozen=True)
class LossTerms:
    total: float
    coverage: float
    accuracy: float
    tightness: float


class _Wedged:
    """Per-point wedge indices and barycentric numerators, fixed for a direction set.

    For a point ``x`` in wedge ``(l, r)``: ``alpha + beta = a / c_l + b / c_r``.
    """

    __slots__ = ("l", "r", "a", "b", "rho", "count")

    def __init__(self, pts: np.ndarray, sp: StarPolygon):
        v = np.asarray(pts, dtype=float).reshape(-1, 2) - sp.center
        v = v[np.hypot(v[:, 0], v[:, 1]) > CENTER_TOL]
        self.count = len(v)
        if self.count == 0:
            self.l = self.r = np.zeros(0, dtype=int)
            self.a = self.b = self.rho = np.zeros(0)
            return
        l, r = _wedges(v, sp)
        dl, dr = sp.directions[l], sp.directions[r]
        den = cross2(dl, dr)
        self.l, self.r = l, r
        self.a = cross2(v, dr) / den
        self.b = cross2(dl, v) / den
        self.rho = np.hypot(v[:, 0], v[:, 1]) / np.einsum("ij,ij->i", dl, dr)

    def excess(self, c: np.ndarray) -> np.ndarray:
        """``alpha + beta - 1`` per point."""
        return self.a / c[self.l] + self.b / c[self.r] - 1.0

    def grad_parts(self, c: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """Sum over points of ``weights * d(alpha + beta)/dc``."""
        n = len(c)
        gl = -weights * self.a / c[self.l] ** 2
        gr = -weights * self.b / c[self.r] ** 2
        return np.bincount(self.l, gl, minlength=n) + np.bincount(self.r, gr, minlength=n)


class _Objective:
    def __init__(self, sp: StarPolygon, cloud: CanonicalCloud, w: LossWeights):
        self.n = sp.n
        self.w = w
        self.X = _Wedged(cloud.points, sp)
        self.B = self.X if cloud.visible_boundary is cloud.points else _Wedged(cloud.visible_boundary, sp)

    def terms(self, c: np.ndarray) -> LossTerms:
        cov = float(np.maximum(self.X.excess(c), 0.0).mean()) if self.X.count else 0.0
        acc = float(np.abs(self.B.excess(c)).mean()) if self.B.count else 0.0
        tight = float(np.abs(c).mean())
        total = cov + self.w.accuracy * acc + self.w.tightness * tight
        return LossTerms(total, cov, acc, tight)

    def total(self, c: np.ndarray) -> float:
        return self.terms(c).total

    def gradient(self, c: np.ndarray, smooth: float = 0.0) -> np.ndarray:
        """Exact gradient, or with ``smooth > 0`` that of the Huber-smoothed loss.

        Smoothing replaces each kink by a quadratic of half-width ``smooth`` in
        excess units; it only shapes search directions.
        """
        g = np.where(c >= 0, 1.0, -1.0) * (self.w.tightness / self.n)
        if self.X.count:
            z = self.X.excess(c)
            if smooth > 0:
                active = np.clip(z / smooth, 0.0, 1.0)
            else:
                active = (z >= 0.0).astype(float)
            g = g + self.X.grad_parts(c, active / self.X.count)
        if self.B.count and self.w.accuracy > 0:
            z = self.B.excess(c)
            if smooth > 0:
                sign = np.clip(z / smooth, -1.0, 1.0)
            else:
                sign = np.where(z >= 0.0, 1.0, -1.0)
            g = g + self.B.grad_parts(c, sign * (self.w.accuracy / self.B.count))
        return g

    def observed(self, share: float = 0.0) -> np.ndarray:
        """Radii whose adjacent points put more than ``share`` barycentric weight on them."""
        seen = np.zeros(self.n)
        for part in (self.X, self.B):
            if part.count:
                s = part.a + part.b
                s = np.where(s > 0, s, 1.0)
                seen += np.bincount(part.l, part.a / s, minlength=self.n)
                seen += np.bincount(part.r, part.b / s, minlength=self.n)
        return seen > share

    def reach(self) -> np.ndarray:
        """Per radius, the farthest adjacent point over the cosine of its wedge angle (0 if none)."""
        out = np.zeros(self.n)
        for part in (self.X, self.B):
            if part.count:
                np.maximum.at(out, part.l, part.rho)
                np.maximum.at(out, part.r, part.rho)
        return out


def loss(sp: StarPolygon, cloud: CanonicalCloud, w: LossWeights = LossWeights()) -> LossTerms:
    return _Objective(sp, cloud, w).terms(sp.radii)


def loss_gradient(sp: StarPolygon, cloud: CanonicalCloud, w: LossWeights = LossWeights()) -> np.ndarray:
    """d(total)/d(radii). At a kink the derivative from the positive side is used."""
    return _Objective(sp, cloud, w).gradient(sp.radii)


@dataclass(frozen=True)
class FitOptions:
    n: int = 256
    step: float = 0.05  # largest radius change per iteration, canonical units
    shrink: float = 0.5
    max_iter: int = 500
    rel_tol: float = 1e-7
    r_min: float = 1e-3
    r_max: float = 10.0
    # a block step may scale each radius by at most this factor (0: unlimited)
    trust: float = 0.0
    method: str = "coordinate"
    armijo: float = 1e-4
    min_step: float = 1e-10
    smooth: float = 1e-2  # initial kink half-width for search directions
    min_smooth: float = 1e-8
    min_points: int = 3
    # radii with no cloud point in either adjacent wedge keep the box prior
    hold_unobserved: bool = True
    # radii with no more point weight than this stay at the box prior
    hold_share: float = 0.0
    # no radius may reach past the box prior or its farthest adjacent point
    envelope: bool = True
    # keep every coverable cloud point inside instead of trading coverage for tightness
    strict_cover: bool = True

    def __post_init__(self):
        if self.n < 8:
            raise InvalidConfig("n must be >= 8")
        if not (self.step > 0 and 0 < self.shrink < 1 and self.max_iter >= 0 and 0 < self.r_min < self.r_max):
            raise InvalidConfig("invalid optimiser settings")
        if self.method not in ("coordinate", "gradient"):
            raise InvalidConfig(f"unknown method {self.method!r}")


@dataclass
class FitResult:
    polygon: Polygon2
    star: StarPolygon | None
    cloud: CanonicalCloud | None
    loss_history: list
    terms: LossTerms | None
    iterations: int
    fell_back: bool


def box_radii(box: OrientedBox2, directions: np.ndarray, scale: float) -> np.ndarray:
    """Distance from the canonical box center to the box outline along each direction."""
    hx = box.length * scale / 2.0
    hy = box.width * scale / 2.0
    with np.errstate(divide="ignore"):
        tx = np.where(directions[:, 0] != 0, hx / np.abs(directions[:, 0]), np.inf)
        ty = np.where(directions[:, 1] != 0, hy / np.abs(directions[:, 1]), np.inf)
    return np.minimum(tx, ty)


_DIRECTION_CACHE: dict = {}


def _directions(n: int) -> np.ndarray:
    if n not in _DIRECTION_CACHE:
        _DIRECTION_CACHE[n] = square_directions(n)
    return _DIRECTION_CACHE[n]


def _block_labels(n: int) -> np.ndarray:
    """Colour radii so that no wedge has both ends in one block."""
    lab = np.arange(n) % 2
    if n % 2:
        lab[-1] = 2
    return lab


def _entries(part: _Wedged, u: np.ndarray, inblock: np.ndarray, wc: float, wa: float):
    """Per-point terms of the 1D problems for the radii in one block.

    With the other radii fixed, a point's excess is ``k * u_j + e`` for the
    single block radius ``j`` of its wedge.
    """
    on_l = inblock[part.l]
    on_r = inblock[part.r] & ~on_l
    j = np.concatenate([part.l[on_l], part.r[on_r]])
    k = np.concatenate([part.a[on_l], part.b[on_r]])
    e = np.concatenate([part.b[on_l] * u[part.r[on_l]], part.a[on_r] * u[part.l[on_r]]]) - 1.0
    keep = k > 0
    return j[keep], k[keep], e[keep], np.full(int(keep.sum()), wc), np.full(int(keep.sum()), wa)


def _cover_bound(part: _Wedged, u: np.ndarray, inblock: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """Largest inverse radius per block radius that keeps the ``keep`` points covered."""
    out = np.full(len(u), np.inf)
    sub = part if keep.all() else _subset(part, keep)
    j, k, e = _entries(sub, u, inblock, 0.0, 0.0)[:3]
    np.minimum.at(out, j, -e / k)
    return out


def _subset(part: _Wedged, keep: np.ndarray) -> _Wedged:
    sub = object.__new__(_Wedged)
    for name in ("l", "r", "a", "b", "rho"):
        setattr(sub, name, getattr(part, name)[keep])
    sub.count = int(keep.sum())
    return sub


def _block_update(
    obj: _Objective,
    u: np.ndarray,
    inblock: np.ndarray,
    u_lo,
    u_hi,
    trust: float = 0.0,
    cover: np.ndarray | None = None,
) -> np.ndarray:
    """Exact minimiser over the inverse radii in ``inblock`` (all others fixed).

    Each 1D problem is ``sum max(k u + e, 0) wc + sum |k u + e| wa + t / u``
    (convex in ``u``): its derivative is a non-decreasing step function of the
    breakpoints ``-e/k`` minus ``t / u**2``; the root is located per radius.
    With ``cover`` (a mask over the cloud points) those points must stay
    inside, which caps each ``u`` at its smallest breakpoint.
    """
    n = obj.n
    t = obj.w.tightness / n
    beta = obj.w.accuracy
    if cover is not None and obj.X.count:
        u_hi = np.minimum(u_hi, _cover_bound(obj.X, u, inblock, cover))
    parts = []
    if obj.B is obj.X:
        if obj.X.count:
            parts.append(_entries(obj.X, u, inblock, 1.0 / obj.X.count, beta / obj.X.count))
    else:
        if obj.X.count:
            parts.append(_entries(obj.X, u, inblock, 1.0 / obj.X.count, 0.0))
        if obj.B.count and beta > 0:
            parts.append(_entries(obj.B, u, inblock, 0.0, beta / obj.B.count))
    u_lo = np.broadcast_to(np.asarray(u_lo, dtype=float), u.shape)
    u_hi = np.broadcast_to(np.asarray(u_hi, dtype=float), u.shape)
    new = u.copy()
    idx = np.flatnonzero(inblock)
    # radii with no terms only feel the tightness pull
    new[idx] = u_hi[idx] if t > 0 else u[idx]
    if not parts:
        return new
    j = np.concatenate([p[0] for p in parts])
    if len(j) == 0:
        return new
    k = np.concatenate([p[1] for p in parts])
    e = np.concatenate([p[2] for p in parts])
    wc = np.concatenate([p[3] for p in parts])
    wa = np.concatenate([p[4] for p in parts])
    bp = np.maximum(-e / k, 0.0)
    order = np.lexsort((bp, j))
    j, k, bp, wc, wa = j[order], k[order], bp[order], wc[order], wa[order]
    starts = np.flatnonzero(np.r_[True, j[1:] != j[:-1]])
    groups = j[starts]
    sizes = np.diff(np.r_[starts, len(j)])
    gid = np.repeat(np.arange(len(groups)), sizes)
    inc = k * (wc + 2.0 * wa)
    tot_a = np.bincount(gid, k * wa)
    cum = np.cumsum(inc)
    cum -= np.repeat(cum[starts] - inc[starts], sizes)
    s_after = cum - tot_a[gid]
    s_before = s_after - inc
    with np.errstate(divide="ignore"):
        pull = np.where(bp > 0, t / np.where(bp > 0, bp, 1.0) ** 2, np.inf if t > 0 else 0.0)
    d_plus = s_after - pull
    d_minus = s_before - pull
    big = len(j)
    pos = np.where(d_plus >= 0, np.arange(len(j)), big)
    first = np.minimum.reduceat(pos, starts)
    found = first < big
    last = starts + sizes - 1
    cur = u[groups]
    out = np.empty(len(groups))
    with np.errstate(divide="ignore", invalid="ignore"):
        # root on the far side of the last breakpoint
        s_last = s_after[last]
        hi = u_hi[groups]
        tail = np.where(s_last > 0, np.sqrt(t / np.where(s_last > 0, s_last, 1.0)), hi) if t > 0 else np.where(
            s_last < 0, hi, np.maximum(cur, bp[last])
        )
        out[~found] = tail[~found]
        K = np.where(found, first, 0)
        at_kink = found & (d_minus[K] < 0)
        out[at_kink] = bp[K][at_kink]
        inner = found & ~at_kink
        if t > 0:
            sb = s_before[K]
            out[inner] = np.sqrt(t / sb[inner])
        else:
            out[inner] = np.minimum(cur, bp[K])[inner]
    new[groups] = np.clip(out, u_lo[groups], u_hi[groups])
    if trust:
        # convex 1D problems: clipping the minimiser gives the minimiser on the interval
        new[idx] = np.clip(new[idx], u[idx] / trust, u[idx] * trust)
    return new


def cover_start(obj: _Objective, c: np.ndarray, cap: np.ndarray, free: np.ndarray | None = None):
    """Grow ``c`` until every cloud point that can be covered within ``cap`` is inside.

    Returns the new radii and the mask of points that are covered.
    """
    X = obj.X
    u = 1.0 / c
    u_cap = 1.0 / cap
    movable = np.ones(obj.n, bool) if free is None else free
    ok = (X.a * u_cap[X.l] + X.b * u_cap[X.r] <= 1.0 + COVER_TOL) & movable[X.l] & movable[X.r]
    s = X.a * u[X.l] + X.b * u[X.r]
    bad = ok & (s > 1.0 + COVER_TOL)
    if bad.any():
        # shrinking both inverse radii of a wedge by 1/s puts its point on the chord
        f = np.ones(obj.n)
        np.minimum.at(f, X.l[bad], 1.0 / s[bad])
        np.minimum.at(f, X.r[bad], 1.0 / s[bad])
        u = np.maximum(u * f, u_cap)
        s = X.a * u[X.l] + X.b * u[X.r]
        bad = ok & (s > 1.0 + COVER_TOL)
        u[X.l[bad]] = u_cap[X.l[bad]]
        u[X.r[bad]] = u_cap[X.r[bad]]
    return 1.0 / u, ok


def minimize_radii(
    obj: _Objective,
    c0: np.ndarray,
    opts: FitOptions,
    free: np.ndarray | None = None,
    cap: np.ndarray | None = None,
    cover: np.ndarray | None = None,
):
    """Minimise the loss over the radii; returns radii, loss history and sweep count.

    ``cap`` optionally bounds each radius from above (``r_max`` otherwise).
    ``cover`` masks cloud points that must stay inside; ``c0`` must already
    cover them (see :func:`cover_start`). Only the coordinate method honours it.

    ``opts.method == "coordinate"`` (default) alternates exact minimisation
    over interleaved blocks of inverse radii. ``"gradient"`` is projected
    descent along (smoothed) gradients with backtracking. Both only accept
    steps that do not raise the loss, so the history is non-increasing.
    """
    hi = np.full(obj.n, opts.r_max) if cap is None else np.clip(cap, opts.r_min, opts.r_max)
    if opts.method == "gradient":
        return _gradient_descent(obj, c0, opts, free, hi)
    c = np.clip(c0.astype(float), opts.r_min, hi)
    u = 1.0 / c
    u_lo, u_hi = 1.0 / hi, 1.0 / opts.r_min
    f = obj.total(c)
    history = [f]
    labels = _block_labels(obj.n)
    blocks = [(labels == b) & (free if free is not None else True) for b in np.unique(labels)]
    it = 0
    while it < opts.max_iter:
        it += 1
        f_start = f
        for inblock in blocks:
            if not inblock.any():
                continue
            u_new = _block_update(obj, u, inblock, u_lo, u_hi, opts.trust, cover)
            f_new = obj.total(1.0 / u_new)
            if f_new <= f:
                u, f = u_new, f_new
        history.append(f)
        if f_start - f <= opts.rel_tol * max(abs(f), 1e-300):
            break
    return 1.0 / u, history, it


def _gradient_descent(obj: _Objective, c0: np.ndarray, opts: FitOptions, free=None, hi=None):
    hi = opts.r_max if hi is None else hi
    c = np.clip(c0.astype(float), opts.r_min, hi)
    f = obj.total(c)
    history = [f]
    eta = opts.step
    smooth = opts.smooth
    it = 0
    while it < opts.max_iter:
        it += 1
        g = obj.gradient(c, smooth)
        if free is not None:
            g[~free] = 0.0
        gmax = float(np.abs(g).max())
        accepted = False
        if gmax > 0.0:
            direction = g / gmax
            eta = min(opts.step, eta / opts.shrink)
            while eta >= opts.min_step:
                cand = np.clip(c - eta * direction, opts.r_min, hi)
                fc = obj.total(cand)
                if fc <= f - opts.armijo * float(g @ (c - cand)):
                    accepted = True
                    break
                eta *= opts.shrink
        if not accepted:
            if smooth <= opts.min_smooth:
                break
            smooth *= 0.1
            eta = opts.step
            continue
        change = f - fc
        c, f = cand, fc
        history.append(f)
        if change <= opts.rel_tol * max(abs(f), 1e-300) and smooth <= opts.min_smooth:
            break
    return c, history, it


def fit_star(
    box: OrientedBox2,
    raw_points,
    w: LossWeights = LossWeights(),
    opts: FitOptions = FitOptions(),
    boundary_points=None,
) -> FitResult:
    """Fit a star polygon to cropped points; falls back to the box footprint."""
    pts = as_points(raw_points)
    footprint = box.polygon()
    cloud = canonicalize(box, pts, boundary_points)
    usable = np.hypot(cloud.points[:, 0], cloud.points[:, 1]) > CENTER_TOL
    if int(usable.sum()) < opts.min_points:
        return FitResult(footprint, None, cloud, [], None, 0, True)
    dirs = _directions(opts.n)
    c0 = np.maximum(box_radii(box, dirs, cloud.scale), opts.r_min)
    sp0 = StarPolygon(dirs, c0, r_min=opts.r_min)
    obj = _Objective(sp0, cloud, w)
    free = obj.observed(opts.hold_share) if opts.hold_unobserved else None
    cap = np.maximum(c0, obj.reach()) if opts.envelope else np.full(opts.n, opts.r_max)
    cover = None
    if opts.strict_cover and opts.method == "coordinate":
        c0, cover = cover_start(obj, c0, np.clip(cap, opts.r_min, opts.r_max), free)
    c, history, iters = minimize_radii(obj, c0, opts, free, cap, cover)
    star = sp0.with_radii(c)
    world = cloud.to_world(star.vertices())
    return FitResult(Polygon2.from_points(world), star, cloud, history, obj.terms(c), iters, False)


def fit(
    box: OrientedBox2,
    raw_points,
    w: LossWeights = LossWeights(),
    opts: FitOptions = FitOptions(),
) -> Polygon2:
    return fit_star(box, raw_points, w, opts).polygon
