"""Sublevel sets Omega_eps = {|Theta| < eps} and distances to them.

Two tools live here.

``d_eps`` answers a single distance query with a certified interval
[lo, hi]: a best-first quadtree over a search window discards cells that are
provably free of Omega_eps (Schwarz-Pick disks around cell centres, plus the
strip where 1 - |Theta(x+iy)|^2 <= 4 y phi'(x) forces |Theta| >= eps), and
bisection on segments towards sublevel points gives the upper bound.

``SublevelBoundary`` / ``LevelSetGeometry`` build a distance field for many
query points: on vertical lines the lowest crossing of |Theta| = level (and
optionally the exit from the first sublevel interval) is located, the
crossings are joined into polylines with adaptive refinement in x, and
distances are exact point-to-segment distances found through a KD-tree.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import WindowExhausted
from .kernels import KernelEval


# -- vectorized bracketing and root refinement ----------------------------------

def _illinois(g, x, a, b, ga, gb, tol, maxit=200):
    """Roots of y -> g(x, y) on brackets [a, b] with ga > 0 > gb (arrays)."""
    a, b, ga, gb = a.copy(), b.copy(), ga.copy(), gb.copy()
    n = a.size
    c = 0.5 * (a + b)
    done = np.zeros(n, dtype=bool)
    last = np.zeros(n, dtype=int)
    for _ in range(maxit):
        act = ~done
        if not np.any(act):
            break
        ia = np.nonzero(act)[0]
        with np.errstate(invalid="ignore", divide="ignore"):
            cc = (a[ia] * gb[ia] - b[ia] * ga[ia]) / (gb[ia] - ga[ia])
        bad = ~np.isfinite(cc) | (cc <= a[ia]) | (cc >= b[ia])
        cc[bad] = 0.5 * (a[ia][bad] + b[ia][bad])
        gc = g(x[ia], cc)
        c[ia] = cc
        hit = np.abs(gc) <= tol
        narrow = (b[ia] - a[ia]) <= 1e-15 * np.maximum(1.0, np.abs(cc))
        done[ia[hit | narrow]] = True
        pos = gc > 0
        # Illinois: halve the stale end value when the same end is kept twice
        ip = ia[pos & ~hit]
        a[ip] = c[ip]
        ga[ip] = gc[pos & ~hit]
        gb[ip[last[ip] == 1]] *= 0.5
        last[ip] = 1
        ineg = ia[~pos & ~hit]
        b[ineg] = c[ineg]
        gb[ineg] = gc[~pos & ~hit]
        ga[ineg[last[ineg] == -1]] *= 0.5
        last[ineg] = -1
    return c


class _LevelFn:
    def __init__(self, model, level):
        self.model = model
        self.loglev = math.log(level)

    def __call__(self, x, y):
        z = np.asarray(x, dtype=float) + 1j * np.asarray(y, dtype=float)
        return self.model.log_theta(z)[0].real - self.loglev


# -- single-point certified distance -----------------------------------------------


@dataclass
class DistanceInterval:
    lo: float
    hi: float

    @property
    def mid(self):
        return 0.5 * (self.lo + self.hi)


def _cell_safe(px, py, m, eps, half):
    """True if the square of half-width ``half`` around (px, py) lies in the
    Schwarz-Pick disk where |Theta| >= eps is guaranteed."""
    s = (m - eps) / (1 - m * eps)
    ok = (s > 0) & (py > 0)
    s = np.clip(s, 0, 1 - 1e-16)
    cy = py * (1 + s * s) / (1 - s * s)
    r = 2 * py * s / (1 - s * s)
    dx = half
    dy = np.maximum(np.abs(py + half - cy), np.abs(py - half - cy))
    return ok & (dx * dx + dy * dy <= r * r)


def _phi_bound(model, x0, x1):
    # upper estimate of phi' on [x0, x1] from samples (margin 1.5)
    xs = np.linspace(x0, x1, 5)
    return 1.5 * float(np.max(model.phi_prime(xs)))


def d_eps_interval(model, z, eps, rel_tol=1e-4, max_cells=200_000, growth=6):
    """Certified [lo, hi] for the distance from z to Omega_eps."""
    z = complex(z)
    if z.imag < 0:
        z = z.conjugate()
    th = float(model.abs_theta(z)[()])
    if th < eps:
        return DistanceInterval(0.0, 0.0)
    kern = KernelEval(model)
    kn = float(kern.knorm2(z)[0])
    d0 = float(model.d0(z)[0])
    bound = min(d0, 1.0 / kn)
    g = _LevelFn(model, eps)
    W = 4.0 * bound
    for attempt in range(growth + 1):
        res = _certify(model, g, z, eps, W, bound / 8, rel_tol, max_cells)
        if res is not None:
            return res
        W *= 2
    raise WindowExhausted(f"no point of Omega_{eps} within {W / 2:.3g} of {z}")


def _certify(model, g, z, eps, W, cell0, rel_tol, max_cells):
    x, y = z.real, z.imag
    n = max(1, int(math.ceil(2 * W / cell0)))
    h = 2 * W / n
    cx = x - W + h * (np.arange(n) + 0.5)
    ytop = y + W
    ny = max(1, int(math.ceil(ytop / h)))
    hy = ytop / ny
    cy = hy * (np.arange(ny) + 0.5)
    # start from square cells of side max(h, hy)
    side = max(h, hy)
    heap = []
    for xv in cx:
        for yv in cy:
            dmin = _rect_dist(x, y, xv - h / 2, xv + h / 2, yv - hy / 2, yv + hy / 2)
            if dmin <= W:
                heap.append((dmin, xv, yv, h / 2, hy / 2))
    heapq.heapify(heap)
    hi = math.inf
    best = None
    evals = 0
    strip_cache = {}
    while heap:
        if heap[0][0] >= hi * (1 - rel_tol):
            return DistanceInterval(min(heap[0][0], hi * (1 - rel_tol)), hi)
        batch = [heapq.heappop(heap) for _ in range(min(64, len(heap)))]
        batch = [c for c in batch if c[0] < hi * (1 - rel_tol)]
        if not batch:
            continue
        px = np.array([c[1] for c in batch])
        py = np.array([c[2] for c in batch])
        hx = np.array([c[3] for c in batch])
        hyy = np.array([c[4] for c in batch])
        m = model.abs_theta(px + 1j * py)
        evals += len(batch)
        # sublevel centres give upper bounds via bisection on the segment from z
        sub = m < eps
        if np.any(sub):
            for k in np.nonzero(sub)[0]:
                p = complex(px[k], py[k])
                t = _segment_root(g, z, p)
                dist = abs(t - z)
                if dist < hi:
                    hi = dist
                    best = t
        half = np.maximum(hx, hyy)
        safe = (~sub) & _cell_safe(px, py, m, eps, half)
        # strip next to the axis where 1-|Theta|^2 <= 4 y phi' keeps |Theta| >= eps
        low = (~sub) & (~safe) & (py - hyy <= 0)
        for k in np.nonzero(low)[0]:
            key = (round(px[k] - hx[k], 12), round(px[k] + hx[k], 12))
            if key not in strip_cache:
                strip_cache[key] = (1 - eps * eps) / (4 * _phi_bound(model, *key))
            if py[k] + hyy[k] <= strip_cache[key]:
                safe[k] = True
        for k, c in enumerate(batch):
            if safe[k]:
                continue
            if evals > max_cells:
                return DistanceInterval(min(c[0], hi * (1 - rel_tol)), hi) if hi < math.inf else None
            x0, x1 = px[k] - hx[k], px[k] + hx[k]
            y0, y1 = py[k] - hyy[k], py[k] + hyy[k]
            xm, ym = px[k], py[k]
            for (a0, a1, b0, b1) in ((x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)):
                dm = _rect_dist(x, y, a0, a1, b0, b1)
                if dm < min(hi * (1 - rel_tol), W):
                    heapq.heappush(heap, (dm, 0.5 * (a0 + a1), 0.5 * (b0 + b1), 0.5 * (a1 - a0), 0.5 * (b1 - b0)))
    if hi < math.inf:
        return DistanceInterval(hi * (1 - rel_tol), hi)
    return None


def _rect_dist(x, y, x0, x1, y0, y1):
    dx = max(x0 - x, 0.0, x - x1)
    dy = max(y0 - y, 0.0, y - y1)
    return math.hypot(dx, dy)


def _segment_root(g, z, p, tol=1e-10):
    """Crossing of |Theta| = eps on the segment z -> p, nearest to z among the
    crossings found by sampling; refined to |log|Theta| - log eps| <= tol."""
    ts = np.linspace(0, 1, 17)
    pts = z + ts * (p - z)
    gv = g(pts.real, pts.imag)
    k = int(np.argmax(gv < 0))
    a, b = ts[k - 1], ts[k]
    ga, gb = gv[k - 1], gv[k]
    for _ in range(200):
        c = a - ga * (b - a) / (gb - ga)
        if not a < c < b:
            c = 0.5 * (a + b)
        q = z + c * (p - z)
        gc = float(g(np.array([q.real]), np.array([q.imag]))[0])
        if abs(gc) <= tol or b - a < 1e-16:
            return q
        if gc > 0:
            a, ga = c, gc
            gb *= 0.5
        else:
            b, gb = c, gc
            ga *= 0.5
    return z + c * (p - z)


def d_eps(model, z, eps, rel_tol=1e-6):
    """Distance from z to Omega_eps (midpoint of the certified interval)."""
    return d_eps_interval(model, z, eps, rel_tol).mid


def d0(model, z):
    return float(model.d0(complex(z))[0])


# -- distance field from level-curve polylines ----------------------------------------


class SublevelBoundary:
    """Polyline approximation of the part of the boundary of {|Theta| < level}
    seen from below, over x in [x0, x1] and heights up to y_cap."""

    def __init__(self, model, level, x0, x1, y_cap=None, two_sided=None, rel_tol=1e-3,
                 max_lines=400_000):
        self.model = model
        self.level = float(level)
        self.x0, self.x1 = float(x0), float(x1)
        self.g = _LevelFn(model, level)
        self.loglev = math.log(level)
        if two_sided is None:
            two_sided = model.zeros.kind in ("finite-list", "custom-generator", "ls-family")
        self.two_sided = two_sided
        self.rel_tol = rel_tol
        self.max_lines = max_lines
        self.y_cap = y_cap
        self._build()

    # crossing heights on a batch of vertical lines
    def _guess(self, x):
        return -self.loglev / (2 * self.model.phi_prime(x))

    def _lines(self, x, hints=None):
        x = np.asarray(x, dtype=float)
        n = x.size
        guess = self._guess(x)
        cap = self.y_cap if self.y_cap is not None else np.inf
        ks = np.arange(-4, 5, dtype=float)
        Y = guess[:, None] * 2.0 ** ks[None, :]
        extra = self._zero_heights(x)
        Y = np.concatenate([Y, extra] + ([hints] if hints is not None else []), axis=1)
        Y = np.where(Y > cap, np.nan, Y)
        Y.sort(axis=1)
        ok = np.isfinite(Y)
        G = np.full(Y.shape, np.nan)
        xx = np.broadcast_to(x[:, None], Y.shape)
        G[ok] = self.g(xx[ok], Y[ok])
        neg = ok & (G < 0)
        has = neg.any(axis=1)
        j = np.argmax(neg, axis=1)
        lo = np.full(n, np.nan)
        hi = np.full(n, np.nan)
        rows = np.nonzero(has)[0]
        if rows.size:
            jj = j[rows]
            ya = np.where(jj > 0, Y[rows, np.maximum(jj - 1, 0)], 0.0)
            ga = np.where(jj > 0, G[rows, np.maximum(jj - 1, 0)], -self.loglev)
            yb = Y[rows, jj]
            gb = G[rows, jj]
            lo[rows] = _illinois(self.g, x[rows], ya, yb, ga, gb, tol=1e-10)
            if self.two_sided:
                hi[rows] = self._exit(x[rows], yb, cap)
        return lo, hi

    def _exit(self, x, yin, cap):
        # first return to |Theta| >= level above a sublevel point
        n = x.size
        out = np.full(n, np.inf)
        # sublevel intervals longer than 8 times their base count as unbounded
        ks = np.arange(1, 13) / 4.0
        Y = yin[:, None] * 2.0 ** ks[None, :]
        Y = np.concatenate([yin[:, None], Y], axis=1)
        ok = Y <= cap
        G = np.full(Y.shape, np.nan)
        xx = np.broadcast_to(x[:, None], Y.shape)
        G[ok] = self.g(xx[ok], Y[ok])
        pos = ok & (G > 0)
        has = pos.any(axis=1)
        rows = np.nonzero(has)[0]
        if rows.size:
            j = np.argmax(pos, axis=1)[rows]
            ya, yb = Y[rows, j - 1], Y[rows, j]
            ga, gb = G[rows, j - 1], G[rows, j]
            # the root finder wants g > 0 at the left end; flip the sign
            neg_g = lambda xv, yv: -self.g(xv, yv)
            out[rows] = _illinois(neg_g, x[rows], ya, yb, -ga, -gb, tol=1e-10)
        return out

    def _zero_heights(self, x):
        # heights of zeros whose real part is close to the line
        z = self.model
        pad = np.full((x.size, 1), np.nan)
        if z.zeros.kind == "pw-exponential":
            return pad
        lo, hi = float(np.min(x)), float(np.max(x))
        pts = z.nearby_zeros(0.5 * (lo + hi) + 0j, 0.5 * (hi - lo) + 2.0)
        if pts.size == 0:
            return pad
        pts = pts[np.argsort(pts.real)]
        out = np.full((x.size, 3), np.nan)
        idx = np.searchsorted(pts.real, x)
        for k, off in enumerate((-1, 0)):
            ii = np.clip(idx + off, 0, pts.size - 1)
            p = pts[ii]
            near = np.abs(x - p.real) <= 2 * p.imag
            out[near, k] = p.imag[near]
        out[:, 2] = np.nan
        return out

    def _build(self):
        x0, x1 = self.x0, self.x1
        # initial lines spaced by the local crossing height
        xs = [x0]
        while xs[-1] < x1:
            step = float(np.clip(self._guess(np.array([xs[-1]]))[0], 1e-6, 1.0))
            xs.append(min(x1, xs[-1] + step))
        xs = np.unique(np.concatenate([np.array(xs), self._zero_xs()]))
        lo, hi = self._lines(xs)
        X, L, H = [xs], [lo], [hi]
        # pending intervals between neighbouring lines, bisected until the
        # crossing heights are resolved by linear interpolation
        pa, pb = xs[:-1], xs[1:]
        la, lb, ha, hb = lo[:-1], lo[1:], hi[:-1], hi[1:]
        total = xs.size
        for _ in range(60):
            if pa.size == 0 or total > self.max_lines:
                break
            pm = 0.5 * (pa + pb)
            hints = np.stack([la, lb, 0.5 * (la + np.where(np.isfinite(ha), ha, la)),
                              0.5 * (lb + np.where(np.isfinite(hb), hb, lb))], axis=1)
            lm, hm = self._lines(pm, hints)
            X.append(pm)
            L.append(lm)
            H.append(hm)
            total += pm.size
            bad = ~self._resolved(pa, pb, la, lb, ha, hb, lm, hm)
            pa, pb, la, lb, ha, hb, lm, hm, pm = (v[bad] for v in (pa, pb, la, lb, ha, hb, lm, hm, pm))
            pa, pb = np.concatenate([pa, pm]), np.concatenate([pm, pb])
            la, lb = np.concatenate([la, lm]), np.concatenate([lm, lb])
            ha, hb = np.concatenate([ha, hm]), np.concatenate([hm, hb])
        xs = np.concatenate(X)
        lo = np.concatenate(L)
        hi = np.concatenate(H)
        o = np.argsort(xs, kind="stable")
        self.xs, self.ylo, self.yhi = xs[o], lo[o], hi[o]
        self._segments()

    def _zero_xs(self):
        if self.model.zeros.kind == "pw-exponential":
            return np.zeros(0)
        c = 0.5 * (self.x0 + self.x1)
        pts = self.model.nearby_zeros(c + 0j, 0.5 * (self.x1 - self.x0) + 1.0)
        pts = pts[(pts.real > self.x0) & (pts.real < self.x1)]
        small = pts[pts.imag < 1.0]
        offs = np.array([-4, -2, -1, -0.5, 0, 0.5, 1, 2, 4])
        return np.clip((small.real[:, None] + small.imag[:, None] * offs[None, :]).ravel(), self.x0, self.x1)

    def _resolved(self, xa, xb, la, lb, ha, hb, lm, hm):
        dx = xb - xa
        fa, fb, fm = np.isfinite(la), np.isfinite(lb), np.isfinite(lm)
        scale = np.fmin(np.fmin(np.where(fa, la, np.inf), np.where(fb, lb, np.inf)),
                        np.where(fm, lm, np.inf))
        scale = np.where(np.isfinite(scale), scale, 1.0)
        tiny = dx <= self.rel_tol * scale
        none = ~fa & ~fb & ~fm
        same = fa & fb & fm
        tol = self.rel_tol * scale
        ok = same & (np.abs(lm - 0.5 * (la + lb)) <= tol) & (dx <= 2 * scale)
        if self.two_sided:
            ga, gb, gm = np.isfinite(ha), np.isfinite(hb), np.isfinite(hm)
            hsame = ga & gb & gm
            with np.errstate(invalid="ignore"):
                hok = (~ga & ~gb & ~gm) | (hsame & (np.abs(hm - 0.5 * (ha + hb)) <= tol))
            ok &= hok
        return ok | none | tiny

    def _segments(self):
        xs, lo, hi = self.xs, self.ylo, self.yhi
        segs = []
        for ys in (lo, hi) if self.two_sided else (lo,):
            f = np.isfinite(ys)
            link = f[:-1] & f[1:]
            # do not link across jumps that refinement could not resolve
            dy = np.abs(np.diff(np.where(f, ys, 0)))
            dx = np.diff(xs)
            link &= dy <= 4 * dx + 0.25 * np.fmin(np.where(f[:-1], ys[:-1], np.inf), np.where(f[1:], ys[1:], np.inf))
            i = np.nonzero(link)[0]
            segs.append(np.stack([xs[i], ys[i], xs[i + 1], ys[i + 1]], axis=1))
            # isolated or end points become degenerate segments / vertical closures
            endp = f & ~(np.concatenate([[False], link]) & np.concatenate([link, [False]]))
            j = np.nonzero(endp)[0]
            top = hi[j] if self.two_sided else np.full(j.size, np.nan)
            top = np.where(np.isfinite(top), top, ys[j])
            segs.append(np.stack([xs[j], ys[j], xs[j], top], axis=1))
        S = np.concatenate(segs, axis=0) if segs else np.zeros((0, 4))
        self.segments = S
        # one tree per length class (factor 4), so the search radius of each
        # class matches its own segment lengths
        self._classes = []
        if S.shape[0]:
            ln = np.hypot(S[:, 2] - S[:, 0], S[:, 3] - S[:, 1])
            cls = np.floor(np.log2(np.maximum(ln, 1e-300)) / 2)
            for c in np.unique(cls):
                Sc = S[cls == c]
                mid = np.stack([(Sc[:, 0] + Sc[:, 2]) / 2, (Sc[:, 1] + Sc[:, 3]) / 2], axis=1)
                half = 0.5 * float(np.max(ln[cls == c]))
                self._classes.append((cKDTree(mid), Sc, half))

    def distance(self, z):
        """Distance from each z to the sampled boundary (inf if none)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        P = np.stack([z.real, np.abs(z.imag)], axis=1)
        best = np.full(z.shape[0], np.inf)
        if not self._classes:
            return best
        found = []
        for tree, Sc, half in self._classes:
            k = min(8, Sc.shape[0])
            dd, ii = tree.query(P, k=k)
            dd = dd.reshape(len(P), k)
            ii = ii.reshape(len(P), k)
            best = np.minimum(best, np.min(_seg_dist(P[:, None, :], Sc[ii]), axis=1))
            found.append(dd[:, -1])
        # a segment outside the k nearest midpoints of its class is at least
        # dk - half away; search further only when that could improve best by
        # more than the polyline tolerance
        for (tree, Sc, half), dk in zip(self._classes, found):
            if Sc.shape[0] <= 8:
                continue
            rows = np.nonzero(dk - half < best * (1 - self.rel_tol))[0]
            if rows.size == 0:
                continue
            for c0 in range(0, rows.size, 20000):
                rr = rows[c0:c0 + 20000]
                cands = tree.query_ball_point(P[rr], best[rr] + half)
                cnt = np.fromiter(map(len, cands), dtype=np.intp, count=rr.size)
                has = cnt > 0
                if not np.any(has):
                    continue
                idx = np.concatenate([np.asarray(c, dtype=np.intp) for c in cands[has]])
                owner = np.repeat(rr[has], cnt[has])
                dist = _seg_dist(P[owner], Sc[idx])
                starts = np.concatenate([[0], np.cumsum(cnt[has])[:-1]])
                best[rr[has]] = np.minimum(best[rr[has]], np.minimum.reduceat(dist, starts))
        return best

    def samples(self):
        """Boundary samples (x, y, |Theta|) in x order."""
        rows = []
        for ys in (self.ylo, self.yhi):
            f = np.isfinite(ys)
            rows.append(np.stack([self.xs[f], ys[f]], axis=1))
        pts = np.concatenate(rows)
        pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
        th = self.model.abs_theta(pts[:, 0] + 1j * pts[:, 1])
        return np.column_stack([pts, th])


def _seg_dist(P, S):
    ax, ay, bx, by = S[..., 0], S[..., 1], S[..., 2], S[..., 3]
    px, py = P[..., 0], P[..., 1]
    vx, vy = bx - ax, by - ay
    L2 = vx * vx + vy * vy
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(L2 > 0, ((px - ax) * vx + (py - ay) * vy) / L2, 0.0)
    t = np.clip(t, 0, 1)
    return np.hypot(px - ax - t * vx, py - ay - t * vy)


class LevelSetGeometry:
    """eps/delta level sets of one model over a window of the real axis."""

    def __init__(self, model, eps, delta, x_range, y_cap=None, rel_tol=1e-3):
        if not 0 < eps < delta < 1:
            raise ValueError("need 0 < eps < delta < 1")
        self.model = model
        self.eps, self.delta = float(eps), float(delta)
        self.x_range = (float(x_range[0]), float(x_range[1]))
        self.y_cap = y_cap
        self.rel_tol = rel_tol
        self._b = {}

    def boundary(self, which="eps"):
        if which not in self._b:
            lev = self.eps if which == "eps" else self.delta
            self._b[which] = SublevelBoundary(self.model, lev, *self.x_range, y_cap=self.y_cap,
                                              rel_tol=self.rel_tol)
        return self._b[which]

    def in_delta_complement(self, z):
        z = np.asarray(z, dtype=complex)
        w = np.where(z.imag < 0, np.conj(z), z)
        return self.model.abs_theta(w) >= self.delta

    def covers(self, z):
        x = np.real(z)
        return (x >= self.x_range[0]) & (x <= self.x_range[1])

    def d_eps(self, z):
        """Distance field to Omega_eps (0 inside, reflected for Im z < 0)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        w = np.where(z.imag < 0, np.conj(z), z)
        d = self.boundary("eps").distance(w)
        inside = self.model.abs_theta(w) < self.eps
        d[inside] = 0.0
        return d

    def dist_to_delta(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        w = np.where(z.imag < 0, np.conj(z), z)
        d = self.boundary("delta").distance(w)
        inside = self.model.abs_theta(w) < self.delta
        d[inside] = 0.0
        return d

    def raster(self, nx=200, ny=100, y_max=None):
        x = np.linspace(*self.x_range, nx)
        if y_max is None:
            b = self.boundary("eps")
            f = np.isfinite(b.ylo)
            y_max = 2 * float(np.max(b.ylo[f])) if np.any(f) else 1.0
        y = np.linspace(0, y_max, ny)
        X, Y = np.meshgrid(x, y)
        D = self.d_eps((X + 1j * Y).ravel()).reshape(X.shape)
        return X, Y, D


# -- distance statistics ------------------------------------------------------------------


@dataclass
class DistanceReport:
    z: complex
    d0: float
    d_eps: float
    bound: float
    ratio: float
    knorm2: float


def distance_report(model, z, eps, rel_tol=1e-6):
    kern = KernelEval(model)
    z = complex(z)
    kn = float(kern.knorm2(z)[0])
    dz = float(model.d0(z)[0])
    de = d_eps(model, z, eps, rel_tol)
    b = min(dz, 1.0 / kn)
    return DistanceReport(z, dz, float(de), b, float(de / b), kn)


@dataclass
class LevBoundsStats:
    eps: float
    delta: float
    reports: list
    min_ratio: float
    max_ratio: float
    histogram: tuple

    @property
    def spread(self):
        return self.max_ratio / self.min_ratio


def verify_lev_bounds(model, samples, eps, delta, bins=10, rel_tol=1e-6):
    """Ratio d_eps / min(d0, 1/knorm2) over samples in the complement of
    Omega_delta."""
    reps = []
    for z in samples:
        th = float(model.abs_theta(complex(z))[()])
        if th < delta:
            raise ValueError(f"sample {z} lies in Omega_delta (|Theta| = {th:.3g})")
        reps.append(distance_report(model, z, eps, rel_tol))
    r = np.array([p.ratio for p in reps])
    if not np.all(np.isfinite(r) & (r > 0)):
        raise AssertionError("distance ratios must be finite and positive")
    hist = np.histogram(np.log10(r), bins=bins)
    return LevBoundsStats(eps, delta, reps, float(r.min()), float(r.max()), hist)


def one_component_doubling(model, interval_range, resolution, n_lengths=4, points=64):
    """sup over adjacent equal intervals I, I' (|I| <= resolution) of
    mu(I)/mu(I'), mu = phi'(x) dx.  Interval pairs are centred at ``points``
    equally spaced positions; lengths resolution / 2^j, j < n_lengths."""
    a, b = map(float, interval_range)
    best = 1.0
    for j in range(n_lengths):
        L = resolution / 2 ** j
        cs = np.linspace(a + L, b - L, points)
        edges = np.concatenate([cs - L, cs, cs + L])
        phi = model.phase(edges)
        m1 = phi[points:2 * points] - phi[:points]
        m2 = phi[2 * points:] - phi[points:2 * points]
        best = max(best, float(np.max(np.maximum(m1 / m2, m2 / m1))))
    return best
