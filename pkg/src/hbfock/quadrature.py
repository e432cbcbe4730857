"""Line norms int |F/E|^2 dx, area norms int |F W|^2 dm, inner products and
Carleson box sums.

Unbounded domains are split into a core around the bulk of the integrand and
doubling shells.  Shell contributions c_k of a power-law tail form a nearly
geometric sequence, so after each shell the remainder is estimated as
c_k q/(1 - q) with q = c_k/c_{k-1}; the spread of that estimate between
consecutive shells is its error, and shells are added until it is below
tolerance.
"""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._adaptive import integrate_1d, integrate_2d
from .errors import NonConvergent


@dataclass
class NormReport:
    value: float
    abs_error_estimate: float
    truncation_radius: float
    n_cells: int
    converged: bool
    n_evals: int = 0
    tail: float = 0.0

    def row(self):
        return asdict(self)


@dataclass
class CarlesonReport:
    squares: list
    ratios: np.ndarray
    max_ratio: float
    measure: str
    errors: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def rows(self):
        return [(a, b, r) for (a, b), r in zip(self.squares, self.ratios)]


def write_csv(path, reports, header=None):
    """Write NormReports (or plain row tuples) to ``path``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if reports and isinstance(reports[0], NormReport):
            keys = list(reports[0].row())
            w.writerow(keys)
            for r in reports:
                w.writerow([r.row()[k] for k in keys])
        else:
            if header:
                w.writerow(header)
            w.writerows(reports)


# -- panel layout ----------------------------------------------------------------------


def line_breaks(model, lo, hi, center=0.0, max_panels=200_000):
    """Panel breaks on [lo, hi] resolving the local oscillation scale 1/phi'
    and the peaks of phi' at zeros close to the line."""
    if hi <= lo:
        return np.array([lo, hi])
    # coarse grid, widening away from the centre
    xs = [lo]
    while xs[-1] < hi:
        xs.append(min(hi, xs[-1] + max(0.5, 0.02 * abs(xs[-1] - center))))
    xs = np.array(xs)
    if model is None:
        return xs
    dp = model.phi_prime(xs)
    peak = np.maximum(dp[:-1], dp[1:])
    n = np.clip(np.ceil(np.diff(xs) * peak / 2.0), 1, None).astype(int)
    if n.sum() > max_panels:
        n = np.maximum(1, (n * max_panels / n.sum()).astype(int))
    pieces = [np.linspace(a, b, k + 1)[:-1] for a, b, k in zip(xs[:-1], xs[1:], n)]
    out = np.concatenate(pieces + [np.array([hi])])
    return np.unique(np.concatenate([out, _zero_breaks(model, lo, hi)]))


def _zero_breaks(model, lo, hi):
    if model is None or model.zeros.kind == "pw-exponential" or hi - lo > 1e5:
        return np.zeros(0)
    pts = model.nearby_zeros(0.5 * (lo + hi) + 0j, 0.5 * (hi - lo) + 1.0)
    pts = pts[(pts.imag < 1.0) & (pts.real > lo) & (pts.real < hi)]
    offs = np.array([-8, -4, -2, -1, 0, 1, 2, 4, 8], dtype=float)
    b = (pts.real[:, None] + pts.imag[:, None] * offs[None, :]).ravel()
    return b[(b > lo) & (b < hi)]


# -- shells with geometric extrapolation -----------------------------------------------


class _Shells:
    def __init__(self, tol_rel, tol_abs, max_shells=40, decay_q=0.95):
        self.tol_rel = tol_rel
        self.tol_abs = tol_abs
        self.max_shells = max_shells
        self.decay_q = decay_q
        self.parts = []
        self.errs = []
        self.cells = 0
        self.evals = 0

    def add(self, res):
        self.parts.append(res.value)
        self.errs.append(res.error)
        self.cells += res.n_cells
        self.evals += res.n_evals
        return res.converged

    def total(self):
        return sum(self.parts)

    def remainder(self):
        """(estimate, uncertainty) of the sum of all later shells.  The
        extrapolated totals after each of the last three shells are compared;
        their spread is the uncertainty."""
        c = self.parts
        if len(c) < 5:
            return 0.0, math.inf
        totals = []
        rem = None
        for k in (0, 1, 2):
            n = len(c) - k
            a, b = c[n - 1], c[n - 2]
            if b == 0:
                r = 0.0
            else:
                q = a / b
                if abs(q) >= self.decay_q:
                    return 0.0, math.inf
                r = a * q / (1 - q)
            if rem is None:
                rem = r
            totals.append(sum(c[:n]) + r)
        spread = max(abs(totals[0] - totals[1]), abs(totals[1] - totals[2]))
        return rem, spread

    def done(self):
        est, unc = self.remainder()
        tot = abs(self.total() + est)
        return unc <= 0.3 * max(self.tol_abs, self.tol_rel * tot), est, unc

    def budget(self):
        tot = abs(self.total())
        return max(self.tol_abs, 0.25 * self.tol_rel * tot)


def _line_integral(h, model, center, scale, tol_rel, tol_abs, max_radius, max_evals):
    R = max(8.0, 16.0 * scale)
    sh = _Shells(tol_rel, tol_abs)
    br = line_breaks(model, center - R, center + R, center)
    res = integrate_1d(h, br, tol_abs=tol_abs, tol_rel=0.25 * tol_rel, max_evals=max_evals)
    conv = sh.add(res)
    while True:
        ok, est, unc = sh.done()
        if ok:
            break
        if 2 * R > max_radius or len(sh.parts) > sh.max_shells:
            if not np.isfinite(unc):
                raise NonConvergent(f"line integrand fails the decay monitor at radius {R:.3g}")
            conv = False
            break
        bl = line_breaks(model, center - 2 * R, center - R, center)
        brr = line_breaks(model, center + R, center + 2 * R, center)
        res_l = integrate_1d(h, bl, tol_abs=sh.budget(), tol_rel=0.0, max_evals=max_evals)
        res_r = integrate_1d(h, brr, tol_abs=sh.budget(), tol_rel=0.0, max_evals=max_evals)
        res_l.value += res_r.value
        res_l.error += res_r.error
        res_l.n_cells += res_r.n_cells
        res_l.n_evals += res_r.n_evals
        res_l.converged = res_l.converged and res_r.converged
        conv = sh.add(res_l) and conv
        R *= 2
    total = sh.total() + est
    err = sum(sh.errs) + (unc if np.isfinite(unc) else abs(est))
    return total, err, R, sh.cells, conv, sh.evals, est


def line_norm2(F, model=None, tol_rel=1e-8, tol_abs=1e-15, max_radius=1e7, max_evals=4_000_000):
    """int_R |F(x)/E(x)|^2 dx."""
    model = model if model is not None else F.model
    c, s = F.line_profile()

    def h(x):
        return F.ratio_abs(x.astype(complex)) ** 2

    v, e, R, n, conv, ev, tail = _line_integral(h, model, c, s, tol_rel, tol_abs, max_radius, max_evals)
    return NormReport(float(np.real(v)), float(e), R, n, conv, ev, float(np.real(tail)))


def inner_product_line(F, G, model=None, tol_rel=1e-8, tol_abs=1e-15, max_radius=1e7,
                       max_evals=4_000_000):
    """<F, G> = int_R (F/E)(x) conj((G/E)(x)) dx, with its error estimate."""
    model = model if model is not None else F.model
    c1, s1 = F.line_profile()
    c2, s2 = G.line_profile()
    c = 0.5 * (c1 + c2)
    s = max(s1, s2, 0.5 * abs(c1 - c2))

    def h(x):
        z = x.astype(complex)
        return F.ratio(z) * np.conj(G.ratio(z))

    v, e, *_ = _line_integral(h, model, c, s, tol_rel, tol_abs, max_radius, max_evals)
    return complex(v), float(e)


# -- area integrals ----------------------------------------------------------------------


def _y_levels(y0, y1, dp):
    lv = {y0, y1}
    k = 1
    while 2 ** k - 1 < y1:
        if 2 ** k - 1 > y0:
            lv.add(2.0 ** k - 1)
        k += 1
    # geometric levels resolving the decay scale 1/phi' next to the axis
    t = 0.25 / dp
    while t < min(1.0, y1):
        if t > y0:
            lv.add(t)
        t *= 2
    return np.array(sorted(lv))


def _thin(b, gap):
    out = [b[0]]
    for v in b[1:-1]:
        if v - out[-1] >= gap:
            out.append(v)
    if b[-1] - out[-1] < 0.5 * gap and len(out) > 1:
        out[-1] = b[-1]
    else:
        out.append(b[-1])
    return np.array(out)


def _rect_cells(model, W, x0, x1, y0, y1, dp, extra_y=()):
    ys = _y_levels(y0, y1, dp)
    if len(extra_y):
        e = np.asarray(extra_y, dtype=float)
        ys = np.unique(np.concatenate([ys, e[(e > y0) & (e < y1)]]))
    xb = line_breaks(model, x0, x1, 0.5 * (x0 + x1))
    if W is not None:
        xb = np.unique(np.concatenate([xb, W.x_breaks(x0, x1)]))
    cells = []
    for ya, yb in zip(ys[:-1], ys[1:]):
        gap = max(yb - ya, 0.5 * yb)
        xs = _thin(xb, gap) if gap > 0 else xb
        for xa, xc in zip(xs[:-1], xs[1:]):
            cells.append((xa, xc, ya, yb))
    cells = np.array(cells)
    if W is not None:
        cells = W.split_cells(cells)
    return cells


def area_norm2(F, W, tol_rel=1e-4, tol_abs=1e-15, max_radius=1e6, max_evals=6_000_000,
               center=None, scale=None):
    """int_C |F(z) W(z)|^2 dm(z), as the integral over the upper half-plane of
    (|F/E|^2 + |F#/E|^2) omega^2 with omega = W|E|."""
    model = W.model
    c, s = F.line_profile()
    if center is not None:
        c = center
    if scale is not None:
        s = scale

    def h(x, y):
        z = x + 1j * y
        om = W.relative(z)
        return (F.ratio_abs(z) ** 2 + F.ratio_sharp_abs(z) ** 2) * om * om

    return _area(h, model, W, c, s, tol_rel, tol_abs, max_radius, max_evals)


def _area(h, model, W, c, s, tol_rel, tol_abs, max_radius, max_evals):
    dp = float(model.phi_prime(np.array([c]))[0]) if model is not None else 1.0
    R = max(4.0, 8.0 * s)
    ey = W.y_breaks(c - R, c + R) if W is not None else ()
    cells = _rect_cells(model, W, c - R, c + R, 0.0, R, dp, ey)
    sh = _Shells(tol_rel, tol_abs)
    res = integrate_2d(h, cells, tol_abs=tol_abs, tol_rel=0.25 * tol_rel, max_evals=max_evals)
    conv = sh.add(res)
    while True:
        ok, est, unc = sh.done()
        if ok:
            break
        if 2 * R > max_radius or len(sh.parts) > sh.max_shells:
            if not np.isfinite(unc):
                raise NonConvergent(f"area integrand fails the decay monitor at radius {R:.3g}")
            conv = False
            break
        R2 = 2 * R
        parts = []
        for (x0, x1, y0, y1) in ((c - R2, c - R, 0.0, R2), (c + R, c + R2, 0.0, R2), (c - R, c + R, R, R2)):
            ey = W.y_breaks(x0, x1) if W is not None else ()
            parts.append(_rect_cells(model, W, x0, x1, y0, y1, dp, ey))
        res = integrate_2d(h, np.concatenate(parts), tol_abs=sh.budget(), tol_rel=0.0, max_evals=max_evals)
        conv = sh.add(res) and conv
        R = R2
    total = sh.total() + est
    err = sum(sh.errs) + (unc if np.isfinite(unc) else abs(est))
    return NormReport(float(np.real(total)), float(err), R, sh.cells, conv, sh.evals, float(np.real(est)))


def area_integral(h, model, center=0.0, scale=1.0, W=None, tol_rel=1e-4, tol_abs=1e-15,
                  max_radius=1e6, max_evals=6_000_000):
    """int over the upper half-plane of a vectorized density h(x, y)."""
    return _area(h, model, W, center, scale, tol_rel, tol_abs, max_radius, max_evals)


# -- Carleson boxes ------------------------------------------------------------------------


def dyadic_intervals(lo, hi, min_length):
    """All dyadic intervals [k 2^j, (k+1) 2^j] inside [lo, hi] with length
    between ``min_length`` and hi - lo."""
    out = []
    L = 2.0 ** math.floor(math.log2(hi - lo))
    while L >= min_length:
        k0 = math.ceil(lo / L)
        k = k0
        while (k + 1) * L <= hi:
            out.append((k * L, (k + 1) * L))
            k += 1
        L /= 2
    return out


def carleson_test(geometry, squares, density=None, tol_rel=1e-3, measure="d_eps^-1 1[Omega_delta^c]",
                  max_evals=2_000_000):
    """mu(S(I))/|I| for each I = (a, b) whose Carleson square meets Omega_eps.

    The default density is 1/d_eps on the complement of Omega_delta."""
    model = geometry.model
    if density is None:
        def density(x, y):
            z = x + 1j * y
            out = np.zeros(z.shape)
            on = model.abs_theta(z) >= geometry.delta
            if np.any(on):
                d = geometry.d_eps(z[on])
                out[on] = np.where(d > 0, 1.0 / d, 0.0)
            return out

    b = geometry.boundary("eps")
    xs, ylo = b.xs, b.ylo
    min_len = min((bb - a for a, bb in squares), default=0.0)
    memo = {}

    def piece(a, bb, y0, y1):
        # mu over [a, bb] x [y0, y1], integrated once
        key = (a, bb, y0, y1)
        if key not in memo:
            dp = float(np.max(model.phi_prime(np.linspace(a, bb, 9))))
            cells = _rect_cells(model, None, a, bb, y0, y1, dp)
            r = integrate_2d(density, cells, tol_abs=1e-12 * (bb - a), tol_rel=tol_rel, max_evals=max_evals)
            memo[key] = (r.value.real, r.error)
        return memo[key]

    def square(a, bb):
        # S(I) is the union of the squares over the two halves of I and the
        # block I x [|I|/2, |I|]; recurse down to the smallest requested length
        L = bb - a
        if L < 2 * min_len * (1 - 1e-12):
            return piece(a, bb, 0.0, L)
        m = 0.5 * (a + bb)
        v1, e1 = square(a, m)
        v2, e2 = square(m, bb)
        v3, e3 = piece(a, bb, 0.5 * L, L)
        return v1 + v2 + v3, e1 + e2 + e3

    kept, ratios, errs = [], [], []
    for (a, bb) in squares:
        L = bb - a
        sel = (xs >= a) & (xs <= bb) & np.isfinite(ylo)
        if not np.any(ylo[sel] < L):
            continue
        v, e = square(a, bb)
        kept.append((a, bb))
        ratios.append(v / L)
        errs.append(e / L)
    ratios = np.array(ratios)
    if ratios.size and not np.all(np.isfinite(ratios) & (ratios >= 0)):
        raise NonConvergent("Carleson ratios must be finite and nonnegative")
    mx = float(ratios.max()) if ratios.size else 0.0
    return CarlesonReport(kept, ratios, mx, measure, np.array(errs))
