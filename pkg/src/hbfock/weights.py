"""Weights W on C for the Fock-type norm int |F W|^2 dm.

Every weight is symmetric under conjugation: W(z) for Im z < 0 is W(conj z).
Internally a weight is stored through its relative form

    omega(z) = W(z) |E(z)|,   z in the closed upper half-plane,

which is what the area quadrature needs (|F W| = |F/E| omega there).  W0 has
omega = 1/(1+y); the other weights multiply it by 1 + (bump), except the
spectral weight, which adds a separate term supported on small discs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from .errors import OutOfCoveredRange, ResolutionExceeded, RootBracketFailure
from .kernels import KernelEval
from .levelset import LevelSetGeometry, d_eps

KINDS = ("W0", "W_main", "W_tilde", "W_one1", "W_one2", "W2", "W_spec")


def _up(z):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return np.where(z.imag < 0, np.conj(z), z)


# -- Whitney-type cover of the real line ------------------------------------------------


@dataclass
class IntervalCover:
    a: np.ndarray
    b: np.ndarray
    dist: np.ndarray
    kappa: float
    L_max: float
    range: tuple
    delta: float

    @property
    def lengths(self):
        return self.b - self.a

    def __len__(self):
        return self.a.size

    def locate(self, x, strict=True):
        """Index of the interval containing each x (-1 outside the range)."""
        x = np.asarray(x, dtype=float)
        i = np.searchsorted(self.b, x, side="left")
        inside = (x >= self.a[0]) & (x <= self.b[-1])
        if strict and not np.all(inside):
            raise OutOfCoveredRange(f"points outside the cover range {self.range}")
        return np.where(inside, np.clip(i, 0, self.a.size - 1), -1)

    def check(self, model):
        """Cover invariants; returns a dict of violation counts."""
        L = self.lengths
        capped = L >= self.L_max * (1 - 1e-12)
        r = L / self.dist
        band_hi = int(np.sum(r > self.kappa * (1 + 1e-9)))
        band_lo = int(np.sum((r < self.kappa / 4 * (1 - 1e-9)) & ~capped))
        nb = L[1:] / L[:-1]
        neighbor = int(np.sum((nb > 4) | (nb < 0.25)))
        contig = int(np.sum(np.abs(self.a[1:] - self.b[:-1]) > 1e-12))
        sq = int(np.sum(~_square_in_complement(model, self.a, self.b, self.delta)))
        return {"band_upper": band_hi, "band_lower": band_lo, "neighbor": neighbor,
                "gaps": contig, "square": sq}

    def rows(self):
        return np.column_stack([self.a, self.b, self.dist])


def _square_in_complement(model, a, b, delta):
    # sampled check S(2I) in {|Theta| >= delta}: 3 x 3 points per square
    c = 0.5 * (a + b)
    L = b - a
    u = np.array([-1.0, 0.0, 1.0])
    v = np.array([0.0, 1.0, 2.0])
    X = c[:, None, None] + L[:, None, None] * u[None, :, None]
    Y = L[:, None, None] * v[None, None, :]
    X, Y = np.broadcast_arrays(X, Y)
    th = model.abs_theta((X + 1j * Y).ravel()).reshape(X.shape)
    return np.all(th >= delta, axis=(1, 2))


def whitney_cover(model, eps, delta, range_, kappa=0.25, L_max=1.0, geometry=None, max_depth=40):
    """Stopping-time dyadic cover of ``range_``: a dyadic interval is bisected
    while |I| > kappa dist(I, Omega_delta) or S(2I) leaves Omega_delta^c."""
    lo, hi = map(float, range_)
    if geometry is None:
        m = 2 * L_max / kappa + 2
        geometry = LevelSetGeometry(model, eps, delta, (lo - m, hi + m))
    k0 = math.floor(lo / L_max)
    k1 = math.ceil(hi / L_max)
    stack = [(k * L_max, (k + 1) * L_max, 0) for k in range(k1 - 1, k0 - 1, -1)]
    out = []
    while stack:
        batch = stack[-256:]
        del stack[-256:]
        A = np.array([s[0] for s in batch])
        B = np.array([s[1] for s in batch])
        dist = _interval_dist(geometry, A, B)
        ok = (B - A <= kappa * dist) & _square_in_complement(model, A, B, delta)
        split = []
        for (a, b, d), good, dv in zip(batch, ok, dist):
            if good:
                out.append((a, b, dv))
            else:
                if d >= max_depth:
                    raise ResolutionExceeded(f"dyadic depth {max_depth} exceeded near x = {a}")
                m = 0.5 * (a + b)
                split.append((m, b, d + 1))
                split.append((a, m, d + 1))
        stack.extend(split)
    out.sort()
    a = np.array([o[0] for o in out])
    b = np.array([o[1] for o in out])
    dist = np.array([o[2] for o in out])
    a, b, dist = _balance(geometry, a, b, dist)
    cov = IntervalCover(a, b, dist, kappa, L_max, (lo, hi), delta)
    return cov


def _interval_dist(geometry, a, b, n=17):
    t = np.linspace(0, 1, n)
    X = a[:, None] + (b - a)[:, None] * t[None, :]
    d = geometry.dist_to_delta(X.ravel().astype(complex)).reshape(X.shape)
    return d.min(axis=1)


def _balance(geometry, a, b, dist):
    # split intervals that are more than 4 times longer than a neighbour
    for _ in range(40):
        L = b - a
        big = np.zeros(a.size, dtype=bool)
        big[:-1] |= L[:-1] > 4 * L[1:]
        big[1:] |= L[1:] > 4 * L[:-1]
        if not np.any(big):
            break
        m = 0.5 * (a[big] + b[big])
        na = np.concatenate([a[~big], a[big], m])
        nb = np.concatenate([b[~big], m, b[big]])
        nd = np.concatenate([dist[~big], _interval_dist(geometry, a[big], m), _interval_dist(geometry, m, b[big])])
        o = np.argsort(na)
        a, b, dist = na[o], nb[o], nd[o]
    return a, b, dist


# -- spectral data ----------------------------------------------------------------------------


@dataclass
class SpectralData:
    nodes: np.ndarray
    mu: np.ndarray
    r: np.ndarray
    range: tuple
    model: object = field(repr=False, default=None)

    def locate(self, z):
        """Index of the disc D(t_n, r_n) containing z (-1 if none)."""
        z = _up(z)
        i = np.clip(np.searchsorted(self.nodes, z.real), 1, self.nodes.size - 1)
        best = np.where(np.abs(z - self.nodes[i - 1]) < np.abs(z - self.nodes[i]), i - 1, i)
        if self.nodes.size == 1:
            best = np.zeros(z.shape, dtype=int)
        inside = np.abs(z - self.nodes[best]) < self.r[best]
        return np.where(inside, best, -1)

    def coefficients(self, F):
        """c_n = F(t_n) / (mu_n^{1/2} A'(t_n)); A'(t_n) = -i phi'(t_n) E(t_n)."""
        fe = F.ratio(self.nodes.astype(complex))
        return 1j * fe * np.sqrt(self.mu)

    def reconstruct(self, F, z, tail=True):
        """F(z)/E(z) = (1 + Theta(z))/2 * sum_n (F/E)(t_n) i mu_n / (z - t_n)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        fe = F.ratio(self.nodes.astype(complex))
        g = 1j * fe * self.mu
        # at a node the sum collapses to the sample itself
        j = np.clip(np.searchsorted(self.nodes, z.real), 0, self.nodes.size - 1)
        hit = (z == self.nodes[j]) | (z == self.nodes[np.maximum(j - 1, 0)])
        out = np.empty(z.shape, dtype=complex)
        if np.any(hit):
            k = np.where(z[hit] == self.nodes[j[hit]], j[hit], np.maximum(j[hit] - 1, 0))
            out[hit] = fe[k]
        zz = z[~hit]
        terms = g[None, :] / (zz[:, None] - self.nodes[None, :])
        s = terms.sum(axis=1)
        if tail:
            s = s + np.array([_tail_sum(self.nodes, terms[k]) for k in range(zz.size)])
        out[~hit] = 0.5 * (1 + self.model.theta(zz)) * s
        return out

    def norm2(self, F, tail=True):
        """pi sum |c_n|^2, with a fitted power-law tail beyond the node range."""
        c2 = np.abs(self.coefficients(F)) ** 2
        total = math.fsum(c2)
        if tail:
            total += _tail_sum(self.nodes, c2).real
        return math.pi * total

    def rn_partial_sums(self, Ns=None):
        """Partial sums over |n| <= N (nodes ordered by |t|) of
        (r_n^2/mu_n) sum_{j != n} mu_j / |t_n - t_j|^2."""
        t, mu, r = self.nodes, self.mu, self.r
        D = (t[:, None] - t[None, :]) ** 2
        np.fill_diagonal(D, np.inf)
        inner = (mu[None, :] / D).sum(axis=1)
        terms = r * r / mu * inner
        order = np.argsort(np.abs(t), kind="stable")
        cs = np.cumsum(terms[order])
        if Ns is None:
            return cs
        return cs[np.minimum(np.asarray(Ns), cs.size) - 1]

    def mass_partial_sums(self):
        order = np.argsort(np.abs(self.nodes), kind="stable")
        return np.cumsum((self.mu / (self.nodes ** 2 + 1))[order])


def _tail_sum(t, terms, exps=(2.0, 3.0, 4.0), fit=64):
    """Sum over the nodes beyond both ends of ``t`` of a power-law fit to the
    last ``fit`` terms on each side; beyond the ends the node gap is frozen at
    its mean over the fitted stretch."""
    total = 0.0
    n = t.size
    if n < 2 * fit + 2:
        return 0.0
    for side in (1, -1):
        if side > 0:
            tt, vv = t[-fit:], terms[-fit:]
        else:
            tt, vv = -t[:fit][::-1], terms[:fit][::-1]
        if tt[-1] <= 0:
            continue
        M = np.stack([tt ** -p for p in exps], axis=1)
        coef, *_ = np.linalg.lstsq(M.astype(complex), vv.astype(complex), rcond=None)
        h = (tt[-1] - tt[0]) / (fit - 1)
        q = tt[-1] / h + 1
        total += sum(c * h ** -p * hurwitz_zeta(p, q) for c, p in zip(coef, exps))
    return total


def spectral_data(model, range_, r0=None, alpha=0.0):
    """Points t with Theta(t) = -exp(2 i alpha) in ``range_`` (alpha = 0: zeros
    of A = (E + E#)/2), masses 1/phi'(t) and disc radii r0/(1+|t|)."""
    lo, hi = map(float, range_)
    target = math.pi / 2 + alpha
    # phase on a grid fine enough that each half-turn is sampled
    xs = _phase_grid(model, lo, hi)
    phi = _cumulative_phase(model, xs)
    ks = np.arange(math.ceil((phi[0] - target) / math.pi), math.floor((phi[-1] - target) / math.pi) + 1)
    levels = target + ks * math.pi
    idx = np.searchsorted(phi, levels)
    if np.any((idx <= 0) | (idx >= xs.size)):
        raise RootBracketFailure("phase level outside the sampled range")
    xa, xb = xs[idx - 1], xs[idx]
    pa, pb = phi[idx - 1], phi[idx]
    t = xa + (levels - pa) * (xb - xa) / (pb - pa)
    # Newton on the principal argument of -Theta(t) exp(-2 i alpha)
    for _ in range(50):
        lt = model.log_theta(t.astype(complex))[0].imag
        g = np.angle(-np.exp(1j * (lt - 2 * alpha)))
        dp = model.phi_prime(t)
        step = g / (2 * dp)
        t = np.clip(t - step, xa, xb)
        if np.max(np.abs(step)) < 1e-15 * (1 + np.max(np.abs(t))):
            break
    res = np.abs(model.theta(t.astype(complex)) + np.exp(2j * alpha))
    if np.any(res > 1e-10):
        raise RootBracketFailure(f"node residual {res.max():.2e} exceeds 1e-10")
    mu = 1.0 / model.phi_prime(t)
    if r0 is None:
        gap = float(np.min(np.diff(t))) if t.size > 1 else 1.0
        r0 = min(0.25, gap / 4)
    r = r0 / (1 + np.abs(t))
    return SpectralData(t, mu, r, (lo, hi), model)


def _phase_grid(model, lo, hi):
    xs = [lo]
    while xs[-1] < hi:
        d = float(model.phi_prime(np.array([xs[-1]]))[0])
        xs.append(min(hi, xs[-1] + min(1.0, 0.5 / d)))
    return np.array(xs)


def _cumulative_phase(model, xs):
    # phi at the grid points: anchor by the phase at the left end, then add
    # 10-point Gauss-Legendre integrals of phi' over consecutive cells
    g, w = np.polynomial.legendre.leggauss(10)
    a, b = xs[:-1], xs[1:]
    pts = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * g[None, :]
    vals = model.phi_prime(pts.ravel()).reshape(pts.shape)
    inc = 0.5 * (b - a) * (vals @ w)
    phi0 = model.phase(xs[0])
    return phi0 + np.concatenate([[0.0], np.cumsum(inc)])


# -- weight fields -------------------------------------------------------------------------------


@dataclass
class WeightField:
    kind: str
    model: object
    eps: Optional[float] = None
    delta: Optional[float] = None
    cover: Optional[IntervalCover] = None
    spectral: Optional[SpectralData] = None
    geometry: Optional[LevelSetGeometry] = None
    strict: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind in ("W_main", "W_one1") and self.delta is None:
            raise ValueError(f"{self.kind} needs delta")
        if self.kind == "W_main" and self.geometry is None:
            raise ValueError("W_main needs a LevelSetGeometry")
        if self.kind == "W_tilde" and self.cover is None:
            raise ValueError("W_tilde needs an IntervalCover")
        if self.kind == "W_spec" and self.spectral is None:
            raise ValueError("W_spec needs SpectralData")
        self._kern = KernelEval(self.model)

    def relative(self, z):
        """omega(z) = W(z)|E(z)| at the reflection of z into the closed upper
        half-plane."""
        w = _up(z)
        y = w.imag
        base = 1.0 / (1.0 + y)
        k = self.kind
        if k == "W0":
            return base
        if k == "W_spec":
            return base + self._spec_term(w)
        return base * (1.0 + self._bump(w))

    def _bump(self, w):
        k = self.kind
        m = self.model
        if k == "W2":
            return np.sqrt(self._kern.knorm2(w))
        if k == "W_one1":
            out = np.zeros(w.shape)
            on = m.abs_theta(w) >= self.delta
            if np.any(on):
                out[on] = np.sqrt(self._kern.knorm2(w[on]))
            return out
        if k == "W_one2":
            dp = m.phi_prime(w.real)
            return np.where(w.imag <= 1.0 / dp, np.sqrt(dp), 0.0)
        if k == "W_main":
            g = self.geometry
            out = np.zeros(w.shape)
            cov = g.covers(w)
            if self.strict and not np.all(cov):
                raise OutOfCoveredRange("points outside the level-set window")
            on = cov & (m.abs_theta(w) >= g.delta)
            if np.any(on):
                d = g.d_eps(w[on])
                out[on] = np.where(d > 0, d ** -0.5, 0.0)
            return out
        if k == "W_tilde":
            c = self.cover
            i = c.locate(w.real, strict=self.strict)
            L = np.where(i >= 0, c.lengths[np.maximum(i, 0)], 0.0)
            return np.where((i >= 0) & (w.imag <= L), L ** -0.5, 0.0)
        raise AssertionError(k)

    def _spec_term(self, w):
        sd = self.spectral
        if self.strict and np.any((w.real < sd.range[0]) | (w.real > sd.range[1])):
            raise OutOfCoveredRange("points outside the spectral node range")
        out = np.zeros(w.shape)
        i = sd.locate(w)
        on = i >= 0
        if np.any(on):
            j = i[on]
            t = sd.nodes[j]
            zz = w[on]
            h = zz - t
            # |z - t_n| |E(z)| / |A(z)| = 2 |z - t_n| / |1 + Theta(z)|;
            # at the node itself this is the limit 1/phi'(t_n)
            th = self.model.theta(zz)
            with np.errstate(invalid="ignore", divide="ignore"):
                q = np.where(h == 0, 1.0 / self.model.phi_prime(t), 2 * np.abs(h) / np.abs(1 + th))
            out[on] = q / (np.sqrt(sd.mu[j]) * sd.r[j])
        return out

    def __call__(self, z):
        """W(z), computed in the log domain."""
        w = _up(z)
        le = self.model.log_E(w)[0].real
        return np.exp(np.log(self.relative(w)) - le)

    def x_breaks(self, lo, hi):
        """Real parts where the weight jumps (cover edges, disc edges)."""
        out = []
        if self.kind == "W_tilde":
            c = self.cover
            sel = (c.a >= lo) & (c.a <= hi)
            out.append(c.a[sel])
        if self.kind == "W_spec":
            sd = self.spectral
            sel = (sd.nodes >= lo - 1) & (sd.nodes <= hi + 1)
            out.extend([sd.nodes[sel] - sd.r[sel], sd.nodes[sel], sd.nodes[sel] + sd.r[sel]])
        if not out:
            return np.zeros(0)
        v = np.concatenate(out)
        return v[(v > lo) & (v < hi)]

    def y_breaks(self, lo, hi):
        """Heights where the weight jumps inside [lo, hi] in x."""
        if self.kind == "W_tilde":
            c = self.cover
            sel = (c.b >= lo) & (c.a <= hi)
            return np.unique(c.lengths[sel])
        return np.zeros(0)

    def split_cells(self, cells):
        """Split quadrature cells (x0, x1, y0, y1) at the top of the spectral
        discs whose x-extent contains them."""
        if self.kind != "W_spec" or len(cells) == 0:
            return cells
        sd = self.spectral
        xc = 0.5 * (cells[:, 0] + cells[:, 1])
        j = np.clip(np.searchsorted(sd.nodes, xc), 1, sd.nodes.size - 1)
        j = np.where(np.abs(xc - sd.nodes[j - 1]) < np.abs(xc - sd.nodes[j]), j - 1, j)
        r = sd.r[j]
        cut = (np.abs(xc - sd.nodes[j]) < r) & (cells[:, 2] < r) & (cells[:, 3] > r)
        if not np.any(cut):
            return cells
        lo = cells[cut].copy()
        hi = cells[cut].copy()
        lo[:, 3] = r[cut]
        hi[:, 2] = r[cut]
        return np.concatenate([cells[~cut], lo, hi])


# -- single-point operations ---------------------------------------------------------------


def w0(model, z):
    return WeightField("W0", model)(z)


def w_main(model, z, eps, delta):
    """W0(z)(1 + d_eps(z)^{-1/2} 1[|Theta(z)| >= delta]) with the certified
    single-point distance."""
    w = complex(_up(z)[0])
    base = float(w0(model, w)[0])
    if float(model.abs_theta(w)[()]) < delta:
        return base
    return base * (1 + d_eps(model, w, eps) ** -0.5)


def w_tilde(model, z, cover):
    return WeightField("W_tilde", model, cover=cover, strict=True)(z)


def w_one1(model, z, delta):
    return WeightField("W_one1", model, delta=delta)(z)


def w_one2(model, z):
    return WeightField("W_one2", model)(z)


def w2(model, z):
    return WeightField("W2", model)(z)


def w_spec(model, z, data):
    return WeightField("W_spec", model, spectral=data, strict=True)(z)
