"""Tile-wise local expansions of log Theta for fast bulk evaluation.

The closed upper half-plane is tiled by squares: a bottom row of side s0 on
[0, s0), then for y in [s0 2^(j-1), s0 2^j) two rows of squares of half that
height.  On a tile with centre c and circumradius rho, zeros z_n and poles
conj(z_n) within 2.5 rho of c are kept as explicit Blaschke factors; the
remaining factor G is analytic and zero-free on that disc, so log G has a
Taylor expansion converging geometrically on the tile.  Its coefficients come
from an FFT of log G sampled on the circle |z - c| = 1.25 rho after removing
the first-order Taylor predictor (which keeps the sampled argument free of
2 pi ambiguities).  Each tile is validated against direct evaluation at two
points and falls back to direct evaluation when validation fails.
"""
import math

import numpy as np

_M = 64
_NEAR_CAP = 600
_VALIDATE = 1e-9
_MIN_POINTS = 2 * _M


class _Tile:
    __slots__ = ("c", "R", "coef", "near", "direct", "p0", "p1")


class LocalTheta:
    def __init__(self, model, direct, s0=1.0):
        self.model = model
        self.direct = direct  # callable: z (C+, 1-d) -> (log Theta, err)
        self.s0 = float(s0)
        self.tiles = {}
        self.seen = {}
        self.n_built = 0
        self.n_fallback = 0

    # -- tiling --------------------------------------------------------------
    def _keys(self, z):
        s0 = self.s0
        y = z.imag
        band = np.where(y < s0, 0, np.floor(np.log2(np.maximum(y, s0) / s0)).astype(int) + 1)
        ylo = np.where(band == 0, 0.0, s0 * 2.0 ** (band - 1))
        size = np.where(band == 0, s0, s0 * 2.0 ** (band - 2))
        iy = np.floor((y - ylo) / size).astype(int)
        ix = np.floor(z.real / size).astype(np.int64)
        return band, iy, ix, ylo, size

    def _build(self, band, iy, ix, ylo, size):
        c0 = complex((ix + 0.5) * size, ylo + (iy + 0.5) * size)
        rho = size / math.sqrt(2.0)
        # a zero sitting exactly on a sample point spoils the expansion, so
        # retry with a slightly shifted centre
        for shift in (0.0, 0.0137 + 0.0071j, -0.0093 + 0.0119j):
            t = self._expand(c0 + shift * rho, rho)
            if not t.direct:
                break
        self.n_built += 1
        if t.direct:
            self.n_fallback += 1
        return t

    def _expand(self, c, rho):
        t = _Tile()
        R = 1.25 * rho
        m = self.model
        near = m.nearby_zeros(c, 2.5 * rho)
        nearc = m.nearby_zeros(c.conjugate(), 2.5 * rho)
        near = np.unique(np.concatenate([near, nearc]))
        t.c, t.R, t.near, t.direct = c, R, near, True
        if near.size > _NEAR_CAP:
            return t
        w = np.exp(2j * np.pi * np.arange(_M) / _M)
        h = 1e-5 * rho
        pts = np.concatenate([c + R * w, [c, c + h, c - h]])
        with np.errstate(invalid="ignore"):
            lg = self._direct_any(pts) - self._near_log(pts, near)
        if not np.all(np.isfinite(lg)):
            return t
        l0 = lg[_M]
        dlog = lg[_M + 1] - lg[_M + 2]
        dlog = complex(dlog.real, math.remainder(dlog.imag, 2 * math.pi))
        d = dlog / (2 * h)
        pred = l0 + d * (pts[:_M] - c)
        res = lg[:_M] - pred
        res = res.real + 1j * np.unwrap(res.imag)
        coef = np.fft.fft(res) / _M
        # the residual vanishes at the centre; the k = 0 coefficient is the
        # branch offset of the unwrapped samples, rounded to a multiple of 2 pi
        off = coef[0]
        coef[0] = complex(off.real, off.imag - 2 * math.pi * round(off.imag / (2 * math.pi)))
        t.coef = coef
        t.p0, t.p1 = l0, d
        # validation against direct evaluation inside the tile
        chk = np.array([c + 0.6 * rho * complex(0.6, -0.8), c + 0.95 * rho * complex(-0.8, 0.6)])
        chk = np.where(chk.imag < 0, chk.real + 0j, chk)
        ref = self.direct(chk)[0]
        got = self._eval_tile(t, chk)
        with np.errstate(invalid="ignore"):
            err = np.abs(np.exp(ref) - np.exp(got))
        t.direct = not (np.all(np.isfinite(got)) and np.all(err <= _VALIDATE))
        return t

    def _direct_any(self, pts):
        # direct evaluation on both half-planes via reflection
        low = pts.imag < 0
        w = np.where(low, np.conj(pts), pts)
        v = self.direct(w)[0]
        return np.where(low, -np.conj(v), v)

    @staticmethod
    def _near_log(z, near):
        if near.size == 0:
            return np.zeros(z.shape, dtype=complex)
        r = (z[:, None] - near[None, :]) / (z[:, None] - np.conj(near)[None, :])
        # a single log of the product; only the imaginary part modulo 2 pi matters
        with np.errstate(divide="ignore"):
            return np.log(np.prod(r, axis=1))

    def _eval_tile(self, t, z):
        u = (z - t.c) / t.R
        acc = np.zeros(z.shape, dtype=complex)
        for a in t.coef[::-1]:
            acc = acc * u + a
        return t.p0 + t.p1 * (z - t.c) + acc + self._near_log(z, t.near)

    # -- public -------------------------------------------------------------
    def log_theta(self, z):
        """log Theta on the closed upper half-plane (imaginary part modulo 2 pi)."""
        z = np.asarray(z, dtype=complex)
        band, iy, ix, ylo, size = self._keys(z)
        code = (ix * 64 + band) * 4 + iy
        order = np.argsort(code, kind="stable")
        sc = code[order]
        starts = np.flatnonzero(np.r_[True, sc[1:] != sc[:-1]])
        ends = np.r_[starts[1:], sc.size]
        out = np.empty(z.shape, dtype=complex)
        direct_idx = []
        for a, b in zip(starts, ends):
            idx = order[a:b]
            key = int(sc[a])
            t = self.tiles.get(key)
            if t is None:
                # building costs about 2 _M direct evaluations; wait until the
                # tile has been asked for enough points to pay for it
                seen = self.seen.get(key, 0) + idx.size
                if seen < _MIN_POINTS:
                    self.seen[key] = seen
                    direct_idx.append(idx)
                    continue
                j = idx[0]
                t = self._build(int(band[j]), int(iy[j]), int(ix[j]), float(ylo[j]), float(size[j]))
                self.tiles[key] = t
            if t.direct:
                direct_idx.append(idx)
            else:
                out[idx] = self._eval_tile(t, z[idx])
        if direct_idx:
            idx = np.concatenate(direct_idx)
            out[idx] = self.direct(z[idx])[0]
        return out
