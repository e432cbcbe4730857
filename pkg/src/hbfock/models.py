"""Hermite-Biehler functions built from zero data.

The zeros of E are the conjugates of the points z_n stored in a ZeroFamily
(so every z_n lies in the upper half-plane).  A HermiteBiehlerModel evaluates

    Theta = E#/E,   log E,   phi'(x) = a + sum y_n / |x - conj(z_n)|^2

through the compiled summation engine in ``_engine``.  Values in the closed
upper half-plane are computed directly; the lower half-plane is reached by
reflection, Theta(z) = 1/conj(Theta(conj z)) and E(z) = conj(E#(conj z)).

Normalization.  Finite lists use E(z) = e^{-i a z} prod c_n (z - conj z_n)
with |c_n| = 1 chosen so that each factor of E#/E is real and positive at
z = i.  The infinite families use the product prod (1 - z/conj z_n) over
|n| <= R with the pairing n <-> -n.  Theta differs from the normalized
meromorphic form only by a unimodular constant, which no norm sees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _engine as en
from ._adaptive import integrate_1d
from ._local import LocalTheta
from .errors import InvalidIndex, PoleHit, TailNotConvergent

_LOCAL_MIN = 512

FAMILIES = ("finite-list", "pw-exponential", "power-family", "ls-family", "custom-generator")


@dataclass(frozen=True)
class Truncation:
    """N_max explicit symmetric terms for single evaluations; field
    evaluations (weights, quadrature) use ``head`` explicit terms plus the
    window around the nearest zero index.  tail_tol is the relative target
    for tail corrections."""
    N_max: int = 100_000
    tail_tol: float = 1e-6
    head: int = 32
    window: int = 20


@dataclass(frozen=True)
class ZeroFamily:
    kind: str
    points: tuple = ()
    a: float = 0.0
    alpha: float = 0.0
    delta: float = 0.0
    generator: Optional[Callable] = None
    x_exponent: float = 0.0
    y_exponent: float = 0.0
    n_explicit: int = 4096

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "finite-list":
            pts = np.asarray(self.points, dtype=complex)
            if pts.size and np.any(pts.imag <= 0):
                raise ValueError("finite-list points must lie strictly in the upper half-plane")
        if self.kind == "pw-exponential" and not self.a > 0:
            raise ValueError("pw-exponential needs a > 0")
        if self.kind == "power-family" and not 0.5 < self.alpha < 1:
            raise ValueError("power-family needs 1/2 < alpha < 1")
        if self.kind == "ls-family" and not 0 < self.delta < 1:
            raise ValueError("ls-family needs 0 < delta < 1")
        if self.kind == "custom-generator":
            if self.generator is None:
                raise ValueError("custom-generator needs a generator")
            if not self.x_exponent > 0:
                raise ValueError("custom-generator needs a positive x_exponent")
            if self.y_exponent + 2 * self.x_exponent <= 1:
                raise TailNotConvergent(
                    "declared exponents give sum y_n/(1+|z_n|^2) = sum n^-(py+2px) divergent")

    @classmethod
    def finite(cls, points):
        return cls("finite-list", points=tuple(complex(p) for p in points))

    @classmethod
    def pw(cls, a):
        return cls("pw-exponential", a=float(a))

    @classmethod
    def power(cls, alpha):
        return cls("power-family", alpha=float(alpha))

    @classmethod
    def ls(cls, delta):
        return cls("ls-family", delta=float(delta))

    @classmethod
    def custom(cls, generator, x_exponent, y_exponent, n_explicit=4096):
        """``generator(n)`` maps an integer array (n != 0) to the points z_n;
        beyond |n| = n_explicit the tail is modelled as
        z_n ~ c_x |n|^px sign(n) + i c_y |n|^-py with constants fitted at the
        last explicit index."""
        return cls("custom-generator", generator=generator, x_exponent=float(x_exponent),
                   y_exponent=float(y_exponent), n_explicit=int(n_explicit))

    @property
    def infinite(self):
        return self.kind in ("power-family", "ls-family", "custom-generator")

    def point(self, n):
        """z_n for integer n (n = 0 is the isolated point i for the two
        named infinite families)."""
        n = int(n)
        if self.kind == "finite-list":
            if not 0 <= n < len(self.points):
                raise InvalidIndex(f"index {n} outside 0..{len(self.points) - 1}")
            return self.points[n]
        if self.kind == "pw-exponential":
            raise InvalidIndex("pw-exponential has no zeros")
        if self.kind == "power-family":
            if n == 0:
                return 1j
            return complex(math.copysign(abs(n) ** self.alpha, n), 1.0)
        if self.kind == "ls-family":
            if n == 0:
                return 1j
            d = self.delta
            return complex(n - d if n > 0 else n + d, abs(n) ** (-4 * d))
        if n == 0:
            raise InvalidIndex("custom generators are indexed by n != 0")
        return complex(np.asarray(self.generator(np.array([n])))[0])

    def enumerate(self, nmax):
        """Indices and points with |n| <= nmax (all points for finite lists)."""
        if self.kind == "finite-list":
            return np.arange(len(self.points)), np.asarray(self.points, dtype=complex)
        if self.kind == "pw-exponential":
            return np.zeros(0, dtype=int), np.zeros(0, dtype=complex)
        n = np.arange(-nmax, nmax + 1)
        if self.kind == "custom-generator":
            n = n[n != 0]
            return n, np.asarray(self.generator(n), dtype=complex)
        a = np.abs(n).astype(float)
        if self.kind == "power-family":
            z = np.sign(n) * a ** self.alpha + 1j
        else:
            d = self.delta
            with np.errstate(divide="ignore"):
                z = n - np.sign(n) * d + 1j * np.where(n == 0, 1.0, a) ** (-4 * d)
        z[n == 0] = 1j
        return n, z


class HermiteBiehlerModel:
    """Immutable evaluator for E, E#, Theta and phi'."""

    def __init__(self, zeros: ZeroFamily, a_phase: float = 0.0, tau: Optional[float] = None,
                 truncation: Truncation = Truncation(), name: str = ""):
        if zeros.kind == "pw-exponential":
            a_phase = zeros.a
        if tau is None:
            tau = 2.0 * a_phase
        if a_phase < 0 or abs(tau - 2.0 * a_phase) > 1e-12 * (1 + tau):
            raise ValueError("need a_phase >= 0 and tau = 2 a_phase")
        if truncation.head <= truncation.window:
            raise ValueError("truncation head must exceed the window half-width")
        self.zeros = zeros
        self.a_phase = float(a_phase)
        self.tau = float(tau)
        self.truncation = truncation
        self.name = name or zeros.kind
        self._setup()

    def _setup(self):
        z = self.zeros
        self._merom = z.kind == "finite-list"
        self._t0 = 1
        self._code = 0
        self._p = np.zeros(6)
        iso = []
        if z.kind == "finite-list":
            iso = list(z.points)
        elif z.kind in ("power-family", "ls-family"):
            iso = [1j]
            self._code = en.POWER if z.kind == "power-family" else en.LS
            self._p[0] = z.alpha if z.kind == "power-family" else z.delta
        elif z.kind == "custom-generator":
            N = z.n_explicit
            n, pts = z.enumerate(N)
            if np.any(pts.imag <= 0):
                raise ValueError("generator produced points outside the upper half-plane")
            iso = list(pts)
            zp = pts[n == N][0]
            zm = pts[n == -N][0]
            px, py = z.x_exponent, z.y_exponent
            if zp.real <= 0 or zm.real >= 0:
                raise TailNotConvergent("generator tail must have sign(Re z_n) = sign(n)")
            self._p[:] = [zp.real / N ** px, zp.imag * N ** py,
                          -zm.real / N ** px, zm.imag * N ** py, px, py]
            self._code = en.POWERLAW
            self._t0 = N + 1
        self._iso = np.asarray(iso, dtype=complex)
        self._local = None
        if self._code:
            self._local = LocalTheta(self, lambda w: self._run(en.THETA, w, None))
        self._P, self._q, self._S = en.moment_table(self._code, self._p)
        if self._code and not np.all(np.isfinite(self._P[:, 1:8])):
            raise TailNotConvergent("moment integrals of the zero tail diverge")

    def __repr__(self):
        return f"HermiteBiehlerModel({self.name}, a_phase={self.a_phase})"

    # -- raw engine access -------------------------------------------------
    def _run(self, kind, z, explicit):
        tr = self.truncation
        head = tr.head if explicit is None else max(int(explicit), tr.head)
        z = np.ascontiguousarray(np.atleast_1d(np.asarray(z, dtype=complex)).ravel())
        if self._code and z.size and np.max(np.abs(z.real)) > 1e12:
            raise TailNotConvergent("evaluation point beyond the supported index range")
        rfar = 2.0 if tr.tail_tol >= 1e-9 else 4.0
        return en.evaluate(kind, z, self._code, self._p, self._t0, head, tr.window,
                           self._iso, self._merom, self.a_phase, self._P, self._S, rfar)

    def _check_pole(self, zl):
        # zl: points in the lower half-plane; a pole of Theta sits at conj(z_n)
        if zl.size == 0:
            return
        d = self.d0(np.conj(zl))
        bad = d <= 1e-13 * (1 + np.abs(zl))
        if np.any(bad):
            raise PoleHit(f"point {zl[bad][0]} is a zero of E")

    # -- public evaluators ---------------------------------------------------
    def log_theta(self, z, explicit=None):
        """log Theta(z) (imaginary part modulo 2 pi) and an absolute error
        estimate.  Vectorized; any z not at a pole."""
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        zf = z.ravel()
        low = zf.imag < 0
        w = np.where(low, np.conj(zf), zf)
        if np.any(low):
            self._check_pole(zf[low])
        if explicit is None and self._local is not None and w.size >= _LOCAL_MIN:
            v = self._local.log_theta(w)
            e = np.full(w.shape, 1e-9)
        else:
            v, e = self._run(en.THETA, w, explicit)
        v = np.where(low, -np.conj(v), v)
        return v.reshape(shape), e.reshape(shape)

    def theta(self, z, explicit=None):
        return np.exp(self.log_theta(z, explicit)[0])

    def abs_theta(self, z, explicit=None):
        return np.exp(self.log_theta(z, explicit)[0].real)

    def one_minus_abs_theta2(self, z, explicit=None):
        """1 - |Theta(z)|^2 without cancellation, for Im z >= 0."""
        lt = self.log_theta(z, explicit)[0]
        return -np.expm1(2.0 * lt.real)

    def log_E(self, z, explicit=None):
        """log E(z) with continuous argument on the closed upper half-plane,
        and an absolute error estimate."""
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        zf = z.ravel()
        low = zf.imag < 0
        w = np.where(low, np.conj(zf), zf)
        v, e = self._run(en.LOGE, w, explicit)
        if np.any(low):
            lt, et = self._run(en.THETA, w[low], explicit)
            v = v.astype(complex)
            v[low] = np.conj(v[low] + lt)
            e = e.copy()
            e[low] += et
        return v.reshape(shape), e.reshape(shape)

    def E(self, z, explicit=None):
        return np.exp(self.log_E(z, explicit)[0])

    def E_sharp(self, z, explicit=None):
        z = np.asarray(z, dtype=complex)
        return np.conj(self.E(np.conj(z), explicit))

    def dphi(self, x, explicit=None):
        """phi'(x) and an absolute error estimate."""
        x = np.asarray(x, dtype=float)
        v, e = self._run(en.DPHI, x.ravel().astype(complex), explicit)
        return v.real.reshape(x.shape), e.reshape(x.shape)

    def phi_prime(self, x, explicit=None):
        return self.dphi(x, explicit)[0]

    def phase(self, x, tol=1e-10):
        """Continuous increasing phase phi(x) = -arg E(x), anchored at x = 0
        by arg E(0) and extended by integrating phi'."""
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        phi0 = -self.log_E(0.0)[0].imag
        # one cumulative integral of phi' through all requested points and 0
        pts = np.unique(np.concatenate([xs.ravel(), [0.0]]))
        if pts.size == 1:
            return np.full(np.shape(x), phi0) if np.ndim(x) else float(phi0)
        brk = np.unique(np.concatenate([_phase_breaks(self, pts[0], pts[-1]), pts]))
        _, (pa, pb, pv) = integrate_1d(lambda t: self.phi_prime(t), brk, tol_abs=tol, tol_rel=tol, panels=True)
        cum = np.concatenate([[0.0], np.cumsum(np.real(pv))])
        ends = np.concatenate([[pa[0]], pb])
        at = cum[np.searchsorted(ends, pts)]
        at = at - at[np.searchsorted(pts, 0.0)] + phi0
        out = at[np.searchsorted(pts, xs.ravel())].reshape(xs.shape)
        return out.reshape(np.shape(x)) if np.ndim(x) else float(out[0])

    # -- zero geometry -----------------------------------------------------------
    def nearby_zeros(self, z, radius):
        """All points z_n with |z - z_n| <= radius (exact enumeration using
        monotonicity of the branch real parts)."""
        z = complex(z)
        pts = [p for p in self._iso if abs(p - z) <= radius]
        if self._code:
            for s in (1.0, -1.0):
                lo = en.index_of(self._code, s, z.real - radius, self._p)
                hi = en.index_of(self._code, s, z.real + radius, self._p)
                if s < 0:
                    lo, hi = hi, lo
                t0 = max(self._t0, int(math.floor(lo)) - 1)
                t1 = int(math.ceil(hi)) + 1
                if t1 < t0:
                    continue
                t = np.arange(t0, t1 + 1, dtype=float)
                zz = np.array([en.zeta(self._code, s, tt, self._p) for tt in t])
                pts.extend(zz[np.abs(zz - z) <= radius])
        return np.asarray(pts, dtype=complex)

    def d0(self, z):
        """Distance from z to the zero set sigma(Theta) = {z_n} (inf when
        there are none)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape, dtype=float)
        for i, zv in enumerate(z.ravel()):
            out.flat[i] = self._d0_one(complex(zv))
        return out

    def _d0_one(self, z):
        best = np.inf
        if self._iso.size:
            best = float(np.min(np.abs(self._iso - z)))
        if not self._code:
            return best
        r = 1.0
        while True:
            pts = self.nearby_zeros(z, r)
            if pts.size:
                best = min(best, float(np.min(np.abs(pts - z))))
            # any zero not enumerated is farther than r
            if best <= r:
                return best
            r *= 2.0


def _phase_breaks(model, lo, hi):
    # panel breaks at the real parts of nearby zeros so peaks of phi' are resolved
    n = max(8, int(math.ceil(hi - lo)))
    return np.linspace(lo, hi, min(n, 4096) + 1)


def pw_model(a, **kw):
    return HermiteBiehlerModel(ZeroFamily.pw(a), **kw)


def finite_model(points, a_phase=0.0, **kw):
    return HermiteBiehlerModel(ZeroFamily.finite(points), a_phase=a_phase, **kw)


def power_model(alpha, **kw):
    return HermiteBiehlerModel(ZeroFamily.power(alpha), **kw)


def ls_model(delta, **kw):
    return HermiteBiehlerModel(ZeroFamily.ls(delta), **kw)


# -- single-call operations --------------------------------------------------


def eval_theta(model, z, return_error=False):
    """Theta(z) from N_max explicit symmetric terms plus tail correction.
    With return_error, also the relative error estimate."""
    lt, e = model.log_theta(complex(z), explicit=model.truncation.N_max)
    v = complex(np.exp(lt[()]))
    if return_error:
        return v, float(e[()])
    return v


def eval_E(model, z):
    """(log|E(z)|, arg E(z))."""
    le, _ = model.log_E(complex(z), explicit=model.truncation.N_max)
    le = complex(le[()])
    return le.real, le.imag


def phase_derivative(model, x):
    v, _ = model.dphi(float(x), explicit=model.truncation.N_max)
    return float(v[()])


def phase(model, x):
    return model.phase(x)
