"""Reproducing kernels of H(E) and of the model space K_Theta, and the test
functions used by the norm experiments.

Conventions (all norms are the de Branges integral norm int |F/E|^2 dx):

    k_w(z) = (i/2pi) (1 - conj(Theta(w)) Theta(z)) / (z - conj w)
    K_w(z) = E(z) conj(E(w)) k_w(z),        ||K_w||^2 = K_w(w)
    ||k_z||^2 = (1 - |Theta(z)|^2) / (4 pi Im z),   = phi'(x)/pi on the line.

Every test function exposes ``ratio(z) = F(z)/E(z)`` and
``ratio_sharp(z) = F#(z)/E(z)`` on the closed upper half-plane; the Fock
norm over the whole plane only needs these two because
|F(conj z) W(conj z)| = |F#(z)/E(z)| |E(z)| W(z).
"""
from __future__ import annotations

import math

import numpy as np

from .errors import InvalidIndex, PoleHit

_NEAR = 1e-4


def _arr(z):
    return np.atleast_1d(np.asarray(z, dtype=complex))


def _near_diag(fun, z, c, scale, n=32):
    """Evaluate q(z) = fun(z) that has a removable singularity at c.  Points
    with |z - c| < scale use the Cauchy formula on the circle |zeta - c| =
    4 scale with the trapezoidal rule (error about 4^-n)."""
    z = _arr(z)
    h = z - c
    near = np.abs(h) < scale
    out = np.empty(z.shape, dtype=complex)
    if np.any(~near):
        out[~near] = fun(z[~near])
    if np.any(near):
        u = 4 * scale * np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)
        qv = fun(c + u)
        hn = h[near]
        out[near] = np.mean(qv[None, :] * u[None, :] / (u[None, :] - hn[:, None]), axis=1)
    return out


def _safe_scale(model, c, scale):
    # keep the Cauchy circle (radius 4 scale) well away from zeros and poles,
    # and small against the phase scale so |Theta| stays moderate on it
    scale = min(scale, 0.05 / float(model.phi_prime(float(np.real(c)))))
    zs = np.concatenate([model.nearby_zeros(c, 8 * scale), np.conj(model.nearby_zeros(np.conj(c), 8 * scale))])
    d = np.abs(zs - c)
    d = d[d > 0]
    if d.size:
        scale = min(scale, d.min() / 8)
    return scale


class KernelEval:
    """Kernel evaluators bound to one model."""

    def __init__(self, model):
        self.model = model

    def _q(self, w, z):
        # (1 - conj(Theta(w)) Theta(z)) / (z - conj w), removable at z = conj w
        m = self.model
        w = complex(w)
        lw = complex(m.log_theta(w)[0][()])
        if lw.real == -np.inf:
            return 1.0 / (_arr(z) - np.conj(w))

        def fun(zz):
            lz = m.log_theta(zz)[0]
            return -np.expm1(np.conj(lw) + lz) / (zz - np.conj(w))

        c = np.conj(w)
        return _near_diag(fun, z, c, _safe_scale(m, c, _NEAR * (1 + abs(c))))

    def k_small(self, w, z):
        z = _arr(z)
        if np.any(z == np.conj(complex(w))) and complex(w).imag != 0:
            raise PoleHit("k_w(z) has a pole at z = conj(w)")
        return (0.5j / math.pi) * self._q(w, z)

    def knorm2(self, z):
        """||k_z||^2; phi'(x)/pi on the real line."""
        z = _arr(z)
        out = np.empty(z.shape)
        real = z.imag == 0
        if np.any(real):
            out[real] = self.model.phi_prime(z.real[real]) / math.pi
        up = z.imag > 0
        if np.any(up):
            out[up] = self.model.one_minus_abs_theta2(z[up]) / (4 * math.pi * z.imag[up])
        if np.any(z.imag < 0):
            raise ValueError("knorm2 is defined on the closed upper half-plane")
        return out

    def K_big(self, w, z):
        """K_w(z) = E(z) conj(E(w)) k_w(z)."""
        z = _arr(z)
        lew = complex(self.model.log_E(complex(w))[0][()])
        lez = self.model.log_E(z)[0]
        return np.exp(lez + np.conj(lew)) * self.k_small(w, z)

    def K_big_direct(self, w, z):
        """The defining formula (i/2pi)(E(z)conj E(w) - E#(z)conj E#(w))/(z - conj w);
        used to cross-check K_big away from the diagonal."""
        m = self.model
        z = _arr(z)
        w = complex(w)
        Ez, Ew = m.E(z), complex(m.E(w)[()])
        Esz, Esw = m.E_sharp(z), complex(m.E_sharp(w)[()])
        return (0.5j / math.pi) * (Ez * np.conj(Ew) - Esz * np.conj(Esw)) / (z - np.conj(w))

    def K_norm2(self, x):
        """||K_x||^2 = |E(x)|^2 phi'(x)/pi for real x."""
        x = np.asarray(x, dtype=float)
        le = self.model.log_E(x)[0].real
        return np.exp(2 * le) * self.model.phi_prime(x) / math.pi


# -- test functions -------------------------------------------------------------


class TestFunction:
    """Element of H(E) seen through F/E and F#/E on the closed upper
    half-plane."""
    __test__ = False
    analytic = True
    kind = ""

    def __init__(self, model):
        self.model = model

    def ratio(self, z):
        raise NotImplementedError

    def ratio_sharp(self, z):
        raise NotImplementedError

    def ratio_abs(self, z):
        return np.abs(self.ratio(z))

    def ratio_sharp_abs(self, z):
        return np.abs(self.ratio_sharp(z))

    def __call__(self, z):
        """F(z) itself (may overflow far from the real line)."""
        z = _arr(z)
        out = np.empty(z.shape, dtype=complex)
        up = z.imag >= 0
        if np.any(up):
            out[up] = self.model.E(z[up]) * self.ratio(z[up])
        lo = ~up
        if np.any(lo):
            zz = np.conj(z[lo])
            out[lo] = np.conj(self.model.E(zz) * self.ratio_sharp(zz))
        return out

    def scaled(self, c):
        return Scaled(self, c)

    def line_profile(self):
        """Hints for the line quadrature: (center, scale) of the bulk."""
        return 0.0, 1.0


class Scaled(TestFunction):
    def __init__(self, base, c):
        super().__init__(base.model)
        self.base = base
        self.c = complex(c)
        self.kind = base.kind
        self.analytic = base.analytic

    def ratio(self, z):
        return self.c * self.base.ratio(z)

    def ratio_sharp(self, z):
        return np.conj(self.c) * self.base.ratio_sharp(z)

    def ratio_abs(self, z):
        return abs(self.c) * self.base.ratio_abs(z)

    def ratio_sharp_abs(self, z):
        return abs(self.c) * self.base.ratio_sharp_abs(z)

    def line_profile(self):
        return self.base.line_profile()


class FN(TestFunction):
    """f_n(z) = E(z) sqrt(y_n) / (z - conj z_n)."""
    kind = "f_n"

    def __init__(self, model, n):
        super().__init__(model)
        try:
            self.zn = complex(model.zeros.point(n))
        except InvalidIndex:
            raise
        self.n = n
        self.c = math.sqrt(self.zn.imag)

    def ratio(self, z):
        z = _arr(z)
        return self.c / (z - np.conj(self.zn))

    def ratio_sharp(self, z):
        z = _arr(z)
        # Theta vanishes at z_n, so Theta(z)/(z - z_n) is removable there
        def fun(zz):
            return self.model.theta(zz) / (zz - self.zn)
        return self.c * _near_diag(fun, z, self.zn, _safe_scale(self.model, self.zn, 1e-7 * (1 + abs(self.zn))))

    def line_profile(self):
        return self.zn.real, self.zn.imag


class GX(TestFunction):
    """g_x = K_x / conj(E(x)), so g_x/E = k_x."""
    kind = "g_x"

    def __init__(self, model, x):
        super().__init__(model)
        self.x = float(x)
        self.kern = KernelEval(model)
        le = complex(model.log_E(self.x)[0][()])
        # g_x# = K_x / E(x) = g_x conj(E(x))/E(x)
        self.rot = np.exp(-2j * le.imag)

    def ratio(self, z):
        return self.kern.k_small(self.x, z)

    def ratio_sharp(self, z):
        return self.rot * self.kern.k_small(self.x, z)

    def ratio_abs(self, z):
        return np.abs(self.ratio(z))

    ratio_sharp_abs = ratio_abs

    def exact_norm2(self):
        return float(self.model.phi_prime(self.x)) / math.pi

    def line_profile(self):
        return self.x, 1.0 / float(self.model.phi_prime(self.x))


class SincCombination(TestFunction):
    """F(z) = sum c_j sin(a(z - s_j)) / (a(z - s_j)), an element of PW_a."""
    kind = "sinc-combination"

    def __init__(self, model, coeffs, shifts, a=math.pi):
        super().__init__(model)
        self.c = np.asarray(coeffs, dtype=complex)
        self.s = np.asarray(shifts, dtype=float)
        self.a = float(a)
        zf = model.zeros
        self._pw = zf.kind == "pw-exponential" and zf.a >= self.a - 1e-15

    def _ratio(self, z, c):
        z = _arr(z)
        a = self.a
        u = z[:, None] - self.s[None, :]
        if self._pw:
            am = self.model.a_phase
            # sin(a u) e^{i am z}, written with exponents of nonpositive real part
            num = (np.exp(1j * a * u + 1j * am * z[:, None])
                   - np.exp(-1j * a * u + 1j * am * z[:, None])) / 2j
        else:
            num = np.sin(a * u) * np.exp(-self.model.log_E(z)[0])[:, None]
        small = np.abs(u) < 1e-8
        with np.errstate(invalid="ignore", divide="ignore"):
            val = num / (a * u)
        if np.any(small):
            lim = np.exp(-self.model.log_E(z)[0])[:, None] * np.ones_like(u)
            val = np.where(small, lim, val)
        return val @ c

    def ratio(self, z):
        return self._ratio(z, self.c)

    def ratio_sharp(self, z):
        return self._ratio(z, np.conj(self.c))

    def line_profile(self):
        return float(np.mean(self.s)) if self.s.size else 0.0, 1.0


class KernelCombination(TestFunction):
    """F = sum c_j K_{w_j} / ||K_{w_j}||, nodes w_j in the closed upper
    half-plane."""
    kind = "kernel-combination"

    def __init__(self, model, nodes, coeffs):
        super().__init__(model)
        self.w = np.asarray(nodes, dtype=complex)
        self.c = np.asarray(coeffs, dtype=complex)
        if np.any(self.w.imag < 0):
            raise InvalidIndex("kernel nodes must lie in the closed upper half-plane")
        self.kern = KernelEval(model)
        le = model.log_E(self.w)[0]
        self.unit = np.exp(-1j * le.imag)  # conj(E(w))/|E(w)|
        self.lt = model.log_theta(self.w)[0]
        self.norm = np.sqrt(self.kern.knorm2(self.w))

    def ratio(self, z):
        z = _arr(z)
        out = np.zeros(z.shape, dtype=complex)
        for c, u, w, nk in zip(self.c, self.unit, self.w, self.norm):
            out += c * u / nk * self.kern.k_small(w, z)
        return out

    def ratio_sharp(self, z):
        # K_{conj w}(z)/E(z) = (i/2pi) E(w) (Theta(w) - Theta(z)) / (z - w)
        z = _arr(z)
        m = self.model
        out = np.zeros(z.shape, dtype=complex)
        for c, u, w, lt, nk in zip(self.c, self.unit, self.w, self.lt, self.norm):
            tw = np.exp(lt)

            def fun(zz, tw=tw, w=w):
                return (tw - m.theta(zz)) / (zz - w)

            q = _near_diag(fun, z, w, _safe_scale(m, w, _NEAR * (1 + abs(w))))
            out += np.conj(c) * np.conj(u) * (0.5j / math.pi) * q / nk
        return out

    def exact_norm2(self):
        """||F||^2 from the Gram matrix of normalized kernels."""
        n = self.w.size
        G = np.empty((n, n), dtype=complex)
        for j in range(n):
            # <K_{w_j}, K_{w_i}> = K_{w_j}(w_i); normalized by |E| and ||k||
            G[:, j] = self.kern.k_small(self.w[j], self.w) * self.unit[j] * np.conj(self.unit) \
                / (self.norm[j] * self.norm)
        return float(np.real(np.conj(self.c) @ G @ self.c))

    def line_profile(self):
        c = float(np.mean(self.w.real))
        return c, min(1.0, 1.0 / float(self.model.phi_prime(c)))


class ModulusProfile(TestFunction):
    """|f(x+iy)| = (|x|+1)^{-1/2} / log(|x|+2): modulus only, not analytic.
    The same profile is used for the reflected half-plane."""
    kind = "modulus-profile"
    analytic = False

    def ratio_abs(self, z):
        x = np.real(_arr(z))
        return (np.abs(x) + 1) ** -0.5 / np.log(np.abs(x) + 2)

    ratio_sharp_abs = ratio_abs

    def ratio(self, z):
        raise TypeError("modulus-profile carries no phase information")

    ratio_sharp = ratio


def test_fn(kind, params, model):
    """Factory: kind in {f_n, g_x, sinc-combination, kernel-combination,
    modulus-profile}."""
    if kind == "f_n":
        return FN(model, params["n"])
    if kind == "g_x":
        return GX(model, params["x"])
    if kind == "sinc-combination":
        return SincCombination(model, params["coeffs"], params["shifts"], params.get("a", math.pi))
    if kind == "kernel-combination":
        return KernelCombination(model, params["nodes"], params["coeffs"])
    if kind == "modulus-profile":
        return ModulusProfile(model)
    raise InvalidIndex(f"unknown test function kind {kind!r}")


test_fn.__test__ = False
