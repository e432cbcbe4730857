"""Compiled summation kernels for zero-sequence products.

A model is a finite set of isolated zeros plus up to two infinite branches
zeta_+(t), zeta_-(t) indexed by a continuous parameter t >= t0 (the integer
points t0, t0+1, ... are the actual zeros).  For each evaluation point the
branch sums are split into

  * an explicit head t0 .. t0+head-1,
  * an explicit window of half-width ``window`` around the index whose real
    part is closest to Re z,
  * smooth gaps in between, summed by the Gregory formula (integral plus
    end corrections), with the integral done by Gauss-Legendre panels that
    grow geometrically away from the singular indices,
  * a far tail beyond T_far = 2^j, expanded in the moments
    P_k(T) = int_T^inf (zeta_+^-k + zeta_-^-k) dt.

The two branches are always paired in the infinite tail, which is what makes
the product for E converge.
"""
import cmath
import math

import numba as nb
import numpy as np

THETA = 0
LOGE = 1
DPHI = 2

POWER = 1
LS = 2
POWERLAW = 3

MOM_LEVELS = 63
MOM_K = 64

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)
_GREG = np.array([1.0 / 12, 1.0 / 24, 19.0 / 720, 3.0 / 160,
                  863.0 / 60480, 275.0 / 24192])


@nb.njit(cache=True)
def zeta(code, s, t, p):
    if code == POWER:
        return complex(s * t ** p[0], 1.0)
    elif code == LS:
        return complex(s * (t - p[0]), t ** (-4.0 * p[0]))
    else:
        if s > 0:
            return complex(p[0] * t ** p[4], p[1] * t ** (-p[5]))
        return complex(-p[2] * t ** p[4], p[3] * t ** (-p[5]))


@nb.njit(cache=True)
def index_of(code, s, x, p):
    # continuous index where Re zeta_s(t) = x; values below 0 mean "none"
    v = s * x
    if code == POWER:
        if v <= 0.0:
            return 0.0
        return v ** (1.0 / p[0])
    elif code == LS:
        return v + p[0]
    else:
        c = p[0] if s > 0 else p[2]
        if v <= 0.0:
            return 0.0
        return (v / c) ** (1.0 / p[4])


@nb.njit(cache=True)
def _arg_unit(w):
    # principal argument of conj(w)/w for w in the upper half-plane
    ph = -2.0 * math.atan2(w.imag, w.real)
    if ph <= -math.pi:
        ph += 2.0 * math.pi
    return ph


@nb.njit(cache=True)
def _log_ratio(d1, a2, r):
    # log|d1/d2| where 1 - |d1/d2|^2 = r; log1p is accurate away from the zero
    if r < 0.5:
        return 0.5 * math.log1p(-r)
    b2 = d1.real * d1.real + d1.imag * d1.imag
    return 0.5 * (math.log(b2) - math.log(a2))


@nb.njit(cache=True)
def term(kind, z, w):
    if kind == THETA:
        d1 = z - w
        d2 = z - w.conjugate()
        a2 = d2.real * d2.real + d2.imag * d2.imag
        re = _log_ratio(d1, a2, 4.0 * z.imag * w.imag / a2)
        q = d1 * d2.conjugate()
        im = math.atan2(q.imag, q.real) + _arg_unit(w)
        return complex(re, im)
    elif kind == LOGE:
        return cmath.log(1.0 - z / w.conjugate())
    else:
        d = z.real - w.real
        return complex(w.imag / (d * d + w.imag * w.imag), 0.0)


@nb.njit(cache=True)
def iso_term(kind, z, w, merom):
    # isolated zero; merom=True uses the unimodular constant that makes the
    # factor real positive at z = i
    if kind == DPHI:
        d = z.real - w.real
        return complex(w.imag / (d * d + w.imag * w.imag), 0.0)
    if not merom:
        return term(kind, z, w)
    w2 = w * w + 1.0
    c = 0.0
    if abs(w2) > 1e-300:
        c = math.atan2(w2.imag, w2.real)
    if kind == THETA:
        d1 = z - w
        d2 = z - w.conjugate()
        a2 = d2.real * d2.real + d2.imag * d2.imag
        re = _log_ratio(d1, a2, 4.0 * z.imag * w.imag / a2)
        q = d1 * d2.conjugate()
        return complex(re, math.atan2(q.imag, q.real) - c)
    return cmath.log(z - w.conjugate()) + 0.5j * c


@nb.njit(cache=True)
def _f(kind, code, s, t, p, z):
    return term(kind, z, zeta(code, s, t, p))


@nb.njit(cache=True)
def _fpair(kind, code, t, p, z):
    return term(kind, z, zeta(code, 1.0, t, p)) + term(kind, z, zeta(code, -1.0, t, p))


@nb.njit(cache=True)
def _fsel(kind, code, s, t, p, z):
    # s = 0 selects the paired function
    if s == 0.0:
        return _fpair(kind, code, t, p, z)
    return _f(kind, code, s, t, p, z)


@nb.njit(cache=True)
def _panels(a, b, sing, nsing, buf):
    # breakpoints: powers of two and sing_i +- window*2^k, restricted to (a, b)
    n = 0
    buf[n] = a
    n += 1
    v = 1.0
    while v < b:
        if v > a:
            buf[n] = v
            n += 1
        v *= 2.0
    for i in range(nsing):
        c = sing[i, 0]
        h = sing[i, 1]
        while True:
            up = c + h
            lo = c - h
            if lo <= a and up >= b:
                break
            if up > a and up < b:
                buf[n] = up
                n += 1
            if lo > a and lo < b:
                buf[n] = lo
                n += 1
            h *= 2.0
            if h > 1e300:
                break
    buf[n] = b
    n += 1
    return np.sort(buf[:n])


@nb.njit(cache=True)
def _sing_dist(u, v, sing, nsing):
    d = u if u > 0.0 else 0.0
    for i in range(nsing):
        c = sing[i, 0]
        if c <= u:
            dd = u - c
        elif c >= v:
            dd = c - v
        else:
            dd = 0.0
        if dd < d:
            d = dd
    return d


@nb.njit(cache=True)
def _integral(kind, code, s, a, b, p, z, sing, nsing, buf):
    bp = _panels(a, b, sing, nsing, buf)
    acc = 0j
    m = bp.shape[0]
    i = 0
    while i < m - 1:
        u = bp[i]
        # greedily merge panels while the panel stays shorter than twice its
        # distance to the nearest singular index
        k = i + 1
        while k + 1 < m and bp[k + 1] - u <= 2.0 * _sing_dist(u, bp[k + 1], sing, nsing):
            k += 1
        v = bp[k]
        i = k
        if v <= u:
            continue
        c = 0.5 * (u + v)
        h = 0.5 * (v - u)
        part = 0j
        for j in range(_GL_X.shape[0]):
            part += _GL_W[j] * _fsel(kind, code, s, c + h * _GL_X[j], p, z)
        acc += h * part
    return acc


@nb.njit(cache=True)
def _diff_head(vals, order):
    # forward differences at the first entry
    tmp = vals.copy()
    out = np.zeros(order + 1, dtype=np.complex128)
    out[0] = tmp[0]
    m = tmp.shape[0]
    for j in range(1, order + 1):
        for i in range(m - j):
            tmp[i] = tmp[i + 1] - tmp[i]
        out[j] = tmp[0]
    return out


@nb.njit(cache=True)
def _gap(kind, code, s, a, b, p, z, sing, nsing, buf, finite):
    """Sum f(n) for integers a <= n <= b (b ignored when not finite, then the
    caller adds the integral beyond b itself).  Returns (sum, error)."""
    order = _GREG.shape[0]
    if finite and b - a + 1 <= 4 * order:
        acc = 0j
        n = a
        while n <= b:
            acc += _fsel(kind, code, s, n, p, z)
            n += 1.0
        return acc, 0.0
    fa = np.empty(order + 1, dtype=np.complex128)
    for j in range(order + 1):
        fa[j] = _fsel(kind, code, s, a + j, p, z)
    da = _diff_head(fa, order)
    acc = _integral(kind, code, s, a, b, p, z, sing, nsing, buf) + 0.5 * da[0]
    err = 0.0
    for j in range(1, order + 1):
        sg = -1.0 if j % 2 == 1 else 1.0
        acc += sg * _GREG[j - 1] * da[j]
    err += abs(_GREG[order - 1] * da[order])
    if finite:
        fb = np.empty(order + 1, dtype=np.complex128)
        for j in range(order + 1):
            fb[j] = _fsel(kind, code, s, b - j, p, z)
        db = _diff_head(fb, order)
        acc += 0.5 * db[0]
        for j in range(1, order + 1):
            sg = -1.0 if j % 2 == 1 else 1.0
            # backward differences at b are (-1)^j times forward ones of the reversed list
            acc += _GREG[j - 1] * sg * db[j]
        err += abs(_GREG[order - 1] * db[order])
    return acc, err


@nb.njit(cache=True)
def _tail_series(kind, z, P, S):
    # sum over the far tail via moments scaled by S^k; returns (value, error)
    acc = 0j
    err = 0.0
    zk = 1.0 + 0j
    w = z / S
    small = 0
    for k in range(1, P.shape[0]):
        if kind == THETA:
            zk = zk * w
            t = (zk / k) * complex(0.0, -2.0 * P[k].imag)
        elif kind == LOGE:
            zk = zk * w
            t = -(zk / k) * P[k].conjugate()
        else:
            t = complex(-zk.real * P[k].imag / S, 0.0)
            zk = zk * w.real
        acc += t
        if abs(t) <= 1e-17 * (1.0 + abs(acc)):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
    err = 4e-17 * (1.0 + abs(acc)) + abs(t)
    return acc, err


@nb.njit(cache=True)
def moment_table(code, p):
    """P[j, k] = S_j^k int_{2^j}^inf (zeta_+^-k + zeta_-^-k) dt with the scale
    S_j = min |zeta_+-(2^j)|, which keeps high moments inside the float range.
    Returns the table, the fitted decay exponent of each moment at the last
    level and the scales."""
    P = np.zeros((MOM_LEVELS, MOM_K), dtype=np.complex128)
    q = np.zeros(MOM_K)
    S = np.ones(MOM_LEVELS)
    if code == 0:
        return P, q, S
    for j in range(MOM_LEVELS):
        u = 2.0 ** j
        S[j] = min(abs(zeta(code, 1.0, u, p)), abs(zeta(code, -1.0, u, p)))
    jl = MOM_LEVELS - 1
    T = 2.0 ** jl
    s1 = np.zeros(MOM_K, dtype=np.complex128)
    s0 = np.zeros(MOM_K, dtype=np.complex128)
    for sg in (1.0, -1.0):
        i1 = S[jl] / zeta(code, sg, T, p)
        i0 = S[jl] / zeta(code, sg, 0.5 * T, p)
        a1 = i1
        a0 = i0
        for k in range(1, MOM_K):
            s1[k] += a1
            s0[k] += a0
            a1 *= i1
            a0 *= i0
    for k in range(1, MOM_K):
        if abs(s1[k]) == 0.0 or abs(s0[k]) == 0.0:
            q[k] = 1e300
            continue
        q[k] = math.log(abs(s0[k]) / abs(s1[k])) / math.log(2.0)
        if q[k] > 1.0:
            P[jl, k] = s1[k] * T / (q[k] - 1.0)
        else:
            P[jl, k] = complex(np.nan, np.nan)
    acc = np.zeros(MOM_K, dtype=np.complex128)
    for j in range(jl - 1, -1, -1):
        u = 2.0 ** j
        c = 1.5 * u
        h = 0.5 * u
        acc[:] = 0.0
        for m in range(_GL16_X.shape[0]):
            t = c + h * _GL16_X[m]
            for sg in (1.0, -1.0):
                inv = S[j] / zeta(code, sg, t, p)
                a = inv
                for k in range(1, MOM_K):
                    acc[k] += _GL16_W[m] * h * a
                    a *= inv
        r = S[j] / S[j + 1]
        rk = 1.0
        for k in range(1, MOM_K):
            rk *= r
            P[j, k] = P[j + 1, k] * rk + acc[k]
    return P, q, S


@nb.njit(cache=True)
def _eval_one(kind, z, code, p, t0, head, window, iso, merom, lin, P, S, rfar):
    buf = np.empty(4096)
    sing = np.zeros((3, 2))
    acc = 0j
    err = 0.0
    # exponential factor
    if kind == THETA:
        acc += 2j * lin * z
    elif kind == LOGE:
        acc += -1j * lin * z
    else:
        acc += lin
    for i in range(iso.shape[0]):
        acc += iso_term(kind, z, iso[i], merom)
    if code == 0:
        return acc, err
    t0f = float(t0)
    # per-branch explicit ranges
    hi_head = t0f + head - 1
    starts = np.zeros(2)
    tst = np.zeros(2)
    for b in range(2):
        s = 1.0 if b == 0 else -1.0
        ts = index_of(code, s, z.real, p)
        tst[b] = ts
        lo = math.floor(ts) - window
        hi = math.ceil(ts) + window
        if hi <= hi_head or lo > 2.0 ** 52:
            # window inside the head (or beyond representable indices)
            lo = hi_head + 1
            hi = hi_head
        n = t0f
        while n <= hi_head:
            acc += _f(kind, code, s, n, p, z)
            n += 1.0
        if lo <= hi_head + 1:
            lo = hi_head + 1
        else:
            sing[0, 0] = ts
            sing[0, 1] = window
            v, e = _gap(kind, code, s, hi_head + 1, lo - 1, p, z, sing, 1, buf, True)
            acc += v
            err += e
        n = lo
        while n <= hi:
            acc += _f(kind, code, s, n, p, z)
            n += 1.0
        starts[b] = max(hi + 1, hi_head + 1)
    A = max(starts[0], starts[1])
    for b in range(2):
        s = 1.0 if b == 0 else -1.0
        if starts[b] < A:
            sing[0, 0] = tst[b]
            sing[0, 1] = window
            v, e = _gap(kind, code, s, starts[b], A - 1, p, z, sing, 1, buf, True)
            acc += v
            err += e
    # paired tail from A to T_far, then moments
    az = abs(z)
    j = 0
    while j < MOM_LEVELS - 1:
        T = 2.0 ** j
        if T >= A + 8 and abs(zeta(code, 1.0, T, p)) >= rfar * az and abs(zeta(code, -1.0, T, p)) >= rfar * az:
            break
        j += 1
    T = 2.0 ** j
    sing[0, 0] = tst[0]
    sing[0, 1] = window
    sing[1, 0] = tst[1]
    sing[1, 1] = window
    v, e = _gap(kind, code, 0.0, A, T, p, z, sing, 2, buf, False)
    acc += v
    err += e
    v, e = _tail_series(kind, z, P[j], S[j])
    acc += v
    err += e
    return acc, err


@nb.njit(cache=True)
def evaluate(kind, zs, code, p, t0, head, window, iso, merom, lin, P, S, rfar):
    n = zs.shape[0]
    out = np.empty(n, dtype=np.complex128)
    err = np.empty(n)
    for i in range(n):
        v, e = _eval_one(kind, zs[i], code, p, t0, head, window, iso, merom, lin, P, S, rfar)
        out[i] = v
        err[i] = e
    return out, err


@nb.njit(cache=True)
def brute(kind, zs, code, p, t0, nmax, iso, merom, lin):
    """Plain symmetric partial sums up to index nmax; reference only."""
    n = zs.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        z = zs[i]
        if kind == THETA:
            acc = 2j * lin * z
        elif kind == LOGE:
            acc = -1j * lin * z
        else:
            acc = complex(lin, 0.0)
        for m in range(iso.shape[0]):
            acc += iso_term(kind, z, iso[m], merom)
        if code != 0:
            t = float(t0)
            while t <= nmax:
                acc += _fpair(kind, code, t, p, z)
                t += 1.0
        out[i] = acc
    return out
