"""Globally adaptive Gauss-Legendre integration on intervals and rectangles.

Every leaf keeps its own rule value and the values of its children; the
difference is the leaf's error estimate and the children sum is its value.
Each round refines the leaves carrying the top half of the total error, with
all new nodes evaluated in one vectorized call.
"""
import math
from dataclasses import dataclass

import numpy as np


@dataclass
class AdaptiveResult:
    value: complex
    error: float
    n_cells: int
    n_evals: int
    converged: bool


def _gl(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _quad1(f, a, b, x, w):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    pts = c[:, None] + h[:, None] * x[None, :]
    vals = np.asarray(f(pts.ravel())).reshape(pts.shape)
    return h * (vals @ w)


def _select(err, total):
    order = np.argsort(-err, kind="stable")
    csum = np.cumsum(err[order])
    k = int(np.searchsorted(csum, 0.5 * total)) + 1
    return order[:max(1, min(k, err.size))]


def integrate_1d(f, breaks, tol_abs=1e-10, tol_rel=1e-8, n=10, max_evals=2_000_000, panels=False):
    """Integrate the vectorized function ``f`` over [breaks[0], breaks[-1]]
    with initial panels given by ``breaks``.  With ``panels``, also return
    the final panels (a, b, value) in increasing order; every initial break
    is a panel endpoint."""
    x, w = _gl(n)
    breaks = np.asarray(breaks, dtype=float)
    a = breaks[:-1].copy()
    b = breaks[1:].copy()
    m = 0.5 * (a + b)
    q = _quad1(f, np.concatenate([a, a, m]), np.concatenate([b, m, b]), x, w)
    k = a.size
    qs, ql, qr = q[:k], q[k:2 * k], q[2 * k:]
    evals = 3 * k * n
    while True:
        val = ql + qr
        err = np.abs(qs - val)
        total_val = math.fsum(np.real(val)) + 1j * math.fsum(np.imag(val))
        total_err = float(err.sum())
        if total_err <= max(tol_abs, tol_rel * abs(total_val)):
            conv = True
            break
        if evals >= max_evals:
            conv = False
            break
        idx = _select(err, total_err)
        keep = np.ones(a.size, dtype=bool)
        keep[idx] = False
        ra, rb = a[idx], b[idx]
        rm = 0.5 * (ra + rb)
        na = np.concatenate([ra, rm])
        nb_ = np.concatenate([rm, rb])
        nq = np.concatenate([ql[idx], qr[idx]])
        nm = 0.5 * (na + nb_)
        c = _quad1(f, np.concatenate([na, nm]), np.concatenate([nm, nb_]), x, w)
        evals += 2 * na.size * n
        j = na.size
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb_])
        qs = np.concatenate([qs[keep], nq])
        ql = np.concatenate([ql[keep], c[:j]])
        qr = np.concatenate([qr[keep], c[j:]])
    order = np.argsort(a, kind="stable")
    val = (ql + qr)[order]
    value = math.fsum(np.real(val)) + 1j * math.fsum(np.imag(val))
    res = AdaptiveResult(value, total_err, a.size, evals, conv)
    if panels:
        return res, (a[order], b[order], val)
    return res


def _quad2(h, x0, x1, y0, y1, x, w):
    cx = 0.5 * (x0 + x1)
    hx = 0.5 * (x1 - x0)
    cy = 0.5 * (y0 + y1)
    hy = 0.5 * (y1 - y0)
    px = cx[:, None, None] + hx[:, None, None] * x[None, :, None]
    py = cy[:, None, None] + hy[:, None, None] * x[None, None, :]
    px, py = np.broadcast_arrays(px, py)
    vals = np.asarray(h(px.ravel(), py.ravel())).reshape(px.shape)
    return hx * hy * np.einsum("kij,i,j->k", vals, w, w)


def _children(x0, x1, y0, y1):
    xm = 0.5 * (x0 + x1)
    ym = 0.5 * (y0 + y1)
    cx0 = np.concatenate([x0, xm, x0, xm])
    cx1 = np.concatenate([xm, x1, xm, x1])
    cy0 = np.concatenate([y0, y0, ym, ym])
    cy1 = np.concatenate([ym, ym, y1, y1])
    return cx0, cx1, cy0, cy1


def integrate_2d(h, cells, tol_abs=1e-10, tol_rel=1e-6, n=6, max_evals=4_000_000):
    """Integrate ``h(x, y)`` (vectorized, real or complex) over a union of
    rectangles given as an (m, 4) array of (x0, x1, y0, y1)."""
    x, w = _gl(n)
    cells = np.asarray(cells, dtype=float).reshape(-1, 4)
    x0, x1, y0, y1 = (cells[:, i].copy() for i in range(4))
    k = x0.size
    ch = _children(x0, x1, y0, y1)
    q = _quad2(h, np.concatenate([x0, ch[0]]), np.concatenate([x1, ch[1]]),
               np.concatenate([y0, ch[2]]), np.concatenate([y1, ch[3]]), x, w)
    qs = q[:k]
    qc = q[k:].reshape(4, k).T.copy()
    evals = 5 * k * n * n
    while True:
        val = qc.sum(axis=1)
        err = np.abs(qs - val)
        total_val = math.fsum(np.real(val)) + 1j * math.fsum(np.imag(val))
        total_err = float(err.sum())
        if total_err <= max(tol_abs, tol_rel * abs(total_val)):
            conv = True
            break
        if evals >= max_evals:
            conv = False
            break
        idx = _select(err, total_err)
        keep = np.ones(x0.size, dtype=bool)
        keep[idx] = False
        nx0, nx1, ny0, ny1 = _children(x0[idx], x1[idx], y0[idx], y1[idx])
        nq = qc[idx].T.ravel()
        gx0, gx1, gy0, gy1 = _children(nx0, nx1, ny0, ny1)
        c = _quad2(h, gx0, gx1, gy0, gy1, x, w)
        j = nx0.size
        evals += 4 * j * n * n
        x0 = np.concatenate([x0[keep], nx0])
        x1 = np.concatenate([x1[keep], nx1])
        y0 = np.concatenate([y0[keep], ny0])
        y1 = np.concatenate([y1[keep], ny1])
        qs = np.concatenate([qs[keep], nq])
        qc = np.concatenate([qc[keep], c.reshape(4, j).T])
    order = np.lexsort((y0, x0))
    val = qc.sum(axis=1)[order]
    value = math.fsum(np.real(val)) + 1j * math.fsum(np.imag(val))
    return AdaptiveResult(value, total_err, x0.size, evals, conv)
