import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hbfock import KernelEval, finite_model, power_model, pw_model, test_fn
from hbfock.errors import InvalidIndex
from hbfock.kernels import TestFunction
from hbfock.quadrature import inner_product_line, line_norm2


class KernelFn(TestFunction):
    """k_w seen as F/E, for quadrature of kernel inner products."""

    def __init__(self, model, w):
        super().__init__(model)
        self.w = complex(w)
        self.kern = KernelEval(model)

    def ratio(self, z):
        return self.kern.k_small(self.w, z)

    def line_profile(self):
        return self.w.real, max(self.w.imag, 0.1)


def test_k_small_oracles():
    k = KernelEval(pw_model(1.0))
    assert complex(k.k_small(1j, 1j)[0]) == pytest.approx((1 - math.exp(-4)) / (4 * math.pi), rel=1e-12)
    k1 = KernelEval(finite_model([1j]))
    assert complex(k1.k_small(0.0, 0.0)[0]) == pytest.approx(1 / math.pi, rel=1e-9)
    # Theta vanishes at w = i
    z = np.array([0.3 + 0.2j, -2.0 + 1.0j])
    assert np.allclose(k1.k_small(1j, z), (0.5j / math.pi) / (z + 1j), rtol=1e-12)


def test_knorm2_oracles():
    assert KernelEval(pw_model(1.0)).knorm2(1j)[0] == pytest.approx((1 - math.exp(-4)) / (4 * math.pi), rel=1e-12)
    assert KernelEval(finite_model([1j])).knorm2(0.0)[0] == pytest.approx(1 / math.pi, rel=1e-14)
    m = power_model(0.75)
    assert KernelEval(m).knorm2(100.0)[0] == pytest.approx(float(m.phi_prime(100.0)) / math.pi, rel=1e-12)


def test_K_big_oracles():
    k = KernelEval(pw_model(math.pi))
    for x in (0.0, 1.3, -7.2):
        assert complex(k.K_big(x, x)[0]) == pytest.approx(1.0, rel=1e-9)
    k1 = KernelEval(finite_model([1j]))
    assert complex(k1.K_big(0.0, 0.0)[0]) == pytest.approx(1 / math.pi, rel=1e-9)
    assert k1.K_norm2(0.0) == pytest.approx(1 / math.pi, rel=1e-14)


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(0.2, 3)), min_size=1, max_size=8),
       st.floats(-4, 4), st.floats(0.05, 2), st.floats(-4, 4), st.floats(0.05, 2))
def test_K_big_matches_defining_formula(pts, x1, y1, x2, y2):
    m = finite_model([complex(a, b) for a, b in pts])
    k = KernelEval(m)
    w, z = complex(x1, y1), complex(x2, y2)
    a = complex(k.K_big(w, z)[0])
    b = complex(k.K_big_direct(w, z)[0])
    assert abs(a - b) <= 1e-10 * max(abs(a), abs(b), 1e-300)


def test_f_n_cancellation():
    m = finite_model([1j])
    f0 = test_fn("f_n", {"n": 0}, m)
    assert abs(complex(f0(5.0)[0])) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(InvalidIndex):
        test_fn("f_n", {"n": 4}, m)


def test_g_x_line_norm_pw():
    m = pw_model(math.pi)
    g = test_fn("g_x", {"x": 0.0}, m)
    assert line_norm2(g, m, tol_rel=1e-9).value == pytest.approx(1.0, rel=1e-6)


def test_sinc_plancherel():
    m = pw_model(math.pi)
    s = test_fn("sinc-combination", {"coeffs": [1.0], "shifts": [0.0]}, m)
    assert line_norm2(s, m).value == pytest.approx(1.0, rel=1e-6)


def test_g_x_norm_tracks_phi_prime():
    # quadrature norm of g_x over phi'(x) is the same constant 1/pi across x
    m = finite_model([1j, 2 + 0.5j, -3 + 2j])
    vals = []
    for x in (-4.0, -1.0, 0.0, 1.5, 2.0, 6.0):
        g = test_fn("g_x", {"x": x}, m)
        vals.append(line_norm2(g, m, tol_rel=1e-8).value / float(m.phi_prime(x)))
    assert max(vals) / min(vals) < 1.02
    assert np.allclose(vals, 1 / math.pi, rtol=1e-6)


def test_f_n_norm_band():
    m = finite_model([1j, 3 + 0.2j, -2 + 4j, 0.5 + 0.05j])
    for n in range(4):
        v = line_norm2(test_fn("f_n", {"n": n}, m), m, tol_rel=1e-8).value
        assert 1 / 16 <= v <= 16
        assert v == pytest.approx(math.pi, rel=1e-6)


def test_kernel_combination_exact_norm_matches_quadrature():
    m = finite_model([1j, 2 + 0.5j])
    F = test_fn("kernel-combination", {"nodes": [0.3 + 0.4j, -1.0 + 0j], "coeffs": [1.0, -0.5j]}, m)
    assert line_norm2(F, m, tol_rel=1e-9).value == pytest.approx(F.exact_norm2(), rel=1e-6)


nodes = st.tuples(st.floats(-3, 3), st.sampled_from([0.0, 0.1, 0.5, 1.5]))


@given(st.lists(st.tuples(st.floats(-4, 4), st.floats(0.2, 2)), min_size=1, max_size=6), nodes, nodes)
def test_reproducing_property(pts, v, w):
    m = finite_model([complex(a, b) for a, b in pts])
    v, w = complex(*v), complex(*w)
    ip, _ = inner_product_line(KernelFn(m, v), KernelFn(m, w), m, tol_rel=1e-7)
    ref = complex(KernelEval(m).k_small(v, w)[0])
    assert abs(ip - ref) <= 1e-3 * abs(ref)


def test_scaled_function():
    m = pw_model(math.pi)
    s = test_fn("sinc-combination", {"coeffs": [1.0, 0.5], "shifts": [0.0, 1.5]}, m)
    a = line_norm2(s, m).value
    b = line_norm2(s.scaled(2 - 1j), m).value
    assert b == pytest.approx(5 * a, rel=1e-12)


def test_modulus_profile_has_no_phase():
    f = test_fn("modulus-profile", {}, pw_model(1.0))
    assert not f.analytic
    assert f.ratio_abs(np.array([0.0]))[0] == pytest.approx(1 / math.log(2))
    with pytest.raises(TypeError):
        f.ratio(np.array([0.0]))
