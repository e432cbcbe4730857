import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hbfock import (LevelSetGeometry, WeightField, area_norm2, carleson_test, dyadic_intervals,
                    finite_model, line_norm2, pw_model, test_fn)
from hbfock.quadrature import inner_product_line


def sinc(coeffs, shifts, model):
    return test_fn("sinc-combination", {"coeffs": list(coeffs), "shifts": list(shifts)}, model)


def test_line_norm_sinc_and_kernel():
    m = pw_model(math.pi)
    r = line_norm2(sinc([1.0], [0.0], m), m)
    assert r.converged
    assert r.value == pytest.approx(1.0, rel=1e-6)
    g = test_fn("g_x", {"x": 0.4}, m)
    assert line_norm2(g, m).value == pytest.approx(1.0, rel=1e-6)


def test_area_norm_sinc_w0():
    # frozen from an independent tensor Gauss-Legendre computation
    m = pw_model(math.pi)
    r = area_norm2(sinc([1.0], [0.0], m), WeightField("W0", m), tol_rel=1e-4)
    assert r.value == pytest.approx(0.35834516843619013, rel=1e-3)
    assert r.abs_error_estimate <= 1e-3 * r.value


def test_zero_function_and_scaling():
    m = pw_model(math.pi)
    z = sinc([0.0], [0.0], m)
    assert line_norm2(z, m).value == 0.0
    assert area_norm2(z, WeightField("W0", m)).value == 0.0
    s = sinc([1.0, -0.3], [0.0, 2.0], m)
    a = area_norm2(s, WeightField("W0", m)).value
    b = area_norm2(s.scaled(3j), WeightField("W0", m)).value
    assert b == pytest.approx(9 * a, rel=1e-9)


def test_plancherel_battery():
    # ||sum c_k sinc(. - s_k)||^2 = sum_jk c_j conj(c_k) sinc(s_j - s_k)
    m = pw_model(math.pi)
    rng = np.random.default_rng(11)
    for _ in range(10):
        n = rng.integers(1, 5)
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        s = rng.uniform(-5, 5, n)
        G = np.sinc(s[:, None] - s[None, :])
        exact = float(np.real(c @ G @ np.conj(c)))
        got = line_norm2(sinc(c, s, m), m, tol_rel=1e-9).value
        assert got == pytest.approx(exact, rel=1e-5)


@settings(max_examples=8)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_inner_product_of_translates(a, b):
    m = pw_model(math.pi)
    ip, _ = inner_product_line(sinc([1.0], [a], m), sinc([1.0], [b], m), m, tol_rel=1e-7)
    assert abs(ip - np.sinc(a - b)) <= 1e-5


def test_line_norm_finite_model_f0():
    m = finite_model([1j])
    assert line_norm2(test_fn("f_n", {"n": 0}, m), m).value == pytest.approx(math.pi, rel=1e-6)


def test_dyadic_intervals():
    iv = dyadic_intervals(0, 8, 2)
    assert iv == [(0, 8), (0, 4), (4, 8), (0, 2), (2, 4), (4, 6), (6, 8)]
    iv = dyadic_intervals(-3, 5, 1)
    assert (-2.0, 2.0) not in iv and (0.0, 4.0) in iv
    assert all(b - a >= 1 and a >= -3 and b <= 5 for a, b in iv)


def test_carleson_pw_oracle():
    # Omega_delta^c = {y <= 1/2}, d_eps = 1 - y, Omega_eps = {y >= 1}: every
    # square that meets Omega_eps has ratio int_0^{1/2} dy/(1-y) = log 2
    m = pw_model(1.0)
    geo = LevelSetGeometry(m, math.exp(-2), math.exp(-1), (-2, 10))
    rep = carleson_test(geo, dyadic_intervals(0, 8, 1), tol_rel=1e-5)
    assert len(rep.squares) == 7
    assert np.allclose(rep.ratios, math.log(2), rtol=1e-4)
    assert rep.max_ratio == pytest.approx(math.log(2), rel=1e-4)


def test_carleson_custom_density():
    m = pw_model(1.0)
    geo = LevelSetGeometry(m, math.exp(-2), math.exp(-1), (-2, 10))
    rep = carleson_test(geo, [(0.0, 4.0)], density=lambda x, y: np.ones(np.shape(x)), tol_rel=1e-6)
    # Lebesgue measure of the square over its side
    assert rep.ratios[0] == pytest.approx(4.0, rel=1e-6)
