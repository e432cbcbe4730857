import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from hbfock import (KernelEval, LevelSetGeometry, d0, d_eps, d_eps_interval, finite_model, ls_model,
                    power_model, pw_model, verify_lev_bounds)
from hbfock.levelset import one_component_doubling, _seg_dist


def test_d0_oracles():
    assert d0(finite_model([1j, 2 + 1j]), 0.0) == pytest.approx(1.0)
    assert d0(pw_model(1.0), 0.3 + 0.2j) == math.inf
    # nearest zeros of ls(0.3) around 5.5 are 4.7 + i 5^-1.2 and 5.7 + i 6^-1.2
    m = ls_model(0.3)
    assert d0(m, 5.5) == pytest.approx(0.2314422979402203, rel=1e-12)
    assert d0(m, 5.5) == pytest.approx(abs(5.5 - (5.7 + 6 ** -1.2 * 1j)), rel=1e-12)


def test_d_eps_oracles():
    assert d_eps(finite_model([1j]), 0.0, 0.5) == pytest.approx(1 / 3, rel=1e-4)
    for eps in (0.1, 0.3):
        assert d_eps(finite_model([1j]), 0.0, eps) == pytest.approx((1 - eps) / (1 + eps), rel=1e-4)
    for x in (0.0, 2.7, -11.0):
        assert d_eps(pw_model(1.0), x, math.exp(-2)) == pytest.approx(1.0, rel=1e-4)
    assert d_eps(pw_model(math.pi), 2.5, 0.1) == pytest.approx(math.log(10) / (2 * math.pi), rel=1e-4)


def test_d_eps_inside_sublevel_is_zero():
    assert d_eps(finite_model([1j]), 1j, 0.5) == 0.0
    assert d_eps(pw_model(1.0), 3j, 0.1) == 0.0


def test_certified_interval_contains_exact_value():
    iv = d_eps_interval(finite_model([1j]), 0.0, 0.2, rel_tol=1e-6)
    assert iv.lo <= 0.8 / 1.2 <= iv.hi
    assert iv.hi - iv.lo <= 1e-6 * iv.hi


def test_lev_bounds_single_factor():
    st_ = verify_lev_bounds(finite_model([1j]), [0.0], 0.1, 0.5)
    assert st_.reports[0].ratio == pytest.approx(9 / 11, rel=1e-4)


def test_lev_bounds_rejects_samples_in_omega_delta():
    with pytest.raises(ValueError):
        verify_lev_bounds(finite_model([1j]), [1j], 0.1, 0.5)


def test_lev_bounds_pw_translation_invariant():
    st_ = verify_lev_bounds(pw_model(1.0), np.linspace(-5, 5, 6), math.exp(-2), math.exp(-1))
    assert st_.spread == pytest.approx(1.0, abs=1e-6)
    kn = KernelEval(pw_model(1.0)).knorm2(0.0)[0]
    assert st_.reports[0].ratio == pytest.approx(kn, rel=1e-4)


def test_doubling_oracles():
    assert one_component_doubling(pw_model(1.0), (-10, 10), 1.0) == pytest.approx(1.0, abs=1e-9)
    m = power_model(0.75)
    a = one_component_doubling(m, (1, 1000), 1.0)
    b = one_component_doubling(m, (1, 1000), 0.5)
    assert a == pytest.approx(1.1143161596776154, rel=1e-6)
    assert b <= a
    l6 = ls_model(0.6)
    grow = [one_component_doubling(l6, (1, R), 1.0) for R in (10, 30, 100)]
    assert grow[0] < grow[1] < grow[2]
    assert grow[2] > 100 * grow[0]


zero_lists = st.lists(st.tuples(st.floats(-4, 4), st.floats(0.1, 2)), min_size=1, max_size=5)


@given(zero_lists, st.floats(-5, 5), st.floats(0, 2))
def test_d_eps_monotone_in_eps(pts, x, y):
    m = finite_model([complex(a, b) for a, b in pts])
    z = complex(x, y)
    assume(float(m.abs_theta(z)[()]) >= 0.5)
    assert d_eps(m, z, 0.1, rel_tol=1e-5) >= d_eps(m, z, 0.3, rel_tol=1e-5) * (1 - 2e-5)


@given(zero_lists, st.floats(-5, 5), st.floats(0.01, 2))
def test_zero_distance_bounds_outside_omega_delta(pts, x, y):
    delta = 0.5
    zs = np.array([complex(a, b) for a, b in pts])
    m = finite_model(zs)
    z = complex(x, y)
    assume(float(m.abs_theta(z)[()]) >= delta)
    # each factor has modulus at least |Theta| >= delta
    assert np.all(delta * np.abs(z - np.conj(zs)) <= np.abs(z - zs) * (1 + 1e-12))
    assert np.all(np.abs(z - zs) <= np.abs(z - np.conj(zs)) * (1 + 1e-12))
    # Im z <= min(d0, 1/||k_z||^2) / delta
    kn = float(KernelEval(m).knorm2(z)[0])
    assert y <= min(d0(m, z), 1 / kn) / delta * (1 + 1e-12)


@pytest.mark.parametrize("family", [(pw_model, 1.0), (power_model, 0.75), (ls_model, 0.3)])
def test_geometry_distance_field_matches_certified(family):
    m = family[0](family[1])
    geo = LevelSetGeometry(m, 0.1, 0.5, (-2, 12))
    rng = np.random.default_rng(5)
    z = rng.uniform(0, 10, 12) + 1j * rng.uniform(0, 0.6, 12)
    z = z[m.abs_theta(z) >= 0.1]
    field = geo.d_eps(z)
    exact = np.array([d_eps(m, w, 0.1, rel_tol=1e-5) for w in z])
    assert np.allclose(field, exact, rtol=1e-2, atol=1e-6)


def test_boundary_distance_matches_brute_force():
    geo = LevelSetGeometry(ls_model(0.3), 0.1, 0.5, (-2, 18))
    b = geo.boundary("eps")
    rng = np.random.default_rng(1)
    z = rng.uniform(-3, 19, 2000) + 1j * np.exp(rng.uniform(math.log(1e-4), math.log(5), 2000))
    P = np.stack([z.real, z.imag], axis=1)
    ref = np.array([_seg_dist(p[None, :], b.segments).min() for p in P])
    assert np.allclose(b.distance(z), ref, rtol=1e-3, atol=0)


def test_boundary_samples_lie_on_level():
    geo = LevelSetGeometry(power_model(0.75), 0.1, 0.5, (0, 20))
    s = geo.boundary("eps").samples()
    assert np.allclose(s[:, 2], 0.1, rtol=1e-6)
