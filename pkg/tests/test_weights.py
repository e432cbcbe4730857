import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hbfock import (KernelEval, LevelSetGeometry, WeightField, finite_model, ls_model, power_model,
                    pw_model, spectral_data, whitney_cover)
from hbfock.errors import OutOfCoveredRange
from hbfock.weights import w0, w2, w_main, w_one1, w_one2, w_spec, w_tilde


def test_w0_oracle():
    assert w0(pw_model(1.0), 1j)[0] == pytest.approx(math.exp(-1) / 2, rel=1e-12)
    assert w0(pw_model(1.0), -1j)[0] == pytest.approx(math.exp(-1) / 2, rel=1e-12)


def test_w_main_oracles():
    m = pw_model(1.0)
    eps, delta = math.exp(-2), math.exp(-1)
    # d_eps = 1 on the real line, so the bump is 1
    assert w_main(m, 0.0, eps, delta) == pytest.approx(2.0, rel=1e-4)
    # on the imaginary axis d_eps = 1 - y and |E(iy)| = e^y
    y = 0.25
    ref = math.exp(-y) / (1 + y) * (1 + (1 - y) ** -0.5)
    assert w_main(m, 1j * y, eps, delta) == pytest.approx(ref, rel=1e-4)
    # inside Omega_delta there is no bump
    assert w_main(m, 0.8j, eps, delta) == pytest.approx(math.exp(-0.8) / 1.8, rel=1e-12)


def test_w_main_field_matches_single_point():
    m = power_model(0.75)
    geo = LevelSetGeometry(m, 0.1, 0.5, (0, 20))
    W = WeightField("W_main", m, eps=0.1, delta=0.5, geometry=geo)
    for z in (3.3 + 0.05j, 10.0, 14.2 + 0.01j):
        assert W(z)[0] == pytest.approx(w_main(m, z, 0.1, 0.5), rel=1e-2)


def test_w_one2_and_w2_oracles():
    m = pw_model(math.pi)
    assert w_one2(m, 0.3)[0] == pytest.approx(1 + math.sqrt(math.pi), rel=1e-12)
    assert w_one2(m, 0.3 + 0.5j)[0] == pytest.approx(math.exp(-0.5 * math.pi) / 1.5, rel=1e-12)
    m1 = pw_model(1.0)
    assert w2(m1, 2.0)[0] == pytest.approx(1 + 1 / math.sqrt(math.pi), rel=1e-12)


def test_w_one1_switches_off_in_omega_delta():
    m = finite_model([1j])
    assert w_one1(m, 1j, 0.5)[0] == pytest.approx(float(w0(m, 1j)[0]), rel=1e-12)
    k = float(KernelEval(m).knorm2(0.0)[0])
    assert w_one1(m, 0.0, 0.5)[0] == pytest.approx(1 + math.sqrt(k), rel=1e-12)


def test_cover_invariants():
    for m, rng in ((pw_model(1.0), (-8, 8)), (power_model(0.75), (0, 40)), (ls_model(0.3), (-6, 12))):
        cov = whitney_cover(m, 0.1, 0.5, rng)
        assert cov.a[0] <= rng[0] and cov.b[-1] >= rng[1]
        assert all(v == 0 for v in cov.check(m).values())


def test_w_tilde_oracle():
    m = pw_model(1.0)
    cov = whitney_cover(m, math.exp(-2), math.exp(-1), (-4, 4))
    x = 0.3
    L = cov.lengths[cov.locate(x)]
    assert w_tilde(m, x, cov)[0] == pytest.approx(1 + L ** -0.5, rel=1e-12)
    assert w_tilde(m, x + 1j * 2 * L, cov)[0] == pytest.approx(
        math.exp(-2 * L) / (1 + 2 * L), rel=1e-12)
    with pytest.raises(OutOfCoveredRange):
        w_tilde(m, 100.0, cov)


def test_cover_lengths_shrink_toward_zeros():
    m = ls_model(0.6)
    cov = whitney_cover(m, 0.1, 0.5, (1, 30))
    # the smallest interval in a unit window tracks the zero height there
    def smallest(x0):
        sel = (cov.a >= x0) & (cov.b <= x0 + 1)
        return cov.lengths[sel].min()
    assert smallest(24) < smallest(1) / 100


def test_spectral_nodes_pw():
    sd = spectral_data(pw_model(math.pi), (-5, 5))
    assert np.allclose(sd.nodes, np.arange(-5, 5) + 0.5, atol=1e-12)
    assert np.allclose(sd.mu, 1 / math.pi, rtol=1e-12)
    sd1 = spectral_data(pw_model(1.0), (-10, 10))
    assert np.allclose(sd1.nodes, math.pi * (np.arange(-3, 3) + 0.5), atol=1e-12)
    assert np.allclose(sd1.mu, 1.0, rtol=1e-12)


def test_spectral_nodes_single_factor():
    sd = spectral_data(finite_model([1j]), (-3, 3))
    assert np.allclose(sd.nodes, [0.0], atol=1e-12)
    assert np.allclose(sd.mu, [1.0], rtol=1e-12)


def test_w_spec_oracles():
    m = pw_model(math.pi)
    sd = spectral_data(m, (-5, 5))
    n = 5
    t, r = sd.nodes[n], sd.r[n]
    # at a node the relative term is the limit 1/(sqrt(mu) r phi')
    assert w_spec(m, t, sd)[0] == pytest.approx(1 + 1 / (math.sqrt(math.pi) * r), rel=1e-10)
    z = t + r / 2
    ref = 1 + math.sqrt(math.pi) / (2 * abs(math.cos(math.pi * z)))
    assert w_spec(m, z, sd)[0] == pytest.approx(ref, rel=1e-10)
    # off the discs the spectral weight is W0
    assert w_spec(m, t + 0.5, sd)[0] == pytest.approx(1.0, rel=1e-12)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        WeightField("W9", pw_model(1.0))
    with pytest.raises(ValueError):
        WeightField("W_main", pw_model(1.0), delta=0.5)


zero_lists = st.lists(st.tuples(st.floats(-4, 4), st.floats(0.1, 2)), min_size=1, max_size=5)
kinds = st.sampled_from(["W0", "W_one1", "W_one2", "W2"])


@given(zero_lists, kinds, st.floats(-6, 6), st.floats(0, 3))
def test_weights_positive_and_conjugation_symmetric(pts, kind, x, y):
    m = finite_model([complex(a, b) for a, b in pts])
    W = WeightField(kind, m, delta=0.5)
    z = complex(x, y)
    a, b = W(z)[0], W(np.conj(z))[0]
    assert a > 0 and np.isfinite(a)
    assert a == b


@given(zero_lists, kinds, st.floats(-6, 6), st.floats(0, 3))
def test_weights_dominate_w0(pts, kind, x, y):
    m = finite_model([complex(a, b) for a, b in pts])
    z = complex(x, y)
    assert WeightField(kind, m, delta=0.5)(z)[0] >= w0(m, z)[0] * (1 - 1e-12)
