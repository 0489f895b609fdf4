import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nnsym.nonlinearity import (POLE, Abs, CReLU, LeakyReLU, ReLU, Tanh, Zab, from_dict, parse, residue_at)


def limit_residue(f, p, r=1e-3, n=128):
    # contour average of f around p
    th = 2 * np.pi * np.arange(n) / n
    z = p + r * np.exp(1j * th)
    return complex(np.mean(f(z) * (z - p)))


def test_crelu_identity_on_unit_interval():
    assert CReLU().eval_real(0.5) == 0.5
    assert CReLU().eval_real(-2.0) == 0.0 and CReLU().eval_real(3.0) == 1.0


def test_zab_tanh_at_half():
    z = Zab(1.0, math.pi, 0.0, {0: 1.0})
    assert abs(z.eval_real(0.5) - math.tanh(0.5)) < 1e-15


@pytest.mark.parametrize("t", [-1.0, 0.25, 0.6, 2.0])
def test_crelu_three_term_identity(t):
    r = CReLU()
    assert r.eval_real(t) - 0.5 * r.eval_real(2 * t) - 0.5 * r.eval_real(2 * t - 1) == 0.0


def test_complex_tanh():
    assert abs(Tanh().eval_complex(1j * math.pi / 4) - 1j) < 1e-15
    assert Tanh().eval_complex(1j * math.pi / 2) is POLE
    assert Tanh().eval_complex(-1j * math.pi / 2) is POLE


def test_tanh_no_overflow():
    v = Tanh().complex_array(np.array([800 + 1j, -800 + 0.3j]))
    assert np.allclose(v, [1, -1])


def test_zab_periodic(rng):
    s = Zab(1.3, 2.1, 0.4, {-1: 0.7, 0: 1.0, 2: -0.5})
    z = rng.uniform(-4, 4, 10) + 1j * rng.uniform(-4, 4, 10)
    assert np.max(np.abs(s.complex_array(z + 2.1j) - s.complex_array(z))) < 1e-10


def test_zab_validation():
    with pytest.raises(ValueError):
        Zab(1.0, 1.0, 0.0, {})
    with pytest.raises(ValueError):
        Zab(-1.0, 1.0, 0.0, {0: 1})
    with pytest.raises(ValueError):
        Zab(1.0, 1.0, 0.0, {0: 1}, growth=1.5)
    with pytest.raises(ValueError):
        LeakyReLU(1.5)


def test_tanh_pole_lattice():
    lat = Tanh().pole_lattice(2.0, 0.5)
    for m in range(-3, 3):
        p = lat.point(0, m)
        assert abs(2.0 * p + 0.5 - 1j * math.pi * (m + 0.5)) < 1e-14


def test_zab_pole_lattice_support():
    s = Zab(1.5, 2.0, 0.0, {-1: 1.0, 3: 2.0})
    lat = s.pole_lattice()
    pts = lat.points(6.0)
    assert {k for _, k, _ in pts} == {-1, 3}
    for p, k, m in pts:
        assert abs(p - (1.5 * k + 2j * (m + 0.5))) < 1e-14


def test_spacing_halves_with_beta():
    t = Tanh()
    assert t.pole_lattice(1.0).spacing / t.pole_lattice(2.0).spacing == 2.0


def test_residue_examples():
    b = 1.7
    s = Zab(1.0, b, 0.0, {0: 1.0})
    assert abs(residue_at(s, 1, 0, 1j * b / 2) - b / math.pi) < 1e-14
    assert abs(limit_residue(s.complex_array, 1j * b / 2) - b / math.pi) < 1e-9
    assert abs(residue_at(Tanh(), 1, 0, 1j * math.pi / 2) - 1) < 1e-14
    assert abs(residue_at(Tanh(), 2, 0, 1j * math.pi / 4) - 0.5) < 1e-14
    assert residue_at(Tanh(), 1, 0, 0.3j) == 0


@given(st.floats(0.2, 3), st.floats(-2, 2), st.integers(-3, 3))
def test_residue_matches_contour(beta, gamma, m):
    p = Tanh().pole_lattice(beta, gamma).point(0, m)
    f = lambda z: Tanh().complex_array(beta * z + gamma)
    assert abs(residue_at(Tanh(), beta, gamma, p) - limit_residue(f, p, r=1e-3 / beta)) < 1e-8


def test_real_nonlinearities():
    t = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
    assert np.array_equal(ReLU()(t), [0, 0, 0, 0.5, 2])
    assert np.array_equal(Abs()(t), [2, 0.5, 0, 0.5, 2])
    assert np.allclose(LeakyReLU(0.1)(t), [-0.2, -0.05, 0, 0.5, 2])
    with pytest.raises(TypeError):
        CReLU().pole_lattice()


@pytest.mark.parametrize("rho", [Tanh(), CReLU(), ReLU(), Abs(), LeakyReLU(0.2),
                                 Zab(1.0, 2.0, 0.5, {0: 1.0, 1: -0.25j})])
def test_dict_round_trip(rho):
    assert from_dict(rho.to_dict()) == rho


def test_parse():
    assert parse("tanh") == Tanh()
    assert parse("leaky:0.3") == LeakyReLU(0.3)
    with pytest.raises(ValueError):
        parse("softplus")


@pytest.mark.parametrize("rho", [Tanh(), Zab(1.3, 2.1, 0.4, {-1: 0.7, 0: 1.0, 2: -0.5})])
def test_real_and_complex_agree(rho):
    t = np.linspace(-7, 7, 301)
    assert np.max(np.abs(rho(t) - rho.complex_array(t + 0j))) < 1e-12
