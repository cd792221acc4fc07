import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from plhomog.ptrig import PExponent, compute_pi_p, cos_p, pi_p_beta, sin_p, trig_table

P_VALUES = [1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 10.0]


def beta_oracle(p):
    """pi_p from the Beta-function evaluation of the defining integral."""
    return 2.0 * math.pi * (p - 1.0) ** (1.0 / p) / (p * math.sin(math.pi / p))


def ivp_oracle(p, x):
    """``v(x), v'(x)`` for ``-(|v'|^(p-2) v')' = |v|^(p-2) v``, ``v(0) = 0``, ``v'(0) = 1``.

    Integrated as a first-order system in ``(v, w = |v'|^(p-2) v')``.
    """
    pc = p / (p - 1.0)

    def rhs(_, y):
        v, w = y
        return [math.copysign(abs(w) ** (pc - 1.0), w), -math.copysign(abs(v) ** (p - 1.0), v)]

    sol = solve_ivp(rhs, (0.0, x), [0.0, 1.0], method="DOP853", rtol=1e-13, atol=1e-14)
    v, w = sol.y[:, -1]
    return v, math.copysign(abs(w) ** (pc - 1.0), w)


@pytest.mark.parametrize("p", P_VALUES)
def test_pi_p_matches_beta_oracle(p):
    assert compute_pi_p(p) == pytest.approx(beta_oracle(p), rel=1e-10)
    assert PExponent.of(p).pi_p == pytest.approx(beta_oracle(p), rel=1e-9)


def test_pi_p_examples():
    assert compute_pi_p(2.0) == pytest.approx(math.pi, rel=1e-12)
    assert round(compute_pi_p(3.0), 3) == 3.047
    assert compute_pi_p(1.5) == pytest.approx(pi_p_beta(1.5), rel=1e-8)


@pytest.mark.parametrize("bad", [1.0, 0.5, -2.0, math.inf, math.nan])
def test_invalid_p_rejected(bad):
    with pytest.raises(ValueError):
        compute_pi_p(bad)
    with pytest.raises(ValueError):
        PExponent.of(bad)


def test_exponent_fields():
    e = PExponent.of(3.0)
    assert 1.0 / e.p + 1.0 / e.p_conj == pytest.approx(1.0, abs=1e-15)
    assert e.half_period_phase == pytest.approx(e.pi_p / 2.0 ** (1.0 / 3.0))


def test_sin_cos_examples():
    for p in (1.5, 2.0, 3.0):
        assert sin_p(p, 0.0) == 0.0
        assert cos_p(p, 0.0) == pytest.approx((p - 1.0) ** (-1.0 / p), abs=1e-12)
    assert sin_p(2.0, math.pi / 2) == pytest.approx(1.0, abs=1e-12)
    assert cos_p(2.0, math.pi / 2) == pytest.approx(0.0, abs=1e-10)
    assert sin_p(3.0, PExponent.of(3.0).pi_p / 2) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", [1.5, 3.0, 4.0])
@pytest.mark.parametrize("x", [0.3, 0.7, 1.4])
def test_sin_cos_against_ivp(p, x):
    # the IVP solution is the (p-1)^(1/p) multiple of sin_p
    v, dv = ivp_oracle(p, x)
    scale = (p - 1.0) ** (1.0 / p)
    assert scale * sin_p(p, x) == pytest.approx(v, abs=1e-8)
    assert scale * cos_p(p, x) == pytest.approx(dv, abs=1e-8)


@pytest.mark.parametrize("p", P_VALUES)
def test_energy_identities(p):
    rng = np.random.default_rng(int(p * 100))
    pi_p = PExponent.of(p).pi_p
    x = rng.uniform(-3 * pi_p, 3 * pi_p, 1000)
    s, c = sin_p(p, x), cos_p(p, x)
    assert np.max(np.abs((p - 1.0) * np.abs(c) ** p + np.abs(s) ** p - 1.0)) < 1e-8
    # IVP-normalized pair v = (p-1)^(1/p) sin_p, v' = (p-1)^(1/p) cos_p
    v, dv = (p - 1.0) ** (1.0 / p) * s, (p - 1.0) ** (1.0 / p) * c
    assert np.max(np.abs((p - 1.0) * np.abs(dv) ** p + np.abs(v) ** p - (p - 1.0))) < 1e-8
    assert np.all(np.abs(s) <= 1.0)


@settings(max_examples=60, deadline=None)
@given(p=st.sampled_from(P_VALUES), x=st.floats(-50.0, 50.0))
def test_symmetries(p, x):
    pi_p = PExponent.of(p).pi_p
    s = sin_p(p, x)
    assert sin_p(p, x + 2 * pi_p) == pytest.approx(s, abs=1e-9)
    assert sin_p(p, -x) == pytest.approx(-s, abs=1e-9)
    assert sin_p(p, pi_p - x) == pytest.approx(s, abs=1e-9)


@pytest.mark.parametrize("p", P_VALUES)
def test_zeros(p):
    pi_p = PExponent.of(p).pi_p
    for j in range(-3, 4):
        assert abs(sin_p(p, j * pi_p)) < 1e-9


def test_p2_degeneracy():
    x = np.linspace(-20, 20, 20001)
    assert np.max(np.abs(sin_p(2.0, x) - np.sin(x))) < 1e-10
    assert np.max(np.abs(cos_p(2.0, x) - np.cos(x))) < 1e-10
    assert abs(PExponent.of(2.0).pi_p - math.pi) < 1e-10


@pytest.mark.parametrize("p", [1.2, 2.0, 3.0, 10.0])
def test_table_samples(p):
    tab = trig_table(p)
    pts = np.array(tab.quarter_period_samples)
    assert np.all(np.diff(pts[:, 0]) > 0) and np.all(np.diff(pts[:, 1]) > 0)
    assert pts[0, 0] == 0.0 and pts[0, 1] == 0.0
    assert pts[-1, 0] == pytest.approx(tab.exponent.pi_p / 2, rel=1e-15)
    assert pts[-1, 1] == pytest.approx(1.0, abs=tab.tolerance)
    assert tab.tolerance < 1e-10


def test_array_shapes():
    x = np.zeros((3, 4))
    assert sin_p(3.0, x).shape == (3, 4)
    assert isinstance(sin_p(3.0, 0.1), float)
