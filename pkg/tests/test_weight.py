import math

import numpy as np
import pytest
from scipy.integrate import quad

from plhomog.weight import (PRESETS, WeightPreset, antiderivative_R, build_weight, eval_scaled,
                            from_ppoly, oleinik_check, oscillation_bound_check, parse_preset)

SMOOTH = ["two-plus-sin", "inv-two-plus-sin", "two-minus-sin"]
ALL = SMOOTH + ["constant,3", "piecewise,1,4"]


def test_two_plus_sin_scalars():
    w = build_weight("two-plus-sin")
    assert w.mean == pytest.approx(2.0, abs=1e-12)
    assert w.lower == pytest.approx(1.0, abs=1e-12)
    assert w.upper == pytest.approx(3.0, abs=1e-12)
    assert w.l1_deviation == pytest.approx(2.0 / math.pi, abs=1e-10)
    assert w.sup_deviation == pytest.approx(1.0, abs=1e-12)
    assert w.smooth and w.smoothness_flag == "smooth"


def test_inv_two_plus_sin_mean():
    w = build_weight("inv-two-plus-sin")
    assert w.mean == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-10)
    ref, _ = quad(lambda t: 1.0 / (2.0 + math.sin(2 * math.pi * t)), 0.0, 1.0, epsabs=1e-13)
    assert w.mean == pytest.approx(ref, abs=1e-10)
    assert w.lower == pytest.approx(1.0 / 3.0) and w.upper == pytest.approx(1.0)


def test_piecewise_scalars():
    w = build_weight("piecewise,1,4")
    assert w.mean == pytest.approx(2.5, abs=1e-12)
    assert (w.lower, w.upper) == (1.0, 4.0)
    assert w.l1_deviation == pytest.approx(1.5, abs=1e-10)
    assert not w.smooth and w.smoothness_flag == "piecewise"
    assert list(w.jumps) == [0.0, 0.5]
    with pytest.raises(ValueError):
        w.derivative(0.2)


def test_constant_scalars():
    w = build_weight("constant,3")
    assert w.is_constant and w.mean == 3.0
    assert w.l1_deviation == 0.0 and w.sup_deviation == 0.0


@pytest.mark.parametrize("bad", ["constant,0", "constant,-1", "piecewise,1,-2", "nope",
                                 "constant", "two-plus-sin,1", "constant,x", ""])
def test_bad_presets_rejected(bad):
    with pytest.raises(ValueError):
        build_weight(bad)


def test_preset_parsing_forms():
    assert parse_preset("piecewise, 1, 4") == WeightPreset("piecewise", (1.0, 4.0))
    assert parse_preset({"name": "two-plus-sin"}) == WeightPreset("two-plus-sin")
    assert build_weight({"name": "constant", "params": [2]}).mean == 2.0
    assert str(WeightPreset("piecewise", (1, 4))) == "piecewise,1.0,4.0"
    with pytest.raises(ValueError) as err:
        WeightPreset("bogus")
    assert all(name in str(err.value) for name in PRESETS)
    w = build_weight("piecewise,1,4")
    assert build_weight(w.to_dict()).mean == w.mean


def test_eval_scaled_examples():
    assert eval_scaled(build_weight("two-plus-sin"), 0.1, 0.05) == pytest.approx(2.0, abs=1e-12)
    c = build_weight("constant,3")
    for eps, x in [(0.1, 0.3), (1e-3, 7.7), (5.0, -2.0)]:
        assert eval_scaled(c, eps, x) == 3.0
    assert eval_scaled(build_weight("piecewise,1,4"), 0.125, 0.07) == 4.0
    assert eval_scaled(build_weight("piecewise,1,4"), 0.125, 0.05) == 1.0
    with pytest.raises(ValueError):
        eval_scaled(c, 0.0, 0.1)


@pytest.mark.parametrize("name", ALL)
def test_eval_scaled_periodicity(name):
    w = build_weight(name)
    rng = np.random.default_rng(1)
    for eps in (0.5, 1 / 8, 1 / 32, 0.013):
        x = rng.uniform(0, 1, 200)
        assert np.max(np.abs(eval_scaled(w, eps, x + eps) - eval_scaled(w, eps, x))) < 1e-9


@pytest.mark.parametrize("name", SMOOTH)
def test_derivative_is_analytic(name):
    w = build_weight(name)
    x = np.linspace(0, 1, 101)
    h = 1e-6
    fd = (w(x + h) - w(x - h)) / (2 * h)
    assert np.max(np.abs(w.derivative(x) - fd)) < 1e-6


def test_antiderivative_examples():
    w = build_weight("two-plus-sin")
    assert antiderivative_R(w, 0.5) == pytest.approx(1.0 / math.pi, abs=1e-10)
    for name in ALL:
        v = build_weight(name)
        assert abs(antiderivative_R(v, 0.0)) < 1e-9
        assert abs(antiderivative_R(v, 1.0)) < 1e-9


@pytest.mark.parametrize("name", ALL)
def test_antiderivative_bound_and_periodicity(name):
    w = build_weight(name)
    x = np.linspace(0, 1, 10001)
    r = antiderivative_R(w, x)
    assert np.max(np.abs(r)) <= 0.5 * w.l1_deviation + 1e-9
    assert np.max(np.abs(antiderivative_R(w, x + 3.0) - r)) < 1e-9


def test_from_ppoly():
    # 1 + x on [0, 1/2), 2 - x on [1/2, 1): continuous tent with mean 1.25
    w = from_ppoly([0.0, 0.5, 1.0], [[1.0, 1.0], [1.5, -1.0]], name="tent")
    assert w.mean == pytest.approx(1.25, abs=1e-12)
    assert w(0.25) == pytest.approx(1.25) and w(0.75) == pytest.approx(1.25)
    assert w.lower == pytest.approx(1.0) and w.upper == pytest.approx(1.5)
    with pytest.raises(ValueError):
        from_ppoly([0.0, 1.0], [[-1.0, 0.5]])


def test_oscillation_examples():
    x = np.linspace(0.0, 1.0, 2001)
    w = build_weight("two-plus-sin")
    assert oscillation_bound_check(w, 0.05, x, np.zeros_like(x), 2.0) == (0.0, 0.0)
    assert oleinik_check(w, 0.05, x, np.zeros_like(x)) == (0.0, 0.0)
    lhs, rhs = oscillation_bound_check(build_weight("constant,2"), 0.05, x, np.sin(np.pi * x), 2.0)
    assert lhs == 0.0 and rhs == 0.0
    v = np.sin(np.pi * x)
    lhs1, rhs1 = oscillation_bound_check(w, 0.05, x, v, 2.0)
    lhs2, rhs2 = oscillation_bound_check(w, 0.025, x, v, 2.0)
    assert lhs1 <= rhs1 and lhs2 <= rhs2
    assert rhs2 == pytest.approx(rhs1 / 2, rel=1e-12)
    # the estimate on u = sin(pi x): ||u||_2 = 1/sqrt 2, ||u'||_2 = pi/sqrt 2
    assert rhs1 == pytest.approx(0.05 * (2 / math.pi) * math.pi / 2, rel=1e-5)
    with pytest.raises(ValueError):
        oleinik_check(w, 0.05, x, v + 1.0)


def _random_case(rng):
    name = ALL[rng.integers(len(ALL))]
    eps = float(rng.uniform(1e-3, 0.5))
    n = int(rng.integers(3, 40))
    x = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, n)), [1.0]])
    v = rng.normal(size=n + 2)
    v[0] = v[-1] = 0.0
    return build_weight(name), eps, x, v


def test_oleinik_property_sweep():
    rng = np.random.default_rng(20240)
    for _ in range(200):
        w, eps, x, v = _random_case(rng)
        lhs, rhs = oleinik_check(w, eps, x, v)
        assert lhs <= rhs + 1e-10


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_power_oscillation_property_sweep(p):
    rng = np.random.default_rng(int(10 * p))
    for _ in range(200):
        w, eps, x, u = _random_case(rng)
        lhs, rhs = oscillation_bound_check(w, eps, x, u, p)
        assert lhs <= rhs + 1e-10
