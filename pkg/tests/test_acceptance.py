"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from plhomog.experiments import (dyadic_eps, fd_oracle_richardson, figure_data, fit_rate,
                                 max_deviation_by_eps, sweep_eps, sweep_k, track_zeros)
from plhomog.homog import (LimitSpectrum, bound_explicit, bound_linear1d, limit_eigenvalue,
                           transform_general)
from plhomog.experiments import applicable_bound
from plhomog.prufer import ProblemSpec, solve_eigen
from plhomog.ptrig import PExponent, compute_pi_p, cos_p, sin_p
from plhomog.weight import build_weight, oleinik_check, oscillation_bound_check

TOL = 1e-8
SMOOTH = ("two-plus-sin", "inv-two-plus-sin", "two-minus-sin")
ALL_PRESETS = ("constant,2", "two-plus-sin", "inv-two-plus-sin", "two-minus-sin", "piecewise,1,4")


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def spec(p=2.0, weight="constant,1", coefficient="constant,1", eps=0.125):
    return ProblemSpec.make(p, weight, coefficient, eps)


def test_criterion_01_constant_exactness():
    worst, slowest, worst_direct = 0.0, 0.0, 0.0
    for p in (1.5, 2.0, 3.0):
        pi_p = PExponent.of(p).pi_p
        s = spec(p=p)
        for k in range(1, 11):
            t0 = time.perf_counter()
            lam = solve_eigen(s, k, tol=TOL).lam
            slowest = max(slowest, time.perf_counter() - t0)
            exact = (k * pi_p) ** p
            truth = solve_eigen(s, k, tol=TOL, route="direct").lam
            worst = max(worst, abs(lam - exact) / exact)
            worst_direct = max(worst_direct, abs(lam - truth) / truth)
    ok = worst <= 1e-6 and worst_direct <= 1e-6 and slowest < 1.0
    report(1, ok, f"max rel err vs (k pi_p)^p {worst:.2e}, vs direct shooting {worst_direct:.2e}, "
                  f"slowest solve {slowest:.3f} s")


def test_criterion_02_two_plus_sin_limit():
    target = math.pi / math.sqrt(2)
    lam = solve_eigen(spec(weight="two-plus-sin", eps=1 / 128), 1, tol=TOL).lam
    err128 = abs(math.sqrt(lam) - target)
    t0 = time.perf_counter()
    fig = figure_data(1, resolution=100, tol=TOL)
    elapsed = time.perf_counter() - t0
    rows = np.array(fig.rows)
    dev = rows[:, 1] - target
    fine = np.abs(dev[rows[:, 0] <= 0.1]).max()
    coarse = np.abs(dev[rows[:, 0] >= 0.5]).max()
    ok = err128 <= 0.01 and elapsed < 30.0 and fine < coarse
    report(2, ok, f"|sqrt(lam) - pi/sqrt2| at eps=1/128 {err128:.2e}; max deviation "
                  f"eps<=0.1 {fine:.2e} vs eps>=0.5 {coarse:.2e}; 100-point sweep {elapsed:.1f} s")


def test_criterion_03_inverse_weight_limit():
    target = math.sqrt(3) * math.pi ** 2
    lam = solve_eigen(spec(weight="inv-two-plus-sin", eps=1 / 128), 1, tol=TOL).lam
    rel = abs(lam - target) / target
    report(3, rel <= 0.01, f"lambda at eps=1/128 {lam:.6f}, target {target:.6f}, rel err {rel:.2e}")


def test_criterion_04_eps_rate():
    eps_list = dyadic_eps(2, 7)
    worst_ratio, min_slope, notes = 0.0, math.inf, []
    for p in (2.0, 3.0):
        for name in SMOOTH:
            recs = sweep_eps(spec(p=p, weight=name), eps_list, [1], tol=TOL)
            fit = fit_rate(recs, "eps", TOL)
            worst_ratio = max(worst_ratio, max(r.ratio for r in recs))
            slope = fit.slope if fit is not None else -math.inf
            min_slope = min(min_slope, slope)
            notes.append(f"{name}/p={p:g}: {slope:.2f}")
    ok = worst_ratio <= 1.0 and min_slope >= 0.9
    report(4, ok, f"max ratio {worst_ratio:.3g}, min eps-slope {min_slope:.3f} ({'; '.join(notes)})")


def test_criterion_05_k_rate():
    recs = sweep_k(spec(weight="two-plus-sin"), 1 / 64, 8, tol=TOL)
    fit = fit_rate(recs, "k", TOL)
    worst_ratio = max(r.ratio for r in recs)
    slope = fit.slope if fit is not None else math.nan
    ok = fit is not None and slope <= 3.3 and worst_ratio <= 1.0
    report(5, ok, f"k-slope {slope:.3f} (limit 3.3, r^2 {fit.r_squared:.4f}), "
                  f"max ratio {worst_ratio:.2e}")


def test_criterion_06_fd_oracle():
    worst, where = 0.0, None
    for name in ALL_PRESETS:
        for eps in (1 / 4, 1 / 8, 1 / 16, 1 / 32):
            s = spec(weight=name, eps=eps)
            for k in range(1, 7):
                lam = solve_eigen(s, k, tol=1e-10).lam
                fd = fd_oracle_richardson(s, k, grid_points=4096).value
                rel = abs(lam - fd) / fd
                if rel > worst:
                    worst, where = rel, (name, eps, k)
    report(6, worst <= 1e-4, f"max rel diff shooting vs Richardson FD {worst:.2e} at {where}")


def test_criterion_07_transform_consistency():
    worst_rel, worst_ratio = 0.0, 0.0
    for p in (2.0, 3.0):
        for a in ("piecewise,1,4", "two-plus-sin"):
            for rho in ("constant,1", "two-plus-sin"):
                for j in (4, 8, 16):
                    s = spec(p=p, weight=rho, coefficient=a, eps=1 / j)
                    tp = transform_general(s)
                    limit = LimitSpectrum.from_spec(s)
                    for k in (1, 2, 3):
                        lam = solve_eigen(s, k, tol=1e-10, route="direct").lam
                        mu = solve_eigen(tp.to_spec(), k, tol=1e-10).lam
                        worst_rel = max(worst_rel, abs(mu - tp.mu_scale * lam) / mu)
                        rep = applicable_bound(s, k, abs(lam - limit_eigenvalue(limit, k)))
                        assert rep.which == "general_eq"
                        worst_ratio = max(worst_ratio, rep.ratio)
    ok = worst_rel <= 1e-5 and worst_ratio <= 1.0
    report(7, ok, f"max rel |mu - L_eps^p lam| {worst_rel:.2e}, max bound ratio {worst_ratio:.3g}")


def test_criterion_08_zero_convergence():
    table = track_zeros(spec(weight="two-plus-sin"), dyadic_eps(3, 7), 4, tol=1e-10)
    devs = max_deviation_by_eps(table)[::-1]  # decreasing eps
    floor = 1e-7
    trend = all(b <= max(a, floor) for (_, a), (_, b) in zip(devs, devs[1:]))
    converged = devs[-1][1] <= max(devs[0][1], floor)
    worst_ratio = max(r.ratio for r in table)
    ok = trend and converged and worst_ratio <= 1.0
    report(8, ok, "max_j |x_j - j/4| along eps=1/8..1/128: "
                  + ", ".join(f"{d:.1e}" for _, d in devs)
                  + f" (noise floor {floor:g}); max ratio {worst_ratio:.2e}")


def test_criterion_09_special_functions():
    t0 = time.perf_counter()
    ok = True
    rng = np.random.default_rng(9)
    worst = {"beta": 0.0, "energy": 0.0, "symmetry": 0.0, "period": 0.0}
    for p in (1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 10.0):
        oracle = 2 * math.pi * (p - 1) ** (1 / p) / (p * math.sin(math.pi / p))
        pi_p = PExponent.of(p).pi_p
        worst["beta"] = max(worst["beta"], abs(compute_pi_p(p) - oracle), abs(pi_p - oracle))
        x = rng.uniform(-3 * pi_p, 3 * pi_p, 1000)
        s, c = sin_p(p, x), cos_p(p, x)
        worst["energy"] = max(worst["energy"],
                              np.max(np.abs((p - 1) * np.abs(c) ** p + np.abs(s) ** p - 1)))
        worst["symmetry"] = max(worst["symmetry"], np.max(np.abs(sin_p(p, -x) + s)),
                                np.max(np.abs(sin_p(p, pi_p - x) - s)))
        worst["period"] = max(worst["period"], np.max(np.abs(sin_p(p, x + 2 * pi_p) - s)))
    elapsed = time.perf_counter() - t0
    ok = (worst["beta"] <= 1e-9 and worst["energy"] <= 1e-8 and worst["symmetry"] <= 1e-9
          and worst["period"] <= 1e-9 and elapsed < 10.0)
    report(9, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f"; {elapsed:.2f} s")


def test_criterion_10_oscillation_properties():
    presets = [build_weight(n) for n in ALL_PRESETS]
    rng = np.random.default_rng(10)
    violations, cases, worst = 0, 0, 0.0

    def sample():
        w = presets[rng.integers(len(presets))]
        eps = float(rng.uniform(1e-3, 0.5))
        n = int(rng.integers(3, 40))
        x = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, n)), [1.0]])
        v = rng.normal(size=n + 2)
        v[0] = v[-1] = 0.0
        return w, eps, x, v

    for _ in range(200):
        lhs, rhs = oleinik_check(*sample())
        cases += 1
        violations += lhs > rhs + 1e-10
        worst = max(worst, lhs / rhs if rhs > 0 else 0.0)
    for p in (1.5, 2.0, 3.0):
        for _ in range(200):
            w, eps, x, u = sample()
            lhs, rhs = oscillation_bound_check(w, eps, x, u, p)
            cases += 1
            violations += lhs > rhs + 1e-10
            worst = max(worst, lhs / rhs if rhs > 0 else 0.0)
    report(10, violations == 0, f"{cases} random cases, {violations} violations, "
                                f"max lhs/rhs {worst:.3f}")


def test_criterion_11_explicit_constant_cross_check():
    rho = build_weight("two-plus-sin")
    a = bound_explicit(rho, 1.0, 1.0, 2.0, 1, 0.1, 1).constant
    b = bound_linear1d(rho, 0.1, 1).constant
    rel = abs(a - b) / b
    report(11, rel <= 1e-12, f"explicit N=1 constant {a:.12g} vs linear 1-D {b:.12g}, "
                             f"rel diff {rel:.1e}")
