"""Convergence sweeps, rate fits, zero tracking, figure data and a p = 2 matrix oracle."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy import linalg

from . import __version__
from .homog import (BoundReport, LimitSpectrum, bound_general_eq, bound_nodal, bound_teo1d,
                    limit_eigenvalue, teo1d_constant, transform_general)
from .homog import _coefficient_primitive
from .prufer import ProblemSpec, SolverError, solve_eigen
from .ptrig import trig_table

__all__ = [
    "CSV_HEADER",
    "ConvergenceRecord",
    "FDEstimate",
    "FigurePayload",
    "RateFit",
    "ZeroRecord",
    "applicable_bound",
    "dyadic_eps",
    "fd_oracle_p2",
    "fd_oracle_richardson",
    "figure_data",
    "fit_rate",
    "max_deviation_by_eps",
    "sweep_eps",
    "sweep_k",
    "track_zeros",
    "write_figure_csv",
    "write_records_csv",
    "write_zero_csv",
]

log = logging.getLogger(__name__)

CSV_HEADER = ("eps", "k", "p", "lambda_eps", "lambda_limit", "abs_err", "bound", "ratio",
              "runtime_ms")
NOISE_FACTOR = 10.0


def dyadic_eps(m_lo: int, m_hi: int) -> list[float]:
    """``[2^-m_lo, ..., 2^-m_hi]``."""
    return [2.0 ** -m for m in range(m_lo, m_hi + 1)]


# --------------------------------------------------------------------------
# finite-difference oracle

@dataclass(frozen=True)
class FDEstimate:
    """Matrix eigenvalue with an error estimate from a grid-halving comparison."""

    value: float
    error: float
    grid_points: int


def _cell_integral(prim, eps, a, b):
    # int_a^b f(x/eps) dx for a tabulated primitive of f
    return eps * (prim(b / eps) - prim(a / eps))


def _fd_eigenvalue(spec: ProblemSpec, k: int, n: int) -> float:
    eps, ell = spec.eps, spec.length
    x = np.linspace(0.0, ell, n + 1)
    h = ell / n
    inv_a = _coefficient_primitive(spec.coefficient, 2.0)
    # harmonic cell averages of a, exact dual-cell averages of rho
    a_half = h / _cell_integral(inv_a, eps, x[:-1], x[1:])
    xm = np.concatenate([[0.0], 0.5 * (x[:-1] + x[1:]), [ell]])
    mass = _cell_integral(spec.weight.primitive, eps, xm[1:-2], xm[2:-1]) / h
    diag = (a_half[:-1] + a_half[1:]) / h ** 2
    off = -a_half[1:-1] / h ** 2
    s = 1.0 / np.sqrt(mass)
    d = diag * s * s
    e = off * s[:-1] * s[1:]
    w = linalg.eigh_tridiagonal(d, e, eigvals_only=True, select="i",
                                select_range=(k - 1, k - 1))
    return float(w[0])


def fd_oracle_p2(spec: ProblemSpec, k: int, grid_points: int = 4000) -> FDEstimate:
    """k-th eigenvalue of the three-point finite-difference discretization (p = 2 only).

    The coefficient enters through harmonic cell averages and the weight
    through exact dual-cell averages, so jumps sitting on grid nodes keep
    the scheme second order.  The error estimate is ``|lam_n - lam_{n/2}| / 3``.
    """
    if spec.p.p != 2.0:
        raise ValueError(f"the finite-difference oracle is linear and needs p = 2, got {spec.p.p}")
    if grid_points < 1000:
        raise ValueError(f"use at least 1000 grid points, got {grid_points}")
    if not 1 <= k < grid_points // 2:
        raise ValueError(f"eigenvalue index {k} out of range for {grid_points} points")
    fine = _fd_eigenvalue(spec, k, grid_points)
    coarse = _fd_eigenvalue(spec, k, grid_points // 2)
    return FDEstimate(fine, abs(fine - coarse) / 3.0, grid_points)


def fd_oracle_richardson(spec: ProblemSpec, k: int, grid_points: int = 4000) -> FDEstimate:
    """Richardson extrapolation ``(4 lam_{2n} - lam_n) / 3`` of :func:`fd_oracle_p2`."""
    coarse = fd_oracle_p2(spec, k, grid_points)
    fine = fd_oracle_p2(spec, k, 2 * grid_points)
    value = (4.0 * fine.value - coarse.value) / 3.0
    return FDEstimate(value, abs(value - fine.value), 2 * grid_points)


# --------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class ConvergenceRecord:
    eps: float
    k: int
    p: float
    lambda_eps: float
    lambda_limit: float
    abs_err: float
    bound: float
    ratio: float
    runtime_ms: float

    def row(self) -> list:
        return [getattr(self, f.name) for f in fields(self)]


def applicable_bound(spec: ProblemSpec, k: int, observed=None):
    """Rate bound for ``spec``: the weight-only one for ``a = 1``, else the transformed one.

    Non-unit intervals are mapped onto ``(0, 1)`` (``eps -> eps/l``) and the
    bound is scaled by ``l^-p``.
    """
    if spec.coefficient.is_constant and float(spec.coefficient.par[0]) == 1.0:
        return bound_teo1d(spec.weight, spec.p, spec.eps, k, spec.length, observed)
    tp = transform_general(spec)
    scale = spec.length ** -spec.p.p
    rep = bound_general_eq(tp, spec.coefficient.upper, spec.weight.lower, spec.p,
                           spec.eps / spec.length, k)
    rep = BoundReport(rep.constant, rep.bound_value * scale, rep.which)
    return rep if observed is None else rep.with_observed(observed)


def _record(spec: ProblemSpec, k: int, tol: float, mode: str, timing: bool):
    limit = limit_eigenvalue(LimitSpectrum.from_spec(spec), k)
    bound = applicable_bound(spec, k).bound_value
    t0 = time.perf_counter()
    try:
        lam = solve_eigen(spec, k, tol=tol, mode=mode, samples=2).lam
    except (SolverError, ValueError, ArithmeticError) as exc:
        log.warning("eps=%r k=%d failed: %s", spec.eps, k, exc)
        lam = math.nan
    ms = (time.perf_counter() - t0) * 1e3 if timing else 0.0
    err = abs(lam - limit)
    ratio = err / bound if bound > 0 else (0.0 if err == 0 else math.inf)
    if math.isnan(lam):
        ratio = math.nan
    return ConvergenceRecord(spec.eps, k, spec.p.p, lam, limit, err, bound, ratio, ms)


def _workers(workers):
    if workers is None:
        return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity")
                   else (os.cpu_count() or 1))
    return max(1, int(workers))


def _run_cells(cells, tol, mode, workers, timing):
    if not cells:
        raise ValueError("sweep needs at least one (eps, k) cell")
    for spec, _ in cells:
        trig_table(spec.p.p)   # build shared caches before fanning out
        LimitSpectrum.from_spec(spec)
    n = _workers(workers)
    if n == 1 or len(cells) == 1:
        out = [_record(s, k, tol, mode, timing) for s, k in cells]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            out = list(pool.map(lambda c: _record(c[0], c[1], tol, mode, timing), cells))
    return sorted(out, key=lambda r: (r.eps, r.k))


def sweep_eps(base: ProblemSpec, eps_list, k_list, tol: float = 1e-8, mode: str = "phase",
              workers=None, timing: bool = True) -> list[ConvergenceRecord]:
    """One record per ``(eps, k)``, sorted by ``(eps, k)``.

    A cell whose solve fails yields a record with NaN eigenvalue instead of
    aborting the sweep.  ``timing=False`` writes zero runtimes so that
    reruns produce identical output.
    """
    eps_list = [float(e) for e in eps_list]
    k_list = [int(k) for k in k_list]
    if not eps_list or not k_list:
        raise ValueError("eps and k lists must be non-empty")
    cells = [(base.with_eps(e), k) for e in eps_list for k in k_list]
    return _run_cells(cells, tol, mode, workers, timing)


def sweep_k(base: ProblemSpec, eps: float, k_max: int, tol: float = 1e-8, mode: str = "phase",
            workers=None, timing: bool = True) -> list[ConvergenceRecord]:
    """Records for ``k = 1..k_max`` at fixed ``eps``; warns when a bound exceeds ``lam_k``."""
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    recs = sweep_eps(base, [eps], range(1, k_max + 1), tol, mode, workers, timing)
    for r in recs:
        if r.bound > r.lambda_limit:
            log.warning("bound %.4g exceeds lambda_%d = %.4g at eps=%r; the estimate is vacuous",
                        r.bound, r.k, r.lambda_limit, r.eps)
    return recs


@dataclass(frozen=True)
class RateFit:
    axis: str
    slope: float
    intercept: float
    r_squared: float
    points_used: int


def fit_rate(records, axis: str = "eps", tol: float = 1e-8, min_points: int = 4):
    """Least-squares fit of ``log abs_err`` against ``log eps`` or ``log k``.

    Records whose error is below ``10 * tol * lambda_limit`` (the solver
    noise floor) or not finite are dropped.  Returns ``None`` when fewer than
    ``min_points`` remain.
    """
    if axis not in ("eps", "k"):
        raise ValueError(f"axis must be 'eps' or 'k', got {axis!r}")
    xs, ys = [], []
    for r in records:
        floor = NOISE_FACTOR * tol * abs(r.lambda_limit)
        if math.isfinite(r.abs_err) and r.abs_err > floor:
            xs.append(math.log(r.eps if axis == "eps" else r.k))
            ys.append(math.log(r.abs_err))
    if len(xs) < max(4, min_points):
        return None
    x = np.array(xs)
    y = np.array(ys)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(axis, float(slope), float(intercept), r2, len(xs))


# --------------------------------------------------------------------------
# zeros

@dataclass(frozen=True)
class ZeroRecord:
    eps: float
    j: int
    x_eps: float
    x_limit: float
    abs_dev: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.abs_dev / self.bound if self.bound > 0 else math.nan


def track_zeros(base: ProblemSpec, eps_list, k: int, tol: float = 1e-8) -> list[ZeroRecord]:
    """Interior zeros of the k-th eigenfunction against the limit zeros ``j l / k``.

    The bound is ``j c eps (k^(p+1) + 1)`` with ``c`` the one-dimensional
    rate constant of the weight.
    """
    if k < 2:
        raise ValueError("zero tracking needs k >= 2 (the first eigenfunction has no interior zero)")
    c = teo1d_constant(base.weight, base.p)
    out = []
    for eps in sorted(float(e) for e in eps_list):
        spec = base.with_eps(eps)
        res = solve_eigen(spec, k, tol=tol, samples=2)
        _, per_j = bound_nodal(k, base.p, eps / base.length, c)
        for j, x in enumerate(res.zeros, start=1):
            xl = j * base.length / k
            out.append(ZeroRecord(eps, j, float(x), float(xl), float(abs(x - xl)),
                                  float(j * per_j * base.length)))
    return out


def max_deviation_by_eps(table) -> list[tuple[float, float]]:
    """``(eps, max_j |x_j^eps - x_j|)`` in increasing ``eps`` order."""
    best: dict[float, float] = {}
    for r in table:
        best[r.eps] = max(best.get(r.eps, 0.0), r.abs_dev)
    return sorted(best.items())


# --------------------------------------------------------------------------
# figures

@dataclass(frozen=True)
class FigurePayload:
    name: str
    columns: tuple
    rows: list
    meta: dict


FIG_EPS_MIN = 1.0 / 128
FIG_SHAPE_EPS = ((0.5, "1/2"), (0.25, "1/4"), (0.0625, "1/16"))


def figure_data(figure_id: int, resolution: int = 100, tol: float = 1e-8,
                samples: int = 401) -> FigurePayload:
    """Data behind the four figures.

    1 and 2: the first eigenvalue over a uniform ``eps`` grid on
    ``[1/128, 1]`` for ``2 + sin`` and ``1/(2 + sin)``.  3 and 4: the first
    and fourth eigenfunctions of ``2 + sin`` at ``eps = 1/2, 1/4, 1/16``
    next to the limit eigenfunction, all scaled to ``u'(0) = 1``.
    """
    figure_id = int(figure_id)
    if figure_id not in (1, 2, 3, 4):
        raise ValueError(f"unknown figure id {figure_id}; choose 1, 2, 3 or 4")
    if figure_id in (1, 2):
        resolution = int(resolution)
        if not 2 <= resolution <= 2000:
            raise ValueError(f"resolution must lie in [2, 2000], got {resolution}")
        weight = "two-plus-sin" if figure_id == 1 else "inv-two-plus-sin"
        base = ProblemSpec.make(2, weight, eps=1.0)
        eps_grid = np.linspace(FIG_EPS_MIN, 1.0, resolution)
        rows = []
        for eps in eps_grid:
            lam = solve_eigen(base.with_eps(float(eps)), 1, tol=tol, samples=2).lam
            rows.append([float(eps), math.sqrt(lam)] if figure_id == 1
                        else [float(eps), lam, math.sqrt(lam)])
        cols = ("eps", "sqrt_lambda") if figure_id == 1 else ("eps", "lambda", "sqrt_lambda")
        limit = limit_eigenvalue(LimitSpectrum.from_spec(base), 1)
        return FigurePayload(f"fig{figure_id}", cols, rows,
                             {"weight": weight, "p": 2.0, "k": 1, "lambda_limit": limit})
    k = 1 if figure_id == 3 else 4
    base = ProblemSpec.make(2, "two-plus-sin", eps=1.0)
    p = base.p
    x = np.linspace(0.0, base.length, int(samples))
    # limit eigenfunction with u'(0) = 1
    freq = p.pi_p * k / base.length
    u_lim = trig_table(p.p).sin(freq * x) * p.elbert_scale / freq
    rows = []
    from .prufer import reconstruct_eigenfunction
    for eps, tag in FIG_SHAPE_EPS:
        spec = base.with_eps(eps)
        res = solve_eigen(spec, k, tol=tol, samples=2)
        pairs = reconstruct_eigenfunction(spec, res, samples=len(x), normalize="slope")
        u = np.array([v for _, v in pairs])
        for xi, ue, ul in zip(x, u, u_lim):
            rows.append([float(xi), float(ue), float(ul), float(ue - ul), tag])
    return FigurePayload(f"fig{figure_id}", ("x", "u_eps", "u_limit", "diff", "eps_tag"), rows,
                         {"weight": "two-plus-sin", "p": 2.0, "k": k,
                          "eps": [e for e, _ in FIG_SHAPE_EPS]})


# --------------------------------------------------------------------------
# CSV output

def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write(target, meta, columns, rows):
    own = isinstance(target, (str, os.PathLike))
    fh = open(target, "w", newline="") if own else target
    try:
        fh.write(f"# plhomog {__version__}\n")
        for key, val in meta.items():
            fh.write(f"# {key}: {json.dumps(val, sort_keys=True)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    finally:
        if own:
            fh.close()


def write_records_csv(records, target, meta=None):
    """Write sweep records under the fixed header, preceded by ``#`` comment lines."""
    _write(target, meta or {}, CSV_HEADER, [r.row() for r in records])


def write_zero_csv(table, target, meta=None):
    cols = ("eps", "j", "x_eps", "x_limit", "abs_dev", "bound", "ratio")
    rows = [[*asdict(r).values(), r.ratio] for r in table]
    _write(target, meta or {}, cols, rows)


def write_figure_csv(payload: FigurePayload, target, meta=None):
    m = dict(payload.meta)
    m.update(meta or {})
    _write(target, m, payload.columns, payload.rows)
