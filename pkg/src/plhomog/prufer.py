"""Shooting solver for the 1-D weighted p-Laplacian eigenproblem

    -(a(x/eps) |u'|^(p-2) u')' = lam rho(x/eps) |u|^(p-2) u  on (0, l),
    u(0) = u(l) = 0.

For constant ``a`` and a smooth weight the equation is shot in Pruefer
phase/amplitude form; the phase of the k-th eigenfunction at ``l`` is
``k * pi_p / (p-1)^(1/p)``.  Piecewise weights are shot through the direct
first-order system in ``(u, a|u'|^(p-2)u')`` with an unwrapped polar angle, and
a non-constant coefficient is first removed by the change of variables in
:mod:`plhomog.homog`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import _kernels
from .ptrig import PExponent, trig_table
from .weight import PeriodicWeight, build_weight

__all__ = [
    "BracketError",
    "EigenResult",
    "IntegrationError",
    "MIN_EPS",
    "PhaseState",
    "ProblemSpec",
    "SolverError",
    "Trace",
    "a_priori_bracket",
    "integrate_direct",
    "integrate_phase",
    "isolating_bracket",
    "phase_rhs",
    "reconstruct_eigenfunction",
    "solve_eigen",
]

MIN_EPS = 1e-4
RTOL = 1e-9
ATOL = 1e-11
MAX_ITER = 200
_NO_STOPS = np.zeros(0)


class SolverError(RuntimeError):
    """The shooting solver could not produce an eigenvalue."""


class BracketError(SolverError):
    """No valid bracket for the requested eigenvalue."""


class IntegrationError(SolverError):
    """The ODE integration failed (step-size underflow or non-finite state)."""


_STATUS_TEXT = {
    _kernels.UNDERFLOW: "step size underflow (problem too stiff at this tolerance)",
    _kernels.NONFINITE: "non-finite state encountered",
    _kernels.TOO_MANY_STEPS: "step budget exhausted",
}


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """One eigenproblem instance.

    Parameters
    ----------
    p : PExponent
    weight : PeriodicWeight
        The weight ``rho``.
    coefficient : PeriodicWeight
        The coefficient ``a``; constant 1 when built through :meth:`make`
        without one.
    eps : float
        Oscillation scale, at least ``MIN_EPS``.
    length : float
        Interval length ``l``.
    """

    p: PExponent
    weight: PeriodicWeight
    coefficient: PeriodicWeight
    eps: float
    length: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.length) and self.length > 0):
            raise ValueError(f"interval length must be positive, got {self.length!r}")
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise ValueError(f"eps must be positive, got {self.eps!r}")
        if self.eps < MIN_EPS:
            raise ValueError(f"eps = {self.eps!r} is below {MIN_EPS}; the oscillations would "
                             "not be resolved at the fixed step budget")
        for w in (self.weight, self.coefficient):
            if not (w.lower > 0 and math.isfinite(w.upper)):
                raise ValueError(f"weight {w.name!r} must stay between positive bounds")

    @classmethod
    def make(cls, p, weight="constant,1", coefficient="constant,1", eps=0.1, length=1.0):
        """Build from plain values; weights may be preset strings or dicts."""
        p = p if isinstance(p, PExponent) else PExponent.of(p)
        weight = weight if isinstance(weight, PeriodicWeight) else build_weight(weight)
        coefficient = (coefficient if isinstance(coefficient, PeriodicWeight)
                       else build_weight(coefficient))
        return cls(p, weight, coefficient, float(eps), float(length))

    def with_eps(self, eps: float) -> "ProblemSpec":
        return ProblemSpec(self.p, self.weight, self.coefficient, float(eps), self.length)

    @property
    def coefficient_constant(self) -> bool:
        return self.coefficient.is_constant

    @property
    def default_route(self) -> str:
        if not self.coefficient_constant:
            return "transform"
        return "prufer" if self.weight.smooth else "direct"

    def stops(self) -> np.ndarray:
        """Jump points of ``rho(x/eps)`` and ``a(x/eps)`` strictly inside ``(0, l)``."""
        jumps = np.unique(np.concatenate([self.weight.jumps, self.coefficient.jumps]))
        if jumps.size == 0:
            return _NO_STOPS
        m = np.arange(0, int(math.ceil(self.length / self.eps)) + 1)
        pts = ((m[:, None] + jumps[None, :]) * self.eps).ravel()
        tiny = 1e-12 * self.length
        return np.unique(pts[(pts > tiny) & (pts < self.length - tiny)])

    def to_dict(self) -> dict:
        return {"p": self.p.p, "eps": self.eps, "length": self.length,
                "weight": self.weight.to_dict(), "coefficient": self.coefficient.to_dict()}


@dataclass(frozen=True)
class PhaseState:
    """Pruefer phase ``phi`` and amplitude ``amp`` at position ``x``."""

    x: float
    phi: float
    amp: float


@dataclass(frozen=True, eq=False)
class Trace:
    """Accepted integrator points with one-sided derivatives for dense output.

    ``y`` holds the two state components, ``dy_right`` / ``dy_left`` their
    derivatives seen from the right / left (they differ only at jumps of the
    weight), ``angle`` the unwrapped polar angle of the direct system.
    """

    x: np.ndarray
    y: np.ndarray
    dy_right: np.ndarray
    dy_left: np.ndarray
    angle: np.ndarray
    steps: int
    rejected: int

    @classmethod
    def from_kernel(cls, rows, nacc, nrej):
        return cls(rows[:, 0].copy(), rows[:, 1:3].copy(), rows[:, 3:5].copy(),
                   rows[:, 5:7].copy(), rows[:, 7].copy(), int(nacc), int(nrej))

    def interpolate(self, xq, component: int = 0):
        """Cubic Hermite dense output of one state component."""
        xq = np.asarray(xq, dtype=float)
        x = self.x
        i = np.clip(np.searchsorted(x, xq, side="right") - 1, 0, len(x) - 2)
        h = x[i + 1] - x[i]
        s = (xq - x[i]) / h
        y0 = self.y[i, component]
        y1 = self.y[i + 1, component]
        d0 = self.dy_right[i, component] * h
        d1 = self.dy_left[i + 1, component] * h
        return (y0 * (2 * s ** 3 - 3 * s ** 2 + 1) + d0 * (s ** 3 - 2 * s ** 2 + s)
                + y1 * (-2 * s ** 3 + 3 * s ** 2) + d1 * (s ** 3 - s ** 2))

    def solve_level(self, i: int, level: float, component: int = 0) -> float:
        """Position inside step ``i`` where the Hermite interpolant hits ``level``."""
        a, b = self.x[i], self.x[i + 1]
        fa = self.y[i, component] - level
        fb = self.y[i + 1, component] - level
        if fa == 0.0:
            return float(a)
        if fb == 0.0:
            return float(b)
        if fa * fb > 0:
            # the cubic dips across the level without the endpoints noticing
            xs = np.linspace(a, b, 65)
            vs = self.interpolate(xs, component) - level
            j = np.nonzero(np.sign(vs[:-1]) * np.sign(vs[1:]) <= 0)[0]
            if j.size == 0:
                return float(a if abs(fa) < abs(fb) else b)
            a, b = xs[j[0]], xs[j[0] + 1]
        return optimize.brentq(lambda t: float(self.interpolate(t, component)) - level, a, b,
                               xtol=1e-15, rtol=4 * np.finfo(float).eps)

    def states(self) -> list[PhaseState]:
        return [PhaseState(float(x), float(f), float(a))
                for x, f, a in zip(self.x, self.y[:, 0], self.y[:, 1])]


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Outcome of :func:`solve_eigen`.

    ``phase_at_end`` is the Pruefer phase at ``l`` (the direct route reports
    its polar angle rescaled to the same units, so the target is always
    ``k * p.half_period_phase``).  ``residual`` is the phase mismatch in
    phase mode and ``|u(l)|`` (with ``u'(0) = 1``-type scaling) in endpoint
    mode.
    """

    k: int
    lam: float
    phase_at_end: float
    zeros: list
    function_samples: list
    iterations: int
    residual: float
    mode: str = "phase"
    route: str = "prufer"
    bracket: tuple = (math.nan, math.nan)
    steps: int = 0
    _solution: object = field(default=None, repr=False)

    @property
    def eigenvalue(self) -> float:
        return self.lam


# --------------------------------------------------------------------------
# integration

def _weight_args(spec: ProblemSpec, route: str):
    if route == "prufer":
        # constant coefficient c folded into the weight: r = rho / c
        scale = 1.0 / float(spec.coefficient.par[0])
        return spec.weight.kernel_args + spec.coefficient.kernel_args, scale
    return spec.weight.kernel_args + spec.coefficient.kernel_args, 1.0


def _check_prufer(spec: ProblemSpec):
    if not spec.coefficient_constant:
        raise ValueError("the Pruefer system needs a constant coefficient; "
                         "transform the problem first (see homog.transform_general)")
    if not spec.weight.smooth:
        raise ValueError(f"weight {spec.weight.name!r} is piecewise; its derivative is "
                         "undefined, use integrate_direct")


def _max_step(spec: ProblemSpec, lam: float) -> float:
    p = spec.p
    # shortest local half-wave, (a / (lam rho))^(1/p) pi_p
    half_wave = p.pi_p * (spec.coefficient.lower / (lam * spec.weight.upper)) ** (1.0 / p.p)
    return min(spec.eps / 20.0, spec.length / 16.0, 0.25 * half_wave)


def _run(spec: ProblemSpec, lam: float, route: str, record: bool, start=(0.0, 0.0, 1.0),
         end=None, hmax=None):
    if not (math.isfinite(lam) and lam > 0):
        raise ValueError(f"lambda must be positive, got {lam!r}")
    mode = 0 if route == "prufer" else 1
    wargs, scale = _weight_args(spec, route)
    stops = _NO_STOPS if mode == 0 else spec.stops()
    x0, y00, y01 = start
    x1 = spec.length if end is None else end
    hmax = _max_step(spec, lam) if hmax is None else hmax
    tab = trig_table(spec.p.p)
    _, pi_p, lt, lv, ld, ut, uv, ud = tab.kernel_args
    cap = int(1.5 * (x1 - x0) / hmax) + 2 * stops.size + 256
    while True:
        y0, y1, angle, nacc, nrej, status, rows = _kernels.integrate(
            mode, x0, x1, y00, y01, RTOL, ATOL, hmax, stops, record, cap,
            lam, spec.p.p, spec.eps, scale, *wargs, pi_p, lt, lv, ld, ut, uv, ud)
        if status == _kernels.OVERFLOW:
            cap *= 2
            continue
        if status != _kernels.OK:
            raise IntegrationError(f"integration failed at lambda={lam!r}: "
                                   f"{_STATUS_TEXT.get(status, status)}")
        break
    trace = Trace.from_kernel(rows, nacc, nrej) if record else None
    return y0, y1, angle, trace, nacc


def phase_rhs(spec: ProblemSpec, lam: float, state: PhaseState) -> tuple[float, float]:
    """Right-hand sides ``(phi', amp')`` of the Pruefer system at ``state``."""
    _check_prufer(spec)
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam!r}")
    wargs, scale = _weight_args(spec, "prufer")
    _, pi_p, lt, lv, ld, ut, uv, ud = trig_table(spec.p.p).kernel_args
    x = float(state.x)
    return _kernels.rhs(0, x, x - 1.0, x + 1.0, float(state.phi), float(state.amp), float(lam),
                        spec.p.p, spec.eps, scale, *wargs, pi_p, lt, lv, ld, ut, uv, ud)


def integrate_phase(spec: ProblemSpec, lam: float, record: bool = True):
    """Integrate the Pruefer system from ``phi(0) = 0, amp(0) = 1`` to ``l``.

    Returns
    -------
    phi_end : float
    trace : Trace or None
        Column 0 of ``trace.y`` is ``phi``, column 1 the amplitude.
    """
    _check_prufer(spec)
    phi, _, _, trace, _ = _run(spec, float(lam), "prufer", record)
    return phi, trace


def integrate_direct(spec: ProblemSpec, lam: float, record: bool = True):
    """Integrate ``u' = |w/a|^(p'-2) w/a``, ``w' = -lam rho |u|^(p-2) u`` from ``(0, 1)``.

    Steps land exactly on every jump of ``rho(x/eps)`` and ``a(x/eps)``.

    Returns
    -------
    u_end : float
    trace : Trace or None
        Columns of ``trace.y`` are ``u`` and ``w``; ``trace.angle`` is the
        unwrapped ``atan2(u, w)``, which equals ``j pi`` at the j-th zero.
    """
    u, _, _, trace, _ = _run(spec, float(lam), "direct", record)
    return u, trace


def _phase_end(spec, lam, route):
    """Phase at ``l`` in units where each nodal domain adds ``half_period_phase``."""
    y0, _, angle, _, n = _run(spec, lam, route, False)
    if route == "prufer":
        return y0, n
    return angle / math.pi * spec.p.half_period_phase, n


def _endpoint_sign(spec, lam, route):
    y0, _, _, _, _ = _run(spec, lam, route, False)
    if route == "prufer":
        kap = spec.p.elbert_scale
        return float(trig_table(spec.p.p).sin(kap * y0)), y0
    return y0, None


# --------------------------------------------------------------------------
# brackets and bisection

def a_priori_bracket(spec: ProblemSpec, k: int) -> tuple[float, float]:
    """``alpha mu_k / rho+ <= lam_k <= beta mu_k / rho-`` with ``mu_k = (k pi_p / l)^p``."""
    mu = (k * spec.p.pi_p / spec.length) ** spec.p.p
    a, r = spec.coefficient, spec.weight
    return a.lower * mu / r.upper, a.upper * mu / r.lower


def _bisect_phase(spec, route, target, lo, hi, tol, max_expand=30):
    """Bisection for ``phase_end(lam) = target`` from a padded bracket."""
    steps = 0
    lo *= 1.0 - 1e-3
    hi *= 1.0 + 1e-3
    for _ in range(max_expand):
        f, n = _phase_end(spec, lo, route)
        steps += n
        if f < target:
            break
        lo *= 0.5
    else:
        raise BracketError(f"could not bracket phase {target!r} from below; "
                           "weight bounds inconsistent with the solution")
    for _ in range(max_expand):
        f, n = _phase_end(spec, hi, route)
        steps += n
        if f > target:
            break
        hi *= 2.0
    else:
        raise BracketError(f"could not bracket phase {target!r} from above; "
                           "weight bounds inconsistent with the solution")
    bracket = (lo, hi)
    it = 0
    while hi - lo > tol * 0.5 * (lo + hi):
        if it >= MAX_ITER:
            raise SolverError(f"bisection did not converge in {MAX_ITER} iterations")
        mid = 0.5 * (lo + hi)
        f, n = _phase_end(spec, mid, route)
        steps += n
        if f < target:
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), it, bracket, steps


def isolating_bracket(spec: ProblemSpec, k: int, route: str | None = None, tol: float = 1e-4):
    """Bracket containing ``lam_k`` and no other eigenvalue.

    The ends are the parameters at which the end phase equals
    ``(k - 1/2)`` and ``(k + 1/2)`` half-period phases; ``u(l)`` changes sign
    exactly once in between.
    """
    route = route or spec.default_route
    if route == "transform":
        raise ValueError("isolating_bracket works on a weight-only problem")
    hp = spec.p.half_period_phase
    lo0, hi0 = a_priori_bracket(spec, k)
    lo_k = a_priori_bracket(spec, k - 0.5)[0] if k > 1 else 0.25 * lo0
    lam_lo, _, _, _ = _bisect_phase(spec, route, (k - 0.5) * hp, lo_k, hi0, tol)
    lam_hi, _, _, _ = _bisect_phase(spec, route, (k + 0.5) * hp, lo0,
                                    a_priori_bracket(spec, k + 0.5)[1], tol)
    return lam_lo, lam_hi


def _bisect_endpoint(spec, route, lo, hi, tol):
    s_lo, _ = _endpoint_sign(spec, lo, route)
    s_hi, _ = _endpoint_sign(spec, hi, route)
    if s_lo == 0.0:
        return lo, 0
    if s_hi == 0.0:
        return hi, 0
    if np.sign(s_lo) == np.sign(s_hi):
        raise BracketError(f"u(l) has the same sign at both ends of ({lo!r}, {hi!r})")
    it = 0
    while hi - lo > tol * 0.5 * (lo + hi):
        if it >= MAX_ITER:
            raise SolverError(f"bisection did not converge in {MAX_ITER} iterations")
        mid = 0.5 * (lo + hi)
        s, _ = _endpoint_sign(spec, mid, route)
        if s == 0.0:
            return mid, it + 1
        if np.sign(s) == np.sign(s_lo):
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), it


# --------------------------------------------------------------------------
# solve

def solve_eigen(spec: ProblemSpec, k: int, tol: float = 1e-8, mode: str = "phase",
                bracket=None, route: str = "auto", samples: int = 201) -> EigenResult:
    """Find the k-th eigenvalue by shooting with bisection.

    Parameters
    ----------
    spec : ProblemSpec
    k : int
        Eigenvalue index, ``k >= 1``.
    tol : float
        Relative bracket width at which bisection stops.
    mode : {"phase", "endpoint"}
        ``phase`` bisects on the monotone end phase against ``k`` half
        periods.  ``endpoint`` bisects on the sign of ``u(l)`` inside
        ``bracket`` (or an automatically isolated one).
    route : {"auto", "prufer", "direct", "transform"}
        Which system is integrated.  ``auto`` picks the Pruefer system for
        smooth weights, the direct system for piecewise ones, and the
        change of variables when the coefficient is not constant.
    samples : int
        Number of eigenfunction samples stored in the result.
    """
    k = int(k)
    if k < 1:
        raise ValueError(f"eigenvalue index must be >= 1, got {k}")
    if not (tol > 0):
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    if mode not in ("phase", "endpoint"):
        raise ValueError(f"unknown mode {mode!r}; use 'phase' or 'endpoint'")
    if route == "auto":
        route = spec.default_route
    if route not in ("prufer", "direct", "transform"):
        raise ValueError(f"unknown route {route!r}")
    if route == "transform":
        return _solve_transformed(spec, k, tol, mode, bracket, samples)
    if route == "prufer":
        _check_prufer(spec)

    hp = spec.p.half_period_phase
    if mode == "phase":
        lo, hi = bracket if bracket is not None else a_priori_bracket(spec, k)
        lam, it, used, steps = _bisect_phase(spec, route, k * hp, lo, hi, tol)
    else:
        used = tuple(bracket) if bracket is not None else isolating_bracket(spec, k, route)
        lam, it = _bisect_endpoint(spec, route, used[0], used[1], tol)
        steps = 0

    if route == "prufer":
        phi_end, trace = integrate_phase(spec, lam)
        phase_end = phi_end
    else:
        _, trace = integrate_direct(spec, lam)
        phase_end = trace.angle[-1] / math.pi * hp
    steps += trace.steps
    zeros = _zeros(spec, lam, trace, k, route)
    sol = _Solution(spec, lam, trace, route)
    if mode == "phase":
        residual = abs(phase_end - k * hp)
    else:
        residual = abs(float(sol.u(np.array([spec.length]))[0]))
    xs, us = sol.sample(samples, "max")
    return EigenResult(k=k, lam=float(lam), phase_at_end=float(phase_end), zeros=zeros,
                       function_samples=list(zip(xs.tolist(), us.tolist())), iterations=it,
                       residual=float(residual), mode=mode, route=route, bracket=tuple(used),
                       steps=int(steps), _solution=sol)


def _zeros(spec, lam, trace, k, route):
    hp = spec.p.half_period_phase
    out = []
    if route == "prufer":
        phi = trace.y[:, 0]
        for j in range(1, k):
            i = int(np.searchsorted(phi, j * hp, side="left")) - 1
            i = min(max(i, 0), len(phi) - 2)
            # the phase oscillates on the eps scale; re-shoot the crossing step finely
            a, b = trace.x[i], trace.x[i + 1]
            _, _, _, fine, _ = _run(spec, lam, route, True, start=(a, *trace.y[i]), end=b,
                                    hmax=(b - a) / 64.0)
            m = int(np.searchsorted(fine.y[:, 0], j * hp, side="left")) - 1
            m = min(max(m, 0), len(fine.x) - 2)
            out.append(fine.solve_level(m, j * hp, 0))
    else:
        ang = trace.angle
        for j in range(1, k):
            i = int(np.searchsorted(ang, j * math.pi, side="left")) - 1
            i = min(max(i, 0), len(ang) - 2)
            # u vanishes inside the step where the angle crosses j*pi
            out.append(trace.solve_level(i, 0.0, 0))
    return out


class _Solution:
    """Dense eigenfunction evaluation for one solved eigenpair."""

    def __init__(self, spec, lam, trace, route):
        self.spec, self.lam, self.trace, self.route = spec, lam, trace, route

    def u(self, x):
        x = np.asarray(x, dtype=float)
        if self.route == "direct":
            return self.trace.interpolate(x, 0)
        spec = self.spec
        p = spec.p
        phi = self.trace.interpolate(x, 0)
        amp = self.trace.interpolate(x, 1)
        r = spec.weight.evaluate(x / spec.eps) / float(spec.coefficient.par[0])
        s = trig_table(p.p).sin(p.elbert_scale * phi)
        return (self.lam * r / (p.p - 1.0)) ** (-1.0 / p.p) * amp * s

    def slope0(self):
        """``u'(0)``; 1 for the Pruefer start, ``a(0)^(1-p')`` for the direct one."""
        if self.route == "prufer":
            return 1.0
        return abs(1.0 / float(self.spec.coefficient.evaluate(0.0))) ** (self.spec.p.p_conj - 1.0)

    def sample(self, samples, normalize):
        xs = np.linspace(0.0, self.spec.length, int(samples))
        us = self.u(xs)
        us[0] = 0.0
        return xs, _normalize(us, normalize, self.slope0())


def _normalize(us, how, slope0):
    if how == "max":
        m = float(np.max(np.abs(us)))
        return us / m if m > 0 else us
    if how == "slope":
        return us / slope0
    if how in (None, "none"):
        return us
    raise ValueError(f"unknown normalization {how!r}; use 'max', 'slope' or 'none'")


def reconstruct_eigenfunction(spec: ProblemSpec, result: EigenResult, samples: int = 201,
                              normalize: str = "max"):
    """Sample the eigenfunction of ``result`` on a uniform grid.

    ``normalize="max"`` scales to ``max|u| = 1``; ``"slope"`` to ``u'(0) = 1``.
    Returns a list of ``(x, u)`` pairs.
    """
    sol = result._solution
    if sol is None or sol.spec is not spec:
        sol = _solution_for(spec, result)
    xs, us = sol.sample(samples, normalize)
    return list(zip(xs.tolist(), us.tolist()))


def _solution_for(spec, result):
    route = result.route
    if route == "transform":
        from .homog import transform_general
        tp = transform_general(spec)
        inner = solve_eigen(tp.to_spec(), result.k, mode="phase",
                            bracket=(result.lam * tp.mu_scale * (1 - 1e-6),
                                     result.lam * tp.mu_scale * (1 + 1e-6)))
        return _TransformedSolution(tp, result.lam, inner._solution)
    if route == "prufer":
        _, trace = integrate_phase(spec, result.lam)
    else:
        _, trace = integrate_direct(spec, result.lam)
    return _Solution(spec, result.lam, trace, route)


class _TransformedSolution:
    """Eigenfunction of the original problem via ``u(x) = w(P_eps(x) / L_eps)``."""

    def __init__(self, tp, lam, inner):
        self.tp, self.lam, self.inner = tp, lam, inner
        self.spec = None

    def u(self, x):
        return self.inner.u(self.tp.x_to_z(np.asarray(x, dtype=float)))

    def slope0(self):
        tp = self.tp
        return self.inner.slope0() * tp.dz_dx(0.0)

    def sample(self, samples, normalize):
        xs = np.linspace(0.0, self.tp.length, int(samples))
        us = self.u(xs)
        us[0] = 0.0
        return xs, _normalize(us, normalize, self.slope0())


def _solve_transformed(spec, k, tol, mode, bracket, samples):
    from .homog import transform_general
    tp = transform_general(spec)
    inner_spec = tp.to_spec()
    inner_bracket = None
    if bracket is not None:
        inner_bracket = (bracket[0] * tp.mu_scale, bracket[1] * tp.mu_scale)
    inner = solve_eigen(inner_spec, k, tol=tol, mode=mode, bracket=inner_bracket,
                        route="auto", samples=2)
    lam = inner.lam / tp.mu_scale
    sol = _TransformedSolution(tp, lam, inner._solution)
    sol.spec = spec
    xs, us = sol.sample(samples, "max")
    return EigenResult(k=k, lam=float(lam), phase_at_end=inner.phase_at_end,
                       zeros=[float(tp.z_to_x(z)) for z in inner.zeros],
                       function_samples=list(zip(xs.tolist(), us.tolist())),
                       iterations=inner.iterations, residual=inner.residual, mode=mode,
                       route="transform",
                       bracket=(inner.bracket[0] / tp.mu_scale, inner.bracket[1] / tp.mu_scale),
                       steps=inner.steps, _solution=sol)
