"""1-periodic positive weights and coefficients, their averages and oscillation estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy import integrate, optimize

from ._quad import PeriodicPrimitive, cells, gl_integrate, piecewise_integral

__all__ = [
    "PRESETS",
    "PeriodicWeight",
    "WeightPreset",
    "antiderivative_R",
    "build_weight",
    "eval_scaled",
    "from_ppoly",
    "oleinik_check",
    "oscillation_bound_check",
    "parse_preset",
]

KIND_CONST, KIND_SINE, KIND_INVSINE, KIND_PPOLY = 0, 1, 2, 3

PRESETS = ("constant", "two-plus-sin", "inv-two-plus-sin", "two-minus-sin", "piecewise")
_N_PARAMS = {"constant": 1, "two-plus-sin": 0, "inv-two-plus-sin": 0, "two-minus-sin": 0,
             "piecewise": 2}

_EMPTY_BREAKS = np.zeros(2)
_EMPTY_COEFS = np.zeros((1, 1))


@dataclass(frozen=True)
class WeightPreset:
    name: str
    parameters: tuple[float, ...] = ()

    def __post_init__(self):
        if self.name not in _N_PARAMS:
            raise ValueError(f"unknown weight preset {self.name!r}; choose from {', '.join(PRESETS)}")
        object.__setattr__(self, "parameters", tuple(float(v) for v in self.parameters))
        if len(self.parameters) != _N_PARAMS[self.name]:
            raise ValueError(f"preset {self.name!r} takes {_N_PARAMS[self.name]} parameter(s), "
                             f"got {len(self.parameters)}")

    def to_dict(self) -> dict:
        return {"name": self.name, "params": list(self.parameters)}

    def __str__(self) -> str:
        return ",".join([self.name] + [repr(v) for v in self.parameters])


def parse_preset(spec) -> WeightPreset:
    """Accept ``"NAME[,p1,p2]"``, ``{"name": ..., "params": [...]}`` or a preset."""
    if isinstance(spec, WeightPreset):
        return spec
    if isinstance(spec, dict):
        if "name" not in spec:
            raise ValueError("weight object needs a 'name' field")
        return WeightPreset(spec["name"], tuple(spec.get("params", ())))
    parts = [s.strip() for s in str(spec).split(",") if s.strip()]
    if not parts:
        raise ValueError("empty weight specification")
    try:
        params = tuple(float(v) for v in parts[1:])
    except ValueError as exc:
        raise ValueError(f"bad weight parameters in {spec!r}") from exc
    return WeightPreset(parts[0], params)


@dataclass(frozen=True, eq=False)
class PeriodicWeight:
    """A 1-periodic function bounded between two positive constants.

    Cached scalars (``lower``, ``upper``, ``mean``, ``l1_deviation``,
    ``sup_deviation``) are computed once over one period.  ``jumps`` lists the
    discontinuity points in ``[0, 1)``; a weight without jumps and with a
    continuous derivative is ``smooth``.
    """

    name: str
    kind: int
    par: np.ndarray
    breaks: np.ndarray
    coefs: np.ndarray
    jumps: np.ndarray
    smooth: bool
    lower: float
    upper: float
    mean: float
    l1_deviation: float
    sup_deviation: float
    preset: WeightPreset | None = None
    _primitive: PeriodicPrimitive | None = field(default=None, repr=False)

    @property
    def smoothness_flag(self) -> str:
        return "smooth" if self.smooth else "piecewise"

    @property
    def is_constant(self) -> bool:
        return self.kind == KIND_CONST

    @property
    def kernel_args(self) -> tuple:
        return (self.kind, self.par, self.breaks, self.coefs)

    def evaluate(self, x):
        vals, _ = _weval_many(np.atleast_1d(np.asarray(x, dtype=float)).ravel(), *self.kernel_args)
        return vals[0] if np.ndim(x) == 0 else vals.reshape(np.shape(x))

    __call__ = evaluate

    def derivative(self, x):
        """Analytic derivative; only defined for smooth weights."""
        if not self.smooth:
            raise ValueError(f"weight {self.name!r} is piecewise; it has no derivative")
        _, ders = _weval_many(np.atleast_1d(np.asarray(x, dtype=float)).ravel(), *self.kernel_args)
        return ders[0] if np.ndim(x) == 0 else ders.reshape(np.shape(x))

    def primitive(self, x):
        """``int_0^x rho`` for any real ``x``."""
        return self._primitive(x)

    def to_dict(self) -> dict:
        if self.preset is None:
            raise ValueError(f"weight {self.name!r} was not built from a preset")
        return self.preset.to_dict()


# --------------------------------------------------------------------------
# construction

def build_weight(preset) -> PeriodicWeight:
    """Build a weight from a preset, a ``"NAME,params"`` string or a config dict."""
    preset = parse_preset(preset)
    name, prm = preset.name, preset.parameters
    if name == "constant":
        w = _finish(str(preset), KIND_CONST, [prm[0]])
    elif name == "two-plus-sin":
        w = _finish(name, KIND_SINE, [2.0, 1.0])
    elif name == "two-minus-sin":
        w = _finish(name, KIND_SINE, [2.0, -1.0])
    elif name == "inv-two-plus-sin":
        w = _finish(name, KIND_INVSINE, [2.0, 1.0])
    else:
        a, b = prm
        w = from_ppoly([0.0, 0.5, 1.0], [[a], [b]], name=str(preset))
    return _with_preset(w, preset)


def from_ppoly(breaks, coefs, name: str = "ppoly", jumps=None) -> PeriodicWeight:
    """Piecewise-polynomial weight on ``[0, 1]``.

    ``coefs[i]`` holds ascending-power coefficients in the local variable
    ``x - breaks[i]``.  Jumps are detected from the data unless given.
    """
    breaks = np.asarray(breaks, dtype=float)
    coefs = np.atleast_2d(np.asarray(coefs, dtype=float))
    if breaks[0] != 0.0 or breaks[-1] != 1.0 or np.any(np.diff(breaks) <= 0):
        raise ValueError("breakpoints must increase strictly from 0 to 1")
    if coefs.shape[0] != len(breaks) - 1:
        raise ValueError("need one coefficient row per piece")
    if jumps is None:
        left = _ppoly_end_values(breaks, coefs)
        right = coefs[:, 0]
        # value entering piece i versus value leaving piece i-1 (periodically)
        prev = np.roll(left, 1)
        scale = max(1.0, float(np.max(np.abs(right))))
        jumps = breaks[:-1][np.abs(right - prev) > 1e-12 * scale]
    return _finish(name, KIND_PPOLY, [0.0], breaks, coefs, np.asarray(jumps, dtype=float))


def _with_preset(w: PeriodicWeight, preset: WeightPreset) -> PeriodicWeight:
    object.__setattr__(w, "preset", preset)
    return w


def _ppoly_end_values(breaks, coefs):
    h = np.diff(breaks)
    powers = h[:, None] ** np.arange(coefs.shape[1])
    return np.sum(coefs * powers, axis=1)


def _finish(name, kind, par, breaks=None, coefs=None, jumps=None) -> PeriodicWeight:
    par = np.asarray(par, dtype=float)
    breaks = _EMPTY_BREAKS if breaks is None else breaks
    coefs = _EMPTY_COEFS if coefs is None else coefs
    jumps = np.zeros(0) if jumps is None else np.sort(np.asarray(jumps, dtype=float) % 1.0)

    def f(x):
        v, _ = _weval_many(np.ravel(x), kind, par, breaks, coefs)
        return v.reshape(np.shape(x))

    smooth_breaks = np.unique(np.concatenate([[0.0, 1.0], jumps,
                                              breaks if kind == KIND_PPOLY else []]))
    lower, upper = _extremes(f, smooth_breaks)
    if not lower > 0.0:
        raise ValueError(f"weight {name!r} is not strictly positive (min {lower:.6g})")
    mean = _period_integral(f, kind, smooth_breaks)
    crossings = _crossings(lambda x: f(np.asarray(x)) - mean, smooth_breaks)
    dev_breaks = np.unique(np.concatenate([smooth_breaks, crossings]))
    l1 = _period_integral(lambda x: np.abs(f(x) - mean), kind, dev_breaks)
    sup = max(upper - mean, mean - lower)
    if kind == KIND_CONST:
        l1 = sup = 0.0
    smooth = len(jumps) == 0 and (kind != KIND_PPOLY or _ppoly_c1(breaks, coefs))
    prim = PeriodicPrimitive(f, jumps)
    return PeriodicWeight(name=name, kind=kind, par=par, breaks=breaks, coefs=coefs,
                          jumps=jumps, smooth=bool(smooth), lower=float(lower),
                          upper=float(upper), mean=float(mean), l1_deviation=float(l1),
                          sup_deviation=float(sup), _primitive=prim)


def _ppoly_c1(breaks, coefs):
    if coefs.shape[1] < 2:
        return True  # continuous piecewise constant is constant
    h = np.diff(breaks)
    k = np.arange(1, coefs.shape[1])
    dleft = np.sum(coefs[:, 1:] * k * h[:, None] ** (k - 1), axis=1)
    dright = coefs[:, 1]
    scale = max(1.0, float(np.max(np.abs(dright))))
    return bool(np.all(np.abs(np.roll(dleft, 1) - dright) <= 1e-8 * scale))


def _period_integral(f, kind, breaks):
    if kind == KIND_PPOLY or len(breaks) > 40:
        return piecewise_integral(f, breaks, max_width=1.0 / 64)
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        val, _ = integrate.quad(lambda t: float(f(np.asarray(t))), a, b,
                                epsabs=1e-13, epsrel=1e-13, limit=200)
        total += val
    return total


def _samples(breaks, n_total=8192):
    out = []
    tiny = 1e-13
    for a, b in zip(breaks[:-1], breaks[1:]):
        n = max(8, int(n_total * (b - a)))
        out.append(np.linspace(a + tiny, b - tiny, n + 1))
    return np.concatenate(out)


def _extremes(f, breaks):
    x = _samples(breaks)
    y = f(x)
    res = []
    for sgn, idx in ((1.0, int(np.argmin(y))), (-1.0, int(np.argmax(y)))):
        best = sgn * y[idx]
        j = np.searchsorted(breaks, x[idx], side="right") - 1
        a = max(breaks[j], x[idx] - 2.0 / 8192)
        b = min(breaks[j + 1], x[idx] + 2.0 / 8192)
        if b > a:
            r = optimize.minimize_scalar(lambda t: sgn * float(f(np.asarray(t))), bounds=(a, b),
                                         method="bounded", options={"xatol": 1e-12})
            best = min(best, float(r.fun))
        res.append(sgn * best)
    return res[0], res[1]


def _crossings(g, breaks):
    x = _samples(breaks)
    y = g(x)
    roots = []
    for i in np.nonzero(np.sign(y[:-1]) * np.sign(y[1:]) < 0)[0]:
        if np.searchsorted(breaks, x[i], "right") != np.searchsorted(breaks, x[i + 1], "right"):
            continue  # sign change across a jump
        roots.append(optimize.brentq(lambda t: float(g(t)), x[i], x[i + 1], xtol=1e-15))
    return np.asarray(roots)


# --------------------------------------------------------------------------
# evaluation

def eval_scaled(w: PeriodicWeight, eps: float, x):
    """``rho(x / eps)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return w.evaluate(np.asarray(x, dtype=float) / eps)


def antiderivative_R(w: PeriodicWeight, x):
    """``R(x) = int_0^x (rho - mean)``; 1-periodic, vanishing at integers."""
    x = np.asarray(x, dtype=float)
    t = x - np.floor(x)
    r = w.primitive(t) - w.mean * t
    return float(r) if np.ndim(r) == 0 else r


@njit(cache=True, nogil=True)
def weight_eval(t, kind, par, brk, cof):
    """Value and derivative of a weight at ``t`` (reduced mod 1)."""
    t = t - math.floor(t)
    if kind == 0:
        return par[0], 0.0
    if kind == 1 or kind == 2:
        arg = 2.0 * math.pi * t
        s = math.sin(arg)
        c = math.cos(arg)
        d = par[0] + par[1] * s
        dd = 2.0 * math.pi * par[1] * c
        if kind == 1:
            return d, dd
        return 1.0 / d, -dd / (d * d)
    m = brk.shape[0] - 1
    i = np.searchsorted(brk, t, side="right") - 1
    if i < 0:
        i = 0
    elif i > m - 1:
        i = m - 1
    u = t - brk[i]
    deg = cof.shape[1] - 1
    v = cof[i, deg]
    dv = 0.0
    for j in range(deg - 1, -1, -1):
        dv = dv * u + v
        v = v * u + cof[i, j]
    return v, dv


@njit(cache=True, nogil=True)
def _weval_many(xs, kind, par, brk, cof):
    n = xs.shape[0]
    vals = np.empty(n)
    ders = np.empty(n)
    for i in range(n):
        vals[i], ders[i] = weight_eval(xs[i], kind, par, brk, cof)
    return vals, ders


# --------------------------------------------------------------------------
# oscillating-integral estimates

def _check_samples(x, v):
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.ndim != 1 or x.shape != v.shape or len(x) < 2 or np.any(np.diff(x) <= 0):
        raise ValueError("samples must be a strictly increasing grid with matching values")
    scale = max(1.0, float(np.max(np.abs(v))))
    if abs(v[0]) > 1e-12 * scale or abs(v[-1]) > 1e-12 * scale:
        raise ValueError("test function must vanish at both endpoints")
    return x, v


def _oscillation_breaks(w, eps, x, v):
    a, b = x[0], x[-1]
    m0, m1 = math.floor(a / eps), math.ceil(b / eps)
    offs = np.concatenate([[0.0], w.jumps])
    cell = (np.arange(m0, m1 + 1)[:, None] + offs[None, :]).ravel() * eps
    # zeros of the piecewise-linear interpolant
    s = v[:-1] * v[1:] < 0
    z = x[:-1][s] - v[:-1][s] * (x[1:][s] - x[:-1][s]) / (v[1:][s] - v[:-1][s])
    br = np.concatenate([x, z, cell[(cell > a) & (cell < b)]])
    return np.unique(br)


def _weighted_integral(w, eps, x, v, power=None):
    breaks = _oscillation_breaks(w, eps, x, v)
    lo, hi = cells(breaks, eps / 16.0)

    def integrand(t):
        vt = np.interp(t, x, v)
        if power is not None:
            vt = np.abs(vt) ** power
        return (eval_scaled(w, eps, t) - w.mean) * vt

    return abs(float(np.sum(gl_integrate(integrand, lo, hi))))


def _linear_lp_norm(x, u, p):
    # exact on each piece once the interpolant's zeros are inserted
    s = u[:-1] * u[1:] < 0
    z = x[:-1][s] - u[:-1][s] * (x[1:][s] - x[:-1][s]) / (u[1:][s] - u[:-1][s])
    xx = np.concatenate([x, z])
    order = np.argsort(xx, kind="stable")
    xx = xx[order]
    uu = np.abs(np.concatenate([u, np.zeros(len(z))])[order])
    h = np.diff(xx)
    a, b = uu[:-1], uu[1:]
    same = np.isclose(a, b, rtol=1e-12, atol=0.0)
    denom = np.where(same, 1.0, (p + 1.0) * (b - a))
    pieces = np.where(same, h * a ** p, h * (b ** (p + 1.0) - a ** (p + 1.0)) / denom)
    return float(np.sum(pieces)) ** (1.0 / p)


def oleinik_check(w: PeriodicWeight, eps: float, x, v) -> tuple[float, float]:
    """Both sides of ``|int (rho(x/eps) - mean) v| <= 1/2 ||rho - mean||_1 eps ||v'||_1``.

    ``v`` is the piecewise-linear interpolant of the samples and must vanish
    at the end points.
    """
    x, v = _check_samples(x, v)
    lhs = _weighted_integral(w, eps, x, v)
    rhs = 0.5 * w.l1_deviation * eps * float(np.sum(np.abs(np.diff(v))))
    return lhs, rhs


def oscillation_bound_check(w: PeriodicWeight, eps: float, x, u, p: float) -> tuple[float, float]:
    """Both sides of the ``|u|^p`` oscillation estimate.

    Returns ``(lhs, rhs)`` with ``lhs = |int (rho(x/eps) - mean) |u|^p|`` and
    ``rhs = (p/2) eps ||rho - mean||_1 ||u||_p^(p-1) ||u'||_p``, for the
    piecewise-linear interpolant ``u`` of the samples.
    """
    x, u = _check_samples(x, u)
    lhs = _weighted_integral(w, eps, x, u, power=p)
    norm_u = _linear_lp_norm(x, u, p)
    slopes = np.diff(u) / np.diff(x)
    norm_du = float(np.sum(np.abs(slopes) ** p * np.diff(x))) ** (1 / p)
    rhs = 0.5 * p * eps * w.l1_deviation * norm_u ** (p - 1.0) * norm_du
    return lhs, rhs
