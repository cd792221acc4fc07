"""Homogenized limit spectrum, coefficient change of variables and explicit error bounds.

Limit problem
    -(a* |u'|^(p-2) u')' = lam rho_bar |u|^(p-2) u,  lam_k = a* (pi_p k / l)^p / rho_bar,
with ``a* = L^(1-p)`` and ``L`` the mean of ``a^(-1/(p-1))``.

Change of variables
    y = eps P(x/eps),  P(x) = int_0^x a^(-1/(p-1)),  z = y / L_eps,  L_eps = eps P(l/eps),
turns the two-coefficient problem into a weight-only one on ``(0, 1)`` with
weight ``g(z/delta)``, ``g(z) = (a^(1/(p-1)) rho)(P^{-1}(L z))``, scale
``delta = eps L / L_eps`` and eigenvalue ``mu = L_eps^p lam``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import interpolate

from ._quad import PeriodicPrimitive
from .prufer import ProblemSpec
from .ptrig import PExponent
from .weight import PeriodicWeight, build_weight, from_ppoly

__all__ = [
    "BoundReport",
    "LimitSpectrum",
    "TransformedProblem",
    "bound_explicit",
    "bound_general_eq",
    "bound_linear1d",
    "bound_nodal",
    "bound_teo1d",
    "homogenize_coefficient",
    "is_reciprocal_integer",
    "limit_eigenvalue",
    "teo1d_constant",
    "transform_general",
    "weyl_upper_bound",
]

_G_NODES = 2048


def _exponent(p) -> PExponent:
    return p if isinstance(p, PExponent) else PExponent.of(p)


# --------------------------------------------------------------------------
# limit spectrum

@dataclass(frozen=True)
class LimitSpectrum:
    """Parameters of the homogenized problem."""

    p: PExponent
    length: float
    rho_bar: float
    a_star: float = 1.0

    @classmethod
    def from_spec(cls, spec: ProblemSpec) -> "LimitSpectrum":
        _, a_star = homogenize_coefficient(spec.coefficient, spec.p)
        return cls(spec.p, spec.length, spec.weight.mean, a_star)

    def __call__(self, k):
        return limit_eigenvalue(self, k)


def limit_eigenvalue(spec: LimitSpectrum, k) -> float:
    """``a* pi_p^p k^p / (rho_bar l^p)``."""
    if k < 1:
        raise ValueError(f"eigenvalue index must be >= 1, got {k}")
    p = spec.p
    return spec.a_star * (p.pi_p * k / spec.length) ** p.p / spec.rho_bar


def homogenize_coefficient(a: PeriodicWeight, p) -> tuple[float, float]:
    """Return ``L = mean(a^(-1/(p-1)))`` and ``a* = L^(1-p)``."""
    p = _exponent(p)
    if a.is_constant:
        c = float(a.par[0])
        L = c ** (-1.0 / (p.p - 1.0))
        return L, c
    L = _coefficient_primitive(a, p.p).period_integral
    return L, L ** (1.0 - p.p)


@lru_cache(maxsize=64)
def _coefficient_primitive(a: PeriodicWeight, p: float) -> PeriodicPrimitive:
    e = -1.0 / (p - 1.0)
    return PeriodicPrimitive(lambda x: a.evaluate(x) ** e, jumps=a.jumps)


# --------------------------------------------------------------------------
# change of variables

@dataclass(frozen=True, eq=False)
class TransformedProblem:
    """Weight-only problem equivalent to a two-coefficient one.

    ``x_to_z`` / ``z_to_x`` map between the original interval ``(0, l)``
    and the unit interval of the transformed problem.
    """

    L_eps: float
    L: float
    delta: float
    g: PeriodicWeight
    mu_scale: float
    p: PExponent
    eps: float
    length: float
    coefficient: PeriodicWeight = field(repr=False)
    _P: PeriodicPrimitive = field(repr=False)

    @property
    def a_star(self) -> float:
        return self.L ** (1.0 - self.p.p)

    def to_spec(self) -> ProblemSpec:
        return ProblemSpec(self.p, self.g, _UNIT, self.delta, 1.0)

    def x_to_z(self, x):
        return self.eps * self._P(np.asarray(x, dtype=float) / self.eps) / self.L_eps

    def z_to_x(self, z):
        return self.eps * self._P.inverse(np.asarray(z, dtype=float) * self.L_eps / self.eps)

    def dz_dx(self, x):
        a = self.coefficient.evaluate(np.asarray(x, dtype=float) / self.eps)
        return a ** (-1.0 / (self.p.p - 1.0)) / self.L_eps


_UNIT = build_weight("constant,1")


def transform_general(spec: ProblemSpec) -> TransformedProblem:
    """Remove the coefficient ``a`` by the change of variables ``y = eps P(x/eps)``."""
    return _transform(spec.p, spec.weight, spec.coefficient, spec.eps, spec.length)


@lru_cache(maxsize=128)
def _transform(p, rho, a, eps, length):
    P = _coefficient_primitive(a, p.p)
    L, _ = homogenize_coefficient(a, p)
    n = length / eps
    if abs(n - round(n)) < 1e-12 * n:
        # whole number of periods: L_eps = eps * n * L = l * L
        L_eps = length * L
    else:
        L_eps = eps * P(n)
    delta = eps * L / L_eps
    if a.is_constant:
        c = float(a.par[0])
        g = _scaled_weight(rho, c ** (1.0 / (p.p - 1.0)))
    else:
        g = _g_weight(p, rho, a)
    return TransformedProblem(L_eps=L_eps, L=L, delta=delta, g=g, mu_scale=L_eps ** p.p,
                              p=p, eps=eps, length=length, coefficient=a, _P=P)


def _scaled_weight(rho: PeriodicWeight, c: float) -> PeriodicWeight:
    if c == 1.0:
        return rho
    if rho.is_constant:
        return build_weight(f"constant,{float(rho.par[0]) * c!r}")
    return _g_cache(rho, c)


@lru_cache(maxsize=64)
def _g_cache(rho, c):
    # a constant coefficient leaves the argument unchanged: g = c^(1/(p-1)) rho
    from .weight import _finish
    if rho.kind == 3:
        return from_ppoly(rho.breaks, rho.coefs * c, name=f"{c!r}*{rho.name}", jumps=rho.jumps)
    par = rho.par.copy()
    if rho.kind == 1:
        par *= c
    else:
        par /= c
    return _finish(f"{c!r}*{rho.name}", rho.kind, par)


@lru_cache(maxsize=64)
def _g_weight(p: PExponent, rho: PeriodicWeight, a: PeriodicWeight) -> PeriodicWeight:
    """Quintic-spline representation of ``g(z) = h(P^{-1}(L z))``, ``h = a^(1/(p-1)) rho``."""
    P = _coefficient_primitive(a, p.p)
    L = P.period_integral
    ex = 1.0 / (p.p - 1.0)
    x_jumps = np.unique(np.concatenate([a.jumps, rho.jumps]) % 1.0)
    x_breaks = np.unique(np.concatenate([[0.0, 1.0], x_jumps]))
    z_breaks = np.array([P(x) / L for x in x_breaks])
    z_breaks[0], z_breaks[-1] = 0.0, 1.0

    def h(x, lo, hi):
        inset = 1e-13
        xe = np.clip(x, lo + inset, hi - inset)
        return a.evaluate(xe) ** ex * rho.evaluate(xe)

    all_breaks, all_coefs = [], []
    if x_jumps.size == 0:
        z = np.linspace(0.0, 1.0, _G_NODES + 1)
        x = P.inverse(L * z)
        vals = h(x, -1.0, 2.0)
        vals[-1] = vals[0]
        spl = interpolate.make_interp_spline(z, vals, k=5, bc_type="periodic")
        br, cf = _spline_pieces(spl, 0.0, 1.0)
        all_breaks.append(br)
        all_coefs.append(cf)
    else:
        for z0, z1, x0, x1 in zip(z_breaks[:-1], z_breaks[1:], x_breaks[:-1], x_breaks[1:]):
            n = max(32, int(math.ceil(_G_NODES * (z1 - z0))))
            z = np.linspace(z0, z1, n + 1)
            x = P.inverse(L * z)
            vals = h(x, x0, x1)
            spl = interpolate.make_interp_spline(z, vals, k=5)
            br, cf = _spline_pieces(spl, z0, z1)
            all_breaks.append(br)
            all_coefs.append(cf)
    breaks = np.concatenate([b[:-1] for b in all_breaks] + [[1.0]])
    coefs = np.concatenate(all_coefs)
    jumps = z_breaks[:-1][_has_jump(a, rho, x_breaks[:-1])]
    name = f"g[{a.name};{rho.name}]"
    return from_ppoly(breaks, coefs, name=name, jumps=jumps)


def _has_jump(a, rho, xs):
    out = []
    for x in xs:
        left = (x - 1e-12) % 1.0
        right = x + 1e-12
        jump = (abs(a.evaluate(left) - a.evaluate(right)) > 1e-9
                or abs(rho.evaluate(left) - rho.evaluate(right)) > 1e-9)
        out.append(jump)
    return np.array(out, dtype=bool)


def _spline_pieces(spl, z0, z1):
    pp = interpolate.PPoly.from_spline(spl)
    x = pp.x
    keep = (np.diff(x) > 0) & (x[:-1] >= z0 - 1e-15) & (x[1:] <= z1 + 1e-15)
    breaks = np.concatenate([x[:-1][keep], [z1]])
    breaks[0] = z0
    coefs = pp.c[::-1, keep].T
    return breaks, coefs


# --------------------------------------------------------------------------
# bounds

@dataclass(frozen=True)
class BoundReport:
    """A computed error bound and, optionally, the error it is compared with."""

    constant: float
    bound_value: float
    which: str
    observed_error: float = math.nan
    ratio: float = math.nan

    def with_observed(self, err: float) -> "BoundReport":
        err = float(err)
        if self.bound_value > 0:
            ratio = err / self.bound_value
        else:
            ratio = 0.0 if err == 0 else math.inf
        return BoundReport(self.constant, self.bound_value, self.which, err, ratio)

    def to_dict(self) -> dict:
        return {"which": self.which, "constant": self.constant, "bound": self.bound_value,
                "observed_error": self.observed_error, "ratio": self.ratio}


def _report(constant, bound, which, observed):
    rep = BoundReport(float(constant), float(bound), which)
    return rep if observed is None else rep.with_observed(observed)


def teo1d_constant(rho: PeriodicWeight, p) -> float:
    """``(p/2) ||rho - rho_bar||_1 / rho_-^2 (rho_+ / rho_-)^(1/p)``."""
    p = _exponent(p)
    return float(0.5 * p.p * rho.l1_deviation / rho.lower ** 2
                 * (rho.upper / rho.lower) ** (1.0 / p.p))


def bound_teo1d(rho: PeriodicWeight, p, eps: float, k, length: float = 1.0,
                observed=None) -> BoundReport:
    """One-dimensional rate bound ``C eps (pi_p k)^(p+1)`` for ``a = 1``.

    On ``(0, l)`` the problem is rescaled to the unit interval (``eps -> eps/l``,
    ``lam -> l^p lam``), so the bound becomes ``l^(-p) C (eps/l) (pi_p k)^(p+1)``.
    """
    p = _exponent(p)
    c = teo1d_constant(rho, p)
    unit = c * (eps / length) * (p.pi_p * k) ** (p.p + 1.0)
    return _report(c, unit * length ** (-p.p), "teo1d", observed)


def bound_explicit(rho: PeriodicWeight, alpha: float, beta: float, p, N: int, eps: float, k,
                   observed=None) -> BoundReport:
    """Dimension-generic bound ``C eps k^((p+1)/N)`` with ``c_1 = sqrt(N)/2``."""
    p = _exponent(p)
    pp = p.p
    if int(N) != N or N < 1:
        raise ValueError(f"dimension must be a positive integer, got {N!r}")
    c = (math.sqrt(N) / 2.0 * pp * rho.sup_deviation
         * (beta ** (pp + 1.0) / alpha) ** (1.0 / pp)
         / rho.lower ** 2 * (rho.upper / rho.lower) ** (1.0 / pp)
         * p.pi_p ** (pp + 1.0) * N ** ((pp + 1.0) / pp)
         * max(N ** ((pp - 2.0) / 2.0), 1.0) ** ((pp + 1.0) / pp))
    return _report(c, c * eps * k ** ((pp + 1.0) / N), "explicit", observed)


def bound_linear1d(rho: PeriodicWeight, eps: float, k, observed=None) -> BoundReport:
    """Linear one-dimensional case ``||rho - rho_bar||_inf / rho_-^2 sqrt(rho_+/rho_-) (pi k)^3 eps``."""
    c = rho.sup_deviation / rho.lower ** 2 * math.sqrt(rho.upper / rho.lower) * math.pi ** 3
    return _report(c, c * eps * k ** 3, "linear1d", observed)


def is_reciprocal_integer(eps: float) -> bool:
    inv = 1.0 / eps
    return abs(inv - round(inv)) < 1e-12 * inv


def bound_general_eq(transformed: TransformedProblem, beta: float, rho_minus: float, p,
                     eps: float, k, observed=None) -> BoundReport:
    """Rate bound for a problem with oscillating coefficient, via the transformed weight ``g``.

    For ``eps = 1/j`` the bound is ``L^-p C_g eps (pi_p k)^(p+1)``; otherwise
    ``eps`` becomes ``eps/(1-eps)`` in that term and
    ``(beta/rho_-) p L^p (1+eps)^(p-1) eps (pi_p k)^p`` is added.
    """
    p = _exponent(p)
    pp = p.p
    g = transformed.g
    L = transformed.L
    cg = teo1d_constant(g, p) / L ** pp
    kp = (p.pi_p * k)
    if is_reciprocal_integer(eps):
        return _report(cg, cg * eps * kp ** (pp + 1.0), "general_eq", observed)
    if eps >= 1.0:
        return _report(cg, math.inf, "general_eq", observed)
    first = cg * eps / (1.0 - eps) * kp ** (pp + 1.0)
    second = beta / rho_minus * pp * L ** pp * (1.0 + eps) ** (pp - 1.0) * eps * kp ** pp
    return _report(cg, first + second, "general_eq", observed)


def bound_nodal(k, p, eps: float, c: float) -> tuple[float, float]:
    """Nodal-domain bound ``c eps (k^(p+1) + 1)``.

    Returns ``(domain_bound, zero_bound_per_j)``; the j-th zero moves by at
    most ``j * zero_bound_per_j``.
    """
    p = _exponent(p)
    d = float(c * eps * (k ** (p.p + 1.0) + 1.0))
    return d, d


def weyl_upper_bound(p, N: int, k, domain_volume: float, beta: float, rho_minus: float) -> float:
    """``(beta/rho_-) max{N^((p-2)/2), 1} N pi_p^p (k/|Omega|)^(p/N)``."""
    p = _exponent(p)
    return (beta / rho_minus * max(N ** ((p.p - 2.0) / 2.0), 1.0) * N * p.pi_p ** p.p
            * (k / domain_volume) ** (p.p / N))
