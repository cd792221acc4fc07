"""Generalized trigonometric functions ``sin_p``, ``cos_p`` and the constant ``pi_p``.

``sin_p`` is defined on the quarter period by inverting

    x = int_0^{sin_p(x)} ((p - 1) / (1 - t^p))^(1/p) dt,

and extended to the real line as an odd, ``2 pi_p``-periodic function that is
symmetric about ``pi_p / 2``.  ``cos_p`` is its derivative, so that

    (p - 1) |cos_p|^p + |sin_p|^p = 1.

Evaluation goes through a cached quarter-period table (cubic Hermite on
Chebyshev-Lobatto nodes, exact slopes).  The first half of the quarter is
tabulated as ``sin_p(y)``; the second half as ``w = 1 - sin_p^p`` in the
variable ``tau = (pi_p/2 - y)^(p')`` in which ``w`` is analytic, so the peak
stays accurate for every ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit
from scipy import integrate, special

__all__ = [
    "PExponent",
    "PTrigTable",
    "compute_pi_p",
    "cos_p",
    "pi_p_beta",
    "sin_p",
    "trig_table",
]

TABLE_TOL = 1e-10
_N_START = 2048
_N_MAX = 2 ** 18


def _check_p(p: float) -> float:
    p = float(p)
    if not math.isfinite(p) or p <= 1.0:
        raise ValueError(f"exponent p must be a finite number > 1, got {p!r}")
    return p


def pi_p_beta(p: float) -> float:
    """Closed form ``2 pi (p-1)^(1/p) / (p sin(pi/p))`` from the Beta function."""
    p = _check_p(p)
    return 2.0 * math.pi * (p - 1.0) ** (1.0 / p) / (p * math.sin(math.pi / p))


def compute_pi_p(p: float) -> float:
    """Return ``pi_p = 2 int_0^1 ((p-1)/(1-t^p))^(1/p) dt`` by quadrature.

    The ``(1-t)^(-1/p)`` endpoint singularity is factored out and handed to
    QUADPACK's algebraic-weight rule; the remaining factor is smooth on
    ``[0, 1]``.
    """
    p = _check_p(p)

    def smooth_part(t):
        if t >= 1.0:
            return p ** (-1.0 / p)
        if t <= 0.0:
            return 1.0
        # (1 - t) / (1 - t^p); 1 - t is exact near t = 1, expm1 avoids cancellation
        return ((1.0 - t) / -math.expm1(p * math.log(t))) ** (1.0 / p)

    val, _ = integrate.quad(smooth_part, 0.0, 1.0, weight="alg", wvar=(0.0, -1.0 / p),
                            epsabs=1e-15, epsrel=1e-13, limit=200)
    return 2.0 * (p - 1.0) ** (1.0 / p) * val


@dataclass(frozen=True)
class PExponent:
    """Exponent ``p`` with its conjugate and ``pi_p``."""

    p: float
    p_conj: float
    pi_p: float

    @classmethod
    def of(cls, p: float) -> "PExponent":
        return _exponent(_check_p(p))

    @property
    def elbert_scale(self) -> float:
        """``(p-1)^(1/p)``; maps the Pruefer phase onto the ``sin_p`` argument."""
        return (self.p - 1.0) ** (1.0 / self.p)

    @property
    def half_period_phase(self) -> float:
        """Phase increment per nodal domain in the Pruefer system, ``pi_p / (p-1)^(1/p)``."""
        return self.pi_p / self.elbert_scale


@lru_cache(maxsize=64)
def _exponent(p: float) -> PExponent:
    return PExponent(p=p, p_conj=p / (p - 1.0), pi_p=compute_pi_p(p))


# --------------------------------------------------------------------------
# quarter-period table

def _lobatto(h: float, n: int) -> np.ndarray:
    t = 0.5 * h * (1.0 - np.cos(np.pi * np.arange(n + 1) / n))
    t[0], t[-1] = 0.0, h
    return t


@dataclass(frozen=True, eq=False)
class PTrigTable:
    """Immutable evaluation cache for ``sin_p`` / ``cos_p`` at one exponent."""

    exponent: PExponent
    lo_nodes: np.ndarray     # y on [0, pi_p/4]
    lo_vals: np.ndarray      # sin_p(y)
    lo_slopes: np.ndarray
    up_nodes: np.ndarray     # tau = (pi_p/2 - y)^p' on [0, (pi_p/4)^p']
    up_vals: np.ndarray      # 1 - sin_p(y)^p
    up_slopes: np.ndarray
    tolerance: float

    @property
    def quarter_period_samples(self) -> list[tuple[float, float]]:
        """Ordered ``(x, sin_p(x))`` pairs covering ``[0, pi_p/2]``."""
        q = 0.5 * self.exponent.pi_p
        up_x = q - self.up_nodes[::-1] ** (1.0 / self.exponent.p_conj)
        up_s = (1.0 - self.up_vals[::-1]) ** (1.0 / self.exponent.p)
        xs = np.concatenate([self.lo_nodes, up_x[1:]])
        ss = np.concatenate([self.lo_vals, up_s[1:]])
        return list(zip(xs.tolist(), ss.tolist()))

    @property
    def kernel_args(self) -> tuple:
        e = self.exponent
        return (e.p, e.pi_p, self.lo_nodes, self.lo_vals, self.lo_slopes,
                self.up_nodes, self.up_vals, self.up_slopes)

    def sin(self, x):
        s, _, _ = _trig_many(np.atleast_1d(np.asarray(x, dtype=float)).ravel(), *self.kernel_args)
        return _shape_like(x, s)

    def cos(self, x):
        e = self.exponent
        s, w, sg = _trig_many(np.atleast_1d(np.asarray(x, dtype=float)).ravel(), *self.kernel_args)
        return _shape_like(x, sg * (w / (e.p - 1.0)) ** (1.0 / e.p))

    def energy(self, x):
        """``(p-1)|cos_p|^p + |sin_p|^p``; identically 1 up to rounding."""
        p = self.exponent.p
        return (p - 1.0) * np.abs(self.cos(x)) ** p + np.abs(self.sin(x)) ** p


def _shape_like(x, arr):
    if np.ndim(x) == 0:
        return float(arr[0])
    return arr.reshape(np.shape(x))


def _lower_exact(p, y, q):
    return special.betaincinv(1.0 / p, 1.0 - 1.0 / p, np.clip(y / q, 0.0, 1.0)) ** (1.0 / p)


def _upper_exact(p, tau, q):
    delta = tau ** (1.0 - 1.0 / p)  # tau^(1/p')
    return special.betaincinv(1.0 - 1.0 / p, 1.0 / p, np.clip(delta / q, 0.0, 1.0))


def _lower_slopes(p, s):
    return ((1.0 - s ** p) / (p - 1.0)) ** (1.0 / p)


def _upper_slopes(p, tau, w):
    pc = p / (p - 1.0)
    out = np.full_like(w, p - 1.0)
    pos = tau > 0
    delta = tau[pos] ** (1.0 / pc)
    s = (1.0 - w[pos]) ** (1.0 / p)
    out[pos] = p * s ** (p - 1.0) * (w[pos] / (p - 1.0)) ** (1.0 / p) / (pc * delta ** (pc - 1.0))
    return out


def _hermite_mid_error(nodes, vals, slopes, exact):
    err = 0.0
    for frac in (0.25, 0.5, 0.75):
        t = nodes[:-1] + frac * np.diff(nodes)
        approx = _hermite_many(t, nodes, vals, slopes)
        err = max(err, float(np.max(np.abs(approx - exact(t)))))
    return err


@lru_cache(maxsize=32)
def _build_table(p: float) -> PTrigTable:
    e = _exponent(p)
    q = 0.5 * e.pi_p
    half = 0.5 * q
    tau_max = half ** e.p_conj
    n = _N_START
    while True:
        lo_t = _lobatto(half, n)
        lo_v = _lower_exact(p, lo_t, q)
        lo_d = _lower_slopes(p, lo_v)
        up_t = _lobatto(tau_max, n)
        up_v = _upper_exact(p, up_t, q)
        up_d = _upper_slopes(p, up_t, up_v)
        err_lo = _hermite_mid_error(lo_t, lo_v, lo_d, lambda t: _lower_exact(p, t, q))
        err_up = _hermite_mid_error(up_t, up_v, up_d, lambda t: _upper_exact(p, t, q))
        err = max(err_lo, err_up)
        if err < TABLE_TOL or n >= _N_MAX:
            break
        n *= 2
    return PTrigTable(e, lo_t, lo_v, lo_d, up_t, up_v, up_d, max(err, np.finfo(float).eps))


def trig_table(p: float) -> PTrigTable:
    """Shared table for exponent ``p`` (built once per process)."""
    return _build_table(_check_p(p))


def sin_p(p: float, x):
    """Generalized sine; accepts scalars or arrays."""
    return trig_table(p).sin(x)


def cos_p(p: float, x):
    """Derivative of :func:`sin_p`; ``cos_p(p, 0) = (p-1)^(-1/p)``."""
    return trig_table(p).cos(x)


# --------------------------------------------------------------------------
# compiled kernels

@njit(cache=True, nogil=True)
def _lobatto_index(t, nodes):
    n = nodes.shape[0] - 1
    h = nodes[n]
    arg = 1.0 - 2.0 * t / h
    if arg > 1.0:
        arg = 1.0
    elif arg < -1.0:
        arg = -1.0
    i = int(n * math.acos(arg) / math.pi)
    if i > n - 1:
        i = n - 1
    while i > 0 and t < nodes[i]:
        i -= 1
    while i < n - 1 and t > nodes[i + 1]:
        i += 1
    return i


@njit(cache=True, nogil=True)
def _hermite(t, nodes, vals, slopes):
    i = _lobatto_index(t, nodes)
    x0 = nodes[i]
    h = nodes[i + 1] - x0
    s = (t - x0) / h
    s2 = s * s
    s3 = s2 * s
    h00 = 2.0 * s3 - 3.0 * s2 + 1.0
    h10 = s3 - 2.0 * s2 + s
    h01 = -2.0 * s3 + 3.0 * s2
    h11 = s3 - s2
    return h00 * vals[i] + h10 * h * slopes[i] + h01 * vals[i + 1] + h11 * h * slopes[i + 1]


@njit(cache=True, nogil=True)
def _hermite_many(ts, nodes, vals, slopes):
    out = np.empty(ts.shape[0])
    for j in range(ts.shape[0]):
        out[j] = _hermite(ts[j], nodes, vals, slopes)
    return out


@njit(cache=True, nogil=True)
def trig_eval(x, p, pi_p, lo_t, lo_v, lo_d, up_t, up_v, up_d):
    """Return ``(sin_p(x), 1 - |sin_p(x)|^p, sign(cos_p(x)))``."""
    two_pi = 2.0 * pi_p
    y = x - two_pi * math.floor((x + pi_p) / two_pi)   # periodicity -> [-pi_p, pi_p)
    s_sign = 1.0
    c_sign = 1.0
    if y < 0.0:                                         # oddness
        y = -y
        s_sign = -1.0
    q = 0.5 * pi_p
    if y > q:                                           # reflection about pi_p/2
        y = pi_p - y
        c_sign = -1.0
    if y <= 0.5 * q:
        s = _hermite(y, lo_t, lo_v, lo_d)
        w = 1.0 - s ** p
    else:
        d = q - y
        if d < 0.0:
            d = 0.0
        tau = d ** (p / (p - 1.0))
        w = _hermite(tau, up_t, up_v, up_d)
        if w < 0.0:
            w = 0.0
        s = (1.0 - w) ** (1.0 / p)
    return s_sign * s, w, c_sign


@njit(cache=True, nogil=True)
def _trig_many(xs, p, pi_p, lo_t, lo_v, lo_d, up_t, up_v, up_d):
    n = xs.shape[0]
    s = np.empty(n)
    w = np.empty(n)
    sg = np.empty(n)
    for j in range(n):
        s[j], w[j], sg[j] = trig_eval(xs[j], p, pi_p, lo_t, lo_v, lo_d, up_t, up_v, up_d)
    return s, w, sg
