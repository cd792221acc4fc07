"""Compiled Dormand-Prince 5(4) integrator for the two shooting systems.

mode 0, Pruefer phase/amplitude (coefficient already folded into the weight):
    phi' = (lam r / (p-1))^(1/p) + (1/p)(r'/r) |C(phi)|^(p-2) C(phi) S(phi)
    A'   = (1/p)(r'/r) A |S(phi)|^p
with S(t) = sin_p((p-1)^(1/p) t) and C = S', so that |S|^p + |C|^p = 1.

mode 1, direct first-order system with w = a |u'|^(p-2) u':
    u' = |w/a|^(p'-2) (w/a),   w' = -lam rho |u|^(p-2) u
plus the unwrapped angle atan2(u, w), which increases through k*pi at the
k-th zero of u.

Weights are sampled at x/eps; ``stops`` are points where they jump and the
integrator lands on each one exactly, evaluating the weights strictly inside
the current segment.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .ptrig import trig_eval
from .weight import weight_eval

OK, UNDERFLOW, NONFINITE, OVERFLOW, TOO_MANY_STEPS = 0, 1, 2, 3, 4
MAX_STEPS = 20_000_000

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525,
                          -1 / 40)


@njit(cache=True, nogil=True)
def rhs(mode, x, xlo, xhi, y0, y1, lam, p, eps, wscale, wk, wp, wb, wc, ak, ap, ab, ac,
        pi_p, lt, lv, ld, ut, uv, ud):
    guard = 1e-13 * eps
    if x < xlo + guard:
        x = xlo + guard
    if x > xhi - guard:
        x = xhi - guard
    t = x / eps
    if mode == 0:
        r, dr = weight_eval(t, wk, wp, wb, wc)
        r *= wscale
        dr *= wscale / eps
        kap = (p - 1.0) ** (1.0 / p)
        s, w, cs = trig_eval(kap * y0, p, pi_p, lt, lv, ld, ut, uv, ud)
        q = dr / (p * r)
        dphi = (lam * r / (p - 1.0)) ** (1.0 / p) + q * cs * w ** (1.0 - 1.0 / p) * s
        damp = q * y1 * (1.0 - w)
        return dphi, damp
    rho, _ = weight_eval(t, wk, wp, wb, wc)
    a, _ = weight_eval(t, ak, ap, ab, ac)
    z = y1 / a
    pc = p / (p - 1.0)
    du = math.copysign(abs(z) ** (pc - 1.0), z) if z != 0.0 else 0.0
    dw = -lam * rho * wscale * (math.copysign(abs(y0) ** (p - 1.0), y0) if y0 != 0.0 else 0.0)
    return du, dw


@njit(cache=True, nogil=True)
def integrate(mode, x0, length, y00, y01, rtol, atol, hmax, stops, record, cap,
              lam, p, eps, wscale, wk, wp, wb, wc, ak, ap, ab, ac,
              pi_p, lt, lv, ld, ut, uv, ud):
    """Integrate from ``x0`` to ``length``.

    Returns ``(y0, y1, angle, n_accepted, n_rejected, status, trace)`` where
    the trace rows are ``x, y0, y1, f0(+), f1(+), g0(-), g1(-), angle`` per
    accepted point; ``g`` is the derivative at that point seen from the step
    that ended there.
    """
    ncols = 8
    trace = np.empty((cap if record else 1, ncols))
    x = x0
    y0 = y00
    y1 = y01
    angle = 0.0
    last_atan = math.atan2(y0, y1)
    nacc = 0
    nrej = 0
    npts = 0
    status = OK
    h = min(hmax, 0.01 * length)
    nst = stops.shape[0]
    seg_lo = x0
    f0 = 0.0
    f1 = 0.0
    for seg in range(nst + 1):
        seg_hi = stops[seg] if seg < nst else length
        if seg_hi <= x:
            continue
        f0, f1 = rhs(mode, x, seg_lo, seg_hi, y0, y1, lam, p, eps, wscale, wk, wp, wb, wc,
                     ak, ap, ab, ac, pi_p, lt, lv, ld, ut, uv, ud)
        if record:
            if npts == 0:
                trace[0, 0] = x
                trace[0, 1] = y0
                trace[0, 2] = y1
                trace[0, 3] = f0
                trace[0, 4] = f1
                trace[0, 5] = f0
                trace[0, 6] = f1
                trace[0, 7] = angle
                npts = 1
            else:
                # jump point: keep the left derivative, store the right one
                trace[npts - 1, 3] = f0
                trace[npts - 1, 4] = f1
        while x < seg_hi:
            if nacc + nrej > MAX_STEPS:
                return y0, y1, angle, nacc, nrej, TOO_MANY_STEPS, trace[:npts]
            h = min(h, hmax)
            rem = seg_hi - x
            last = False
            if h >= rem or rem - h < 1e-10 * h:
                h = rem
                last = True
            xa = seg_lo
            xb = seg_hi
            k10, k11 = f0, f1
            k20, k21 = rhs(mode, x + C2 * h, xa, xb, y0 + h * A21 * k10, y1 + h * A21 * k11,
                           lam, p, eps, wscale, wk, wp, wb, wc, ak, ap, ab, ac,
                           pi_p, lt, lv, ld, ut, uv, ud)
            k30, k31 = rhs(mode, x + C3 * h, xa, xb,
                           y0 + h * (A31 * k10 + A32 * k20), y1 + h * (A31 * k11 + A32 * k21),
                           lam, p, eps, wscale, wk, wp, wb, wc, ak, ap, ab, ac,
                           pi_p, lt, lv, ld, ut, uv, ud)
            k40, k41 = rhs(mode, x + C4 * h, xa, xb,
                           y0 + h * (A41 * k10 + A42 * k20 + A43 * k30),
                           y1 + h * (A41 * k11 + A42 * k21 + A43 * k31),
                           lam, p, eps, wscale, wk, wp, wb, wc, ak, ap, ab, ac,
                           pi_p, lt, lv, ld, ut, uv, ud)
            k50, k51 = rhs(mode, x + C5 * h, xa, xb,
                           y0 + h * (A51 * k10 + A52 * k20 + A53 * k30 + A54 * k40),
                           y1 + h * (A51 * k11 + A52 * k21 + A53 * k31 + A54 * k41),
                           lam, p, eps, wscale, wk, wp, wb, wc, ak, ap, ab, ac,
                           pi_p, lt, lv, ld, ut, uv, ud)
            k60, k61 = rhs(mode, x + h, xa, xb,
                           y0 + h * (A61 * k10 + A62 * k20 + A63 * k30 + A64 * k40 + A65 * k50),
                           y1 + h * (A61 * k11 + A62 * k21 + A63 * k31 + A64 * k41 + A65 * k51),
                           lam, p, eps, wscale, wk, wp, wb, wc, ak, ap, ab, ac,
                           pi_p, lt, lv, ld, ut, uv, ud)
            n0 = y0 + h * (B1 * k10 + B3 * k30 + B4 * k40 + B5 * k50 + B6 * k60)
            n1 = y1 + h * (B1 * k11 + B3 * k31 + B4 * k41 + B5 * k51 + B6 * k61)
            k70, k71 = rhs(mode, x + h, xa, xb, n0, n1,
                           lam, p, eps, wscale, wk, wp, wb, wc, ak, ap, ab, ac,
                           pi_p, lt, lv, ld, ut, uv, ud)
            e0 = h * (E1 * k10 + E3 * k30 + E4 * k40 + E5 * k50 + E6 * k60 + E7 * k70)
            e1 = h * (E1 * k11 + E3 * k31 + E4 * k41 + E5 * k51 + E6 * k61 + E7 * k71)
            sc0 = atol + rtol * max(abs(y0), abs(n0))
            sc1 = atol + rtol * max(abs(y1), abs(n1))
            err = math.sqrt(0.5 * ((e0 / sc0) ** 2 + (e1 / sc1) ** 2))
            if not (math.isfinite(err) and math.isfinite(n0) and math.isfinite(n1)):
                if h < 1e-14 * max(1.0, abs(x)):
                    return y0, y1, angle, nacc, nrej, NONFINITE, trace[:npts]
                h *= 0.25
                nrej += 1
                continue
            if err <= 1.0:
                x = seg_hi if last else x + h
                y0 = n0
                y1 = n1
                f0 = k70
                f1 = k71
                nacc += 1
                if mode == 1:
                    at = math.atan2(y0, y1)
                    d = at - last_atan
                    if d > math.pi:
                        d -= 2.0 * math.pi
                    elif d < -math.pi:
                        d += 2.0 * math.pi
                    angle += d
                    last_atan = at
                if record:
                    if npts >= cap:
                        return y0, y1, angle, nacc, nrej, OVERFLOW, trace[:npts]
                    trace[npts, 0] = x
                    trace[npts, 1] = y0
                    trace[npts, 2] = y1
                    trace[npts, 3] = f0
                    trace[npts, 4] = f1
                    trace[npts, 5] = f0
                    trace[npts, 6] = f1
                    trace[npts, 7] = angle
                    npts += 1
                fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
                h = h * min(5.0, max(0.2, fac))
            else:
                h = h * max(0.2, 0.9 * err ** -0.2)
                nrej += 1
                if h < 1e-14 * max(1.0, abs(x)):
                    return y0, y1, angle, nacc, nrej, UNDERFLOW, trace[:npts]
        seg_lo = seg_hi
    return y0, y1, angle, nacc, nrej, status, trace[:npts]
