"""Compiled kernels for the corrugation response function and plate integrals.

The second-order corrugation kernel is integrated in the coordinates
(gamma1, gamma2, psi), where gamma_i = kappa_i L are the imaginary-axis
wavevector magnitudes of the two coupled modes and psi parameterizes the
frequency through u = sqrt(P) sin(psi).  This is an exact change of variables
from (u, k', phi): at fixed frequency the pair (|k'|, phi) maps to
(gamma1, gamma2) with Jacobian 1/(K sqrt(P - u^2)), and the arcsine
substitution absorbs the inverse square root.  P is the positive product

    P = (gamma2^2 - (gamma1-K)^2) ((gamma1+K)^2 - gamma2^2) / (4 K^2)

on the admissible strip |gamma1 - K| < gamma2 < gamma1 + K.  The perfect
reflector kernel is frequency independent, so its psi integral is pi/2 times
the kernel and the strip integral reduces to the known two-dimensional form.

All reflection quantities are evaluated in cancellation-free forms, e.g.

    r_te       = -Lam^2 / (gamma + gamma_t)^2
    r_tm       = Lam^2 (tau^2 + gamma gamma_t) /
                 ((gamma + gamma_t)(gamma Lam^2 + u^2 (gamma + gamma_t)))
    1 - r_tm   = u^2 (Lam^2 + (gamma + gamma_t)^2) / (same denominator x (gamma+gamma_t))
    mu_minus   = -Lam^2 gamma gamma_t / (gamma Lam^2 + u^2 (gamma + gamma_t))

with gamma_t = sqrt(gamma^2 + Lam^2), tau^2 = gamma^2 - u^2 and Lam the
plasma wavevector scaled by the gap.  These remain exact at u = 0, where the
TM amplitude reaches its static limit r_tm = 1.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .quadrature import gauss_legendre

__all__ = [
    "b_plasma_point",
    "b_perfect_point",
    "response_outer_block",
    "pp_gamma_block",
]


def _half_rule(n):
    x, w = gauss_legendre(n)
    return np.ascontiguousarray(0.5 * (x + 1.0)), np.ascontiguousarray(0.5 * w)


def _psi_rule(n):
    x, w = gauss_legendre(n)
    psi = 0.25 * math.pi * (x + 1.0)
    return np.ascontiguousarray(np.sin(psi)), np.ascontiguousarray(0.25 * math.pi * w)


# sin(psi) tables for the arcsine-mapped frequency axis, one per doubling level
_SIN8, _PSIW8 = _psi_rule(8)
_SIN16, _PSIW16 = _psi_rule(16)
_SIN32, _PSIW32 = _psi_rule(32)
_SIN64, _PSIW64 = _psi_rule(64)

# unit-interval rules for the polar-angle integral of the plate observables
_X16, _XW16 = _half_rule(16)
_X32, _XW32 = _half_rule(32)
_X64, _XW64 = _half_rule(64)
_X128, _XW128 = _half_rule(128)

# [-1, 1] rules for the gamma2 panels
_G8X, _G8W = gauss_legendre(8)
_G16X, _G16W = gauss_legendre(16)

_MID_CAP = 160  # max gamma2 panels per outer node


@njit(cache=True, nogil=True)
def _mode_static(gam, lam):
    """Frequency-independent quantities of one mode: returns
    (gt, e1, em2, e2, h_te, r_te)."""
    gt = math.sqrt(gam * gam + lam * lam)
    e1 = math.exp(-gam)
    e2 = e1 * e1
    em2 = -math.expm1(-2.0 * gam)
    s = gam + gt
    r_te = -(lam * lam) / (s * s)
    one_m_rte2 = (2.0 * gam / s) * ((s * s + lam * lam) / (s * s))
    h_te = r_te * e1 / (em2 + one_m_rte2 * e2)
    return gt, e1, em2, e2, h_te, r_te


@njit(cache=True, nogil=True)
def _mode_dynamic(gam, gt, e1, em2, e2, u, lam):
    """Frequency-dependent quantities of one mode: returns
    (h_tm, sum_b, sum_d, beta, beta_t).

    sum_b and sum_d are the two branch sums of the kernel weights,
    sum_e mu_e and sum_e e mu_e, in closed all-positive-denominator form

        sum_b = 2 u^2 gamma gamma_t^2 / q
        sum_d = 2 (u^2 + Lam^2) gamma^2 gamma_t / q
        q     = u^2 tau^2 + (u^2 + Lam^2) gamma^2

    The branch weights individually grow like Lam, so summing them
    literally loses (Lam/gamma)^2 epsilon of relative accuracy; the closed
    forms keep the kernel exact up to the perfect-reflector limit."""
    tau2 = gam * gam - u * u
    if tau2 < 0.0:
        tau2 = 0.0
    tau = math.sqrt(tau2)
    s = gam + gt
    den = gam * lam * lam + u * u * s
    r_tm = lam * lam * (tau2 + gam * gt) / (s * den)
    one_m_rtm = u * u * (lam * lam + s * s) / (s * den)
    one_m_rtm2 = one_m_rtm * (1.0 + r_tm)
    h_tm = r_tm * e1 / (em2 + one_m_rtm2 * e2)
    u2l2 = u * u + lam * lam
    q = u * u * tau2 + u2l2 * gam * gam
    sum_b = 2.0 * u * u * gam * (gt * gt) / q
    sum_d = 2.0 * u2l2 * (gam * gam) * gt / q
    beta = tau / gam
    beta_t = tau / gt
    return h_tm, sum_b, sum_d, beta, beta_t


@njit(cache=True, nogil=True)
def _b_assemble(g1, h_te1, h_tm1, sb1, sd1, b1, bt1,
                g2, h_te2, h_tm2, sb2, sd2, b2, bt2, c, s2):
    """Polarization-block sum of the cross kernel at one mode pair, with the
    branch weights pre-summed per mode: the TE blocks use the identity
    sum_e mu_e (1 + e beta beta_t) = 2 gamma, the mixed and TM blocks use
    the closed branch sums from :func:`_mode_dynamic`."""
    te_te = (h_te1 * h_te2) * (c * c) * (4.0 * g1 * g2)
    te_tm = ((h_te1 * h_tm2) * s2) * (2.0 * g1 * sb2)
    tm_te = ((h_tm1 * h_te2) * s2) * (2.0 * g2 * sb1)
    t1 = c * sb1 + (b1 * bt2) * sd1
    t2 = c * sb2 + (b2 * bt1) * sd2
    tm_tm = (h_tm1 * h_tm2) * (t1 * t2)
    return (te_te + tm_tm) - (te_tm + tm_te)


@njit(cache=True, nogil=True)
def b_plasma_point(g1, g2, u, c, lam):
    """Plasma cross kernel (scaled by L^2) at one mode pair.

    g1, g2 are the two mode wavevectors kappa L, u the imaginary frequency
    xi L / c shared by both modes, c the cosine of the angle between the
    transverse wavevectors and lam the plasma wavevector k_P L.
    """
    s2 = 1.0 - c * c
    if s2 < 0.0:
        s2 = 0.0
    gt1, e11, em21, e21, h_te1, _ = _mode_static(g1, lam)
    gt2, e12, em22, e22, h_te2, _ = _mode_static(g2, lam)
    h_tm1, sb1, sd1, b1, bt1 = _mode_dynamic(g1, gt1, e11, em21, e21, u, lam)
    h_tm2, sb2, sd2, b2, bt2 = _mode_dynamic(g2, gt2, e12, em22, e22, u, lam)
    return _b_assemble(g1, h_te1, h_tm1, sb1, sd1, b1, bt1,
                       g2, h_te2, h_tm2, sb2, sd2, b2, bt2, c, s2)


@njit(cache=True, nogil=True)
def b_perfect_point(g1, g2, dsq):
    """Perfect-reflector cross kernel (scaled by L^2); dsq is the squared
    transverse momentum transfer |k1 - k2|^2 L^2."""
    q1 = math.exp(-g1) / (-math.expm1(-2.0 * g1))
    q2 = math.exp(-g2) / (-math.expm1(-2.0 * g2))
    poly = 0.25 * (g1 * g1 + g2 * g2 - dsq) ** 2 + g1 * g1 * g2 * g2
    return 4.0 * q1 * q2 * poly / (g1 * g2)


@njit(cache=True, nogil=True)
def _psi_level(g1, gt1, e11, em21, e21, h_te1,
               g2, gt2, e12, em22, e22, h_te2,
               sqp, ksq, lam, sin_t, w_t):
    acc = 0.0
    for j in range(sin_t.shape[0]):
        u = sqp * sin_t[j]
        t1sq = g1 * g1 - u * u
        t2sq = g2 * g2 - u * u
        if t1sq < 0.0:
            t1sq = 0.0
        if t2sq < 0.0:
            t2sq = 0.0
        tt = math.sqrt(t1sq * t2sq)
        if tt > 0.0:
            c = (t1sq + t2sq - ksq) / (2.0 * tt)
            if c > 1.0:
                c = 1.0
            elif c < -1.0:
                c = -1.0
        else:
            c = 1.0
        s2 = 1.0 - c * c
        h_tm1, sb1, sd1, b1, bt1 = _mode_dynamic(g1, gt1, e11, em21, e21, u, lam)
        h_tm2, sb2, sd2, b2, bt2 = _mode_dynamic(g2, gt2, e12, em22, e22, u, lam)
        acc += w_t[j] * _b_assemble(g1, h_te1, h_tm1, sb1, sd1, b1, bt1,
                                    g2, h_te2, h_tm2, sb2, sd2, b2, bt2, c, s2)
    return acc


@njit(cache=True, nogil=True)
def _psi_integral(g1, gt1, e11, em21, e21, h_te1, g2, k, lam, tol):
    """Frequency integral of the plasma kernel at fixed (gamma1, gamma2),
    refined by doubling the rule order.  Returns (value, err, evals)."""
    lo = abs(g1 - k)
    hi = g1 + k
    p = (g2 - lo) * (g2 + lo) * (hi - g2) * (hi + g2) / (4.0 * k * k)
    if p <= 0.0:
        return 0.0, 0.0, 0
    sqp = math.sqrt(p)
    ksq = k * k
    gt2, e12, em22, e22, h_te2, _ = _mode_static(g2, lam)

    prev = _psi_level(g1, gt1, e11, em21, e21, h_te1,
                      g2, gt2, e12, em22, e22, h_te2,
                      sqp, ksq, lam, _SIN8, _PSIW8)
    evals = 8
    for level in range(3):
        if level == 0:
            sin_t, w_t = _SIN16, _PSIW16
        elif level == 1:
            sin_t, w_t = _SIN32, _PSIW32
        else:
            sin_t, w_t = _SIN64, _PSIW64
        cur = _psi_level(g1, gt1, e11, em21, e21, h_te1,
                         g2, gt2, e12, em22, e22, h_te2,
                         sqp, ksq, lam, sin_t, w_t)
        evals += sin_t.shape[0]
        diff = abs(cur - prev)
        if diff <= tol * abs(cur):
            return cur, diff, evals
        prev = cur
    return prev, diff, evals


@njit(cache=True, nogil=True)
def _mid_panel(g1, gt1, e11, em21, e21, h_te1, a, b, k, lam, perfect,
               tol_psi):
    """One gamma2 panel evaluated with the 8- and 16-point rules.
    Integrand is gamma2 times the frequency-integrated kernel (the gamma1
    measure factor is applied by the caller).  Returns (value, err, evals)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    lo8 = 0.0
    evals = 0
    for j in range(_G8X.shape[0]):
        g2 = mid + half * _G8X[j]
        if perfect:
            f = 0.5 * math.pi * b_perfect_point(g1, g2, k * k) * g2
            evals += 1
        else:
            v, _, ev = _psi_integral(g1, gt1, e11, em21, e21, h_te1, g2, k, lam, tol_psi)
            f = v * g2
            evals += ev
        lo8 += _G8W[j] * f
    hi16 = 0.0
    for j in range(_G16X.shape[0]):
        g2 = mid + half * _G16X[j]
        if perfect:
            f = 0.5 * math.pi * b_perfect_point(g1, g2, k * k) * g2
            evals += 1
        else:
            v, _, ev = _psi_integral(g1, gt1, e11, em21, e21, h_te1, g2, k, lam, tol_psi)
            f = v * g2
            evals += ev
        hi16 += _G16W[j] * f
    lo8 *= half
    hi16 *= half
    return hi16, abs(hi16 - lo8), evals


@njit(cache=True, nogil=True)
def _mid_integral(g1, k, lam, perfect, tol_mid, tol_psi):
    """Adaptive integral over gamma2 in [|gamma1-K|, gamma1+K] of
    gamma2 x (psi integral of the kernel).  Returns (value, err, evals, ok)."""
    lo = abs(g1 - k)
    hi = g1 + k
    if hi <= lo:
        return 0.0, 0.0, 0, True

    gt1, e11, em21, e21, h_te1, _ = _mode_static(g1, lam)

    pa = np.empty(_MID_CAP)
    pb = np.empty(_MID_CAP)
    pv = np.empty(_MID_CAP)
    pe = np.empty(_MID_CAP)

    # seed panels: fine near the lower edge where e^{-gamma2} is largest
    width = hi - lo
    n = 0
    if width <= 16.0:
        n0 = 1 + int(width / 4.0)
        step = width / n0
        for i in range(n0):
            pa[n] = lo + i * step
            pb[n] = lo + (i + 1) * step if i < n0 - 1 else hi
            n += 1
    else:
        edges = (lo, lo + 4.0, lo + 8.0, lo + 16.0, hi)
        for i in range(4):
            pa[n] = edges[i]
            pb[n] = edges[i + 1]
            n += 1

    evals = 0
    for i in range(n):
        pv[i], pe[i], ev = _mid_panel(g1, gt1, e11, em21, e21, h_te1,
                                      pa[i], pb[i], k, lam, perfect, tol_psi)
        evals += ev

    min_width = 1e-12 * width
    while True:
        total = 0.0
        errsum = 0.0
        for i in range(n):
            total += pv[i]
            errsum += pe[i]
        if errsum <= tol_mid * abs(total):
            return total, errsum, evals, True
        worst = 0
        werr = -1.0
        for i in range(n):
            if pe[i] > werr and (pb[i] - pa[i]) > min_width:
                worst = i
                werr = pe[i]
        if werr < 0.0 or n >= _MID_CAP:
            return total, errsum, evals, False
        a = pa[worst]
        b = pb[worst]
        m = 0.5 * (a + b)
        pv[worst], pe[worst], ev1 = _mid_panel(g1, gt1, e11, em21, e21, h_te1,
                                               a, m, k, lam, perfect, tol_psi)
        pb[worst] = m
        pa[n] = m
        pb[n] = b
        pv[n], pe[n], ev2 = _mid_panel(g1, gt1, e11, em21, e21, h_te1,
                                       m, b, k, lam, perfect, tol_psi)
        n += 1
        evals += ev1 + ev2


@njit(cache=True, nogil=True)
def response_outer_block(g1s, k, lam, perfect, tol_mid, tol_psi,
                         out_vals, out_errs):
    """Vectorized outer integrand of the response function: for each gamma1
    node, gamma1 times the adaptive (gamma2, psi) integral of the kernel.
    Fills out_vals/out_errs; returns (total evals, all-levels-converged)."""
    evals = 0
    ok = True
    for i in range(g1s.shape[0]):
        g1 = g1s[i]
        if g1 <= 0.0:
            out_vals[i] = 0.0
            out_errs[i] = 0.0
            continue
        v, e, ev, good = _mid_integral(g1, k, lam, perfect, tol_mid, tol_psi)
        out_vals[i] = g1 * v
        out_errs[i] = g1 * e
        evals += ev
        ok = ok and good
    return evals, ok


@njit(cache=True, nogil=True)
def _pp_x_level(gam, lam, which, xs, ws):
    """Polar-angle integral of the plate integrand family at one gamma.

    which = 0: sum_p ln(1 - r_p^2 e^{-2 gamma})            (energy)
    which = 1: sum_p r_p^2 e^{-2 gamma} / d_p              (force)
    which = 2: sum_p r_p^2 e^{-2 gamma} (1/d_p + r_p^2 e^{-2 gamma}/d_p^2)
                                                           (curvature, two-term)
    which = 3: sum_p r_p^2 e^{-2 gamma} / d_p^2            (specular response)
    """
    gt, _, em2, e2, _, r_te = _mode_static(gam, lam)
    s = gam + gt
    acc = 0.0
    for j in range(xs.shape[0]):
        u = gam * xs[j]
        tau2 = gam * gam - u * u
        if tau2 < 0.0:
            tau2 = 0.0
        den = gam * lam * lam + u * u * s
        r_tm = lam * lam * (tau2 + gam * gt) / (s * den)
        val = 0.0
        for p in range(2):
            r = r_te if p == 0 else r_tm
            r2e2 = r * r * e2
            d = 1.0 - r2e2
            if which == 0:
                val += math.log1p(-r2e2)
            elif which == 1:
                val += r2e2 / d
            elif which == 2:
                val += r2e2 * (1.0 / d + r2e2 / (d * d))
            else:
                val += r2e2 / (d * d)
        acc += ws[j] * val
    return acc


@njit(cache=True, nogil=True)
def _pp_perfect_value(gam, which):
    e2 = math.exp(-2.0 * gam)
    d = -math.expm1(-2.0 * gam)
    if which == 0:
        return 2.0 * math.log1p(-e2)
    if which == 1:
        return 2.0 * e2 / d
    if which == 2:
        return 2.0 * e2 * (1.0 / d + e2 / (d * d))
    return 2.0 * e2 / (d * d)


@njit(cache=True, nogil=True)
def pp_gamma_block(gammas, lam, which, perfect, tol_x, out_vals, out_errs):
    """Vectorized plate integrand: gamma^m times the polar-angle integral,
    with m = 2, 3, 4, 4 for which = 0, 1, 2, 3.  Perfect mirrors have no
    angle dependence, so their angle integral is the integrand itself."""
    if which == 0:
        m = 2.0
    elif which == 1:
        m = 3.0
    else:
        m = 4.0
    evals = 0
    ok = True
    for i in range(gammas.shape[0]):
        gam = gammas[i]
        if gam <= 0.0:
            out_vals[i] = 0.0
            out_errs[i] = 0.0
            continue
        w = gam ** m
        if perfect:
            out_vals[i] = w * _pp_perfect_value(gam, which)
            out_errs[i] = 0.0
            evals += 1
            continue
        prev = _pp_x_level(gam, lam, which, _X16, _XW16)
        evals += 16
        diff = 0.0
        for level in range(3):
            if level == 0:
                xs, ws = _X32, _XW32
            elif level == 1:
                xs, ws = _X64, _XW64
            else:
                xs, ws = _X128, _XW128
            cur = _pp_x_level(gam, lam, which, xs, ws)
            evals += xs.shape[0]
            diff = abs(cur - prev)
            if diff <= tol_x * abs(cur):
                prev = cur
                break
            prev = cur
        out_vals[i] = w * prev
        out_errs[i] = w * diff
        ok = ok and diff <= tol_x * abs(prev)
    return evals, ok
