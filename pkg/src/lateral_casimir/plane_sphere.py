"""Plane-sphere observables via the proximity average over the sphere.

The sphere enters only through the local-distance average: with x = ln(L'/L)
the coefficient and its proximity-force counterpart are

    Gamma_PS      = pi k_C R (hbar c / L^4) Int_0^X e^(-4x) g_hat(K e^x, Lam e^x) dx
    Gamma_PS^PFA  = pi k_C R (hbar c / L^4) Fhat(Lam)

(coefficient magnitudes in N/m^2, numerically equal to pN/um^2; multiply by
a1 a2 to get the force amplitude).  The accuracy ratio rho_PS is computed
independently as the force-weighted average of the plane-plane ratio over
distances beyond the closest approach, which makes the sphere radius drop
out exactly.

Every abscissa of the distance integral costs a full response-function
evaluation, so results are memoized in a thread-safe table keyed by the
quantized (variant, K, Lam, tolerance) tuple.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .mirror_optics import MirrorModel
from .plane_plane import HBAR_C, RESPONSE_SPEC, ResponseValue, f_hat, response_g
from .quadrature import QuadResult, QuadSpec, integrate_finite
from .search import PeakResult, golden_section_max, loglog_slope

__all__ = [
    "SphereSetup",
    "PsResult",
    "OffsetCurves",
    "PowerLawFit",
    "gamma_ps",
    "rho_ps",
    "find_ps_peak",
    "powerlaw_fit_ps",
    "offset_analysis",
    "cached_response_g",
    "clear_response_cache",
]

_PI = math.pi

PS_SPEC = QuadSpec(rel_tol=5e-5)

# advisory validity thresholds for the proximity treatment of the curvature
_MIN_R_OVER_L = 50.0
_MIN_RL_OVER_LC2 = 10.0

# hard cap on the distance integral, in units of max(L, lambda_C)
_LPRIME_SPAN = 50.0
_SCAN_STEP = 0.4


@dataclass(frozen=True)
class SphereSetup:
    """Sphere radius, closest approach and the corrugation/plasma scales.

    Validity of the curvature average requires R much larger than L and
    R L much larger than lambda_C^2; the flags surface both conditions but
    nothing is enforced.
    """

    R_um: float
    L_nm: float
    lambda_c_nm: float
    lambda_p_nm: float | None = None

    def __post_init__(self):
        if not self.R_um > 0.0:
            raise ValueError(f"R_um must be > 0, got {self.R_um}")
        if not self.L_nm > 0.0:
            raise ValueError(f"L_nm must be > 0, got {self.L_nm}")
        if not self.lambda_c_nm > 0.0:
            raise ValueError(f"lambda_c_nm must be > 0, got {self.lambda_c_nm}")

    @property
    def r_over_l(self) -> float:
        return self.R_um * 1e3 / self.L_nm

    @property
    def rl_over_lc2(self) -> float:
        return (self.R_um * 1e3 * self.L_nm) / self.lambda_c_nm**2

    @property
    def curvature_ok(self) -> bool:
        return self.r_over_l >= _MIN_R_OVER_L

    @property
    def corrugation_independent(self) -> bool:
        return self.rl_over_lc2 >= _MIN_RL_OVER_LC2

    @property
    def kC_L(self) -> float:
        return 2.0 * _PI * self.L_nm / self.lambda_c_nm

    def kP_L(self) -> float | None:
        if self.lambda_p_nm is None:
            return None
        return 2.0 * _PI * self.L_nm / self.lambda_p_nm


@dataclass(frozen=True)
class PsResult:
    gamma_ps: float  # pN/um^2 per nm^2 of a1 a2 (== N/m^2 per m^2)
    gamma_ps_pfa: float
    rho_ps: float
    err_est: float
    evals: int
    converged: bool
    curvature_ok: bool
    corrugation_independent: bool


class _ResponseCache:
    """Concurrent-read, synchronized-insert memo table for response values."""

    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()

    def get_or_compute(self, key, compute):
        try:
            return self._data[key]
        except KeyError:
            pass
        value = compute()
        with self._lock:
            return self._data.setdefault(key, value)

    def clear(self):
        with self._lock:
            self._data.clear()

    def __len__(self):
        return len(self._data)


_CACHE = _ResponseCache()


def clear_response_cache() -> None:
    _CACHE.clear()


def _quantized(x: float) -> float:
    """Collapse keys that agree to one part in 10^9."""
    return float(f"{x:.9e}")


def cached_response_g(kC_L: float, kP_L: float | None, model: MirrorModel,
                      spec: QuadSpec = RESPONSE_SPEC) -> ResponseValue:
    """Memoized :func:`response_g`; safe for concurrent sweeps."""
    key = (
        model.variant,
        _quantized(kC_L),
        _quantized(kP_L) if kP_L is not None else None,
        _quantized(spec.rel_tol),
        _quantized(spec.abs_floor) if spec.abs_floor else 0.0,
        spec.max_evals,
        _quantized(spec.decay_cutoff),
    )
    return _CACHE.get_or_compute(key, lambda: response_g(kC_L, kP_L, model, spec))


def _distance_profile(setup: SphereSetup, model: MirrorModel, spec: QuadSpec,
                      inner_spec: QuadSpec, weighted: bool):
    """Distance integral over x = ln(L'/L) of e^(-4x) g_hat(K e^x, Lam e^x),
    or of the same with g_hat replaced by g_hat(0; Lam e^x) rho(K e^x) when
    ``weighted`` (the two are algebraically identical; the second is the
    literal force-weighted average).  Returns (QuadResult, evals)."""
    k0 = setup.kC_L
    lam0 = setup.kP_L()
    if model.is_perfect:
        lam0 = None
    state = {"evals": 0, "ok": True}

    def g_at(x: float) -> float:
        s = math.exp(x)
        gk = cached_response_g(k0 * s, None if lam0 is None else lam0 * s,
                               model, inner_spec)
        state["evals"] += gk.evals
        state["ok"] = state["ok"] and gk.converged
        if not weighted:
            return gk.g_hat
        g0 = cached_response_g(0.0, None if lam0 is None else lam0 * s,
                               model, inner_spec)
        state["evals"] += g0.evals
        state["ok"] = state["ok"] and g0.converged
        return g0.g_hat * (gk.g_hat / g0.g_hat)

    def f(xs):
        xs = np.atleast_1d(xs)
        return np.array([math.exp(-4.0 * x) * g_at(float(x)) for x in xs])

    # truncate where the integrand has decayed below decay_cutoff relative
    # to its value at the closest approach, capped at the hard span
    x_cap = math.log(_LPRIME_SPAN * max(1.0, setup.lambda_c_nm / setup.L_nm))
    m0 = float(f(np.array([0.0]))[0])
    x_hi = x_cap
    x = _SCAN_STEP
    while x < x_cap:
        if float(f(np.array([x]))[0]) <= spec.decay_cutoff * m0:
            x_hi = x
            break
        x += _SCAN_STEP

    res = integrate_finite(f, 0.0, x_hi, spec)
    out = QuadResult(res.value, res.err_est, state["evals"], res.converged and state["ok"])
    return out


def gamma_ps(setup: SphereSetup, model: MirrorModel,
             spec: QuadSpec = PS_SPEC,
             inner_spec: QuadSpec = RESPONSE_SPEC,
             hbar_c: float = HBAR_C) -> PsResult:
    """Plane-sphere lateral coefficient and its proximity-force counterpart."""
    j = _distance_profile(setup, model, spec, inner_spec, weighted=False)
    lam0 = None if model.is_perfect else setup.kP_L()
    fh = f_hat(lam0, model, spec.with_rel_tol(min(spec.rel_tol, 1e-6)))
    L = setup.L_nm * 1e-9
    k_c = 2.0 * _PI / (setup.lambda_c_nm * 1e-9)
    pref = _PI * k_c * (setup.R_um * 1e-6) * hbar_c / L**4
    g_sc = pref * j.value
    g_pfa = pref * fh.value
    err = pref * (j.err_est + fh.err_est * j.value / fh.value)
    return PsResult(
        gamma_ps=g_sc,
        gamma_ps_pfa=g_pfa,
        rho_ps=j.value / fh.value,
        err_est=err,
        evals=j.evals + fh.evals,
        converged=j.converged and fh.converged,
        curvature_ok=setup.curvature_ok,
        corrugation_independent=setup.corrugation_independent,
    )


def rho_ps(setup: SphereSetup, model: MirrorModel,
           spec: QuadSpec = PS_SPEC,
           inner_spec: QuadSpec = RESPONSE_SPEC) -> QuadResult:
    """Proximity-force accuracy ratio in the plane-sphere geometry, computed
    as the force-weighted average of the plane-plane ratio over distances
    beyond the closest approach.  The sphere radius cancels exactly."""
    w = _distance_profile(setup, model, spec, inner_spec, weighted=True)
    lam0 = None if model.is_perfect else setup.kP_L()
    fh = f_hat(lam0, model, spec.with_rel_tol(min(spec.rel_tol, 1e-6)))
    value = w.value / fh.value
    err = (w.err_est + fh.err_est * value) / fh.value
    return QuadResult(value, err, w.evals + fh.evals, w.converged and fh.converged)


def find_ps_peak(L_nm: float, lambda_p_nm: float | None, R_um: float,
                 model: MirrorModel,
                 spec: QuadSpec = PS_SPEC,
                 inner_spec: QuadSpec = RESPONSE_SPEC,
                 lo: float = 0.5, hi: float = 6.0,
                 xtol: float = 0.02) -> PeakResult:
    """Peak of the plane-sphere coefficient over K = k_C L at fixed L."""

    def coeff(k: float) -> float:
        setup = SphereSetup(R_um, L_nm, 2.0 * _PI * L_nm / k, lambda_p_nm)
        return gamma_ps(setup, model, spec, inner_spec).gamma_ps

    return golden_section_max(coeff, lo, hi, xtol)


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    L_values: tuple[float, ...]
    gamma_values: tuple[float, ...]


def powerlaw_fit_ps(L_range: tuple[float, float], lambda_c_nm: float,
                    lambda_p_nm: float | None, R_um: float,
                    model: MirrorModel,
                    spec: QuadSpec = PS_SPEC,
                    inner_spec: QuadSpec = RESPONSE_SPEC,
                    n_points: int = 9) -> PowerLawFit:
    """Least-squares slope of ln Gamma_PS versus ln L over a distance range."""
    if n_points < 8:
        raise ValueError("need at least 8 sample points")
    ls = np.geomspace(L_range[0], L_range[1], n_points)
    gs = []
    for L in ls:
        setup = SphereSetup(R_um, float(L), lambda_c_nm, lambda_p_nm)
        gs.append(gamma_ps(setup, model, spec, inner_spec).gamma_ps)
    return PowerLawFit(
        exponent=loglog_slope(ls, gs),
        L_values=tuple(float(L) for L in ls),
        gamma_values=tuple(gs),
    )


@dataclass(frozen=True)
class OffsetCurves:
    """Scattering, proximity-force and distance-offset curves on one grid.

    The offset curve is the scattering result evaluated at L - offset and
    plotted at L: an instrument that underestimates the true gap by the
    offset would report exactly this curve.
    """

    L_nm: tuple[float, ...]
    scattering: tuple[float, ...]
    pfa: tuple[float, ...]
    scattering_offset: tuple[float, ...]
    offset_nm: float
    max_gap_offset: float  # max |offset curve - pfa| / pfa over the grid
    max_gap_plain: float  # max |scattering - pfa| / pfa over the grid


def offset_analysis(L_range: tuple[float, float], offset_nm: float,
                    lambda_c_nm: float, lambda_p_nm: float | None, R_um: float,
                    model: MirrorModel,
                    spec: QuadSpec = PS_SPEC,
                    inner_spec: QuadSpec = RESPONSE_SPEC,
                    n_points: int = 9) -> OffsetCurves:
    """Compare the scattering curve, its proximity-force counterpart and the
    scattering curve shifted by a distance-calibration offset."""
    if offset_nm < 0.0:
        raise ValueError(f"offset must be >= 0, got {offset_nm}")
    ls = np.linspace(L_range[0], L_range[1], n_points)

    def curves(L: float) -> tuple[float, float]:
        setup = SphereSetup(R_um, L, lambda_c_nm, lambda_p_nm)
        r = gamma_ps(setup, model, spec, inner_spec)
        return r.gamma_ps, r.gamma_ps_pfa

    sc, pfa, off = [], [], []
    for L in ls:
        s, p = curves(float(L))
        sc.append(s)
        pfa.append(p)
        if offset_nm == 0.0:
            off.append(s)
        else:
            off.append(curves(float(L) - offset_nm)[0])
    sc_a, pfa_a, off_a = np.asarray(sc), np.asarray(pfa), np.asarray(off)
    return OffsetCurves(
        L_nm=tuple(float(L) for L in ls),
        scattering=tuple(sc),
        pfa=tuple(pfa),
        scattering_offset=tuple(off),
        offset_nm=float(offset_nm),
        max_gap_offset=float(np.max(np.abs(off_a - pfa_a) / pfa_a)),
        max_gap_plain=float(np.max(np.abs(sc_a - pfa_a) / pfa_a)),
    )
