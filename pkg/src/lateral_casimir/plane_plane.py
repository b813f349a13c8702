"""Plane-plane observables: Casimir energy, normal force, curvature, the
corrugation response function and the lateral-force coefficient.

Scaling conventions.  With gamma = kappa L, u = xi L / c and x = u / gamma,
the plate integrals reduce to

    E/A   = -(hbar c / L^3) Ehat,    Ehat  = -1/(4 pi^2) I_0
    F/A   =  (hbar c / L^4) Fhat,    Fhat  =  1/(2 pi^2) I_1   (attraction)
    E''/A = -(hbar c / L^5) Chat,    Chat  =  1/pi^2    I_2

where I_m are semi-infinite gamma integrals of gamma^(2+m) times a polar
angle average (see ``_kernels.pp_gamma_block``).  The corrugation response
function is reported through the positive dimensionless combination

    g_hat(K; Lam) = -G(k_C) L^5 / (hbar c),   K = k_C L,  Lam = k_P L,

computed as 1/(4 pi^3 K) times the (gamma1, gamma2, psi) integral of the
cross kernel.  At K = 0 the kernel collapses to the specular combination and
g_hat(0) equals Chat, which is the proximity-force identity used as a
cross-check in the tests.  Lateral forces follow the sign convention that
the energy correction is proportional to +cos(k_C b) with a negative
coefficient, so the force restores crest alignment; coefficient magnitudes
are reported and the restoring sign is applied in ``lateral_force_pp``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .mirror_optics import MirrorModel
from .quadrature import QuadResult, QuadSpec, integrate_finite, integrate_semi_infinite
from .search import PeakResult, golden_section_max

__all__ = [
    "HBAR_C",
    "DEFAULT_SPEC",
    "RESPONSE_SPEC",
    "LengthScales",
    "Corrugation",
    "ResponseValue",
    "EnergyPP",
    "ForcePP",
    "CurvaturePP",
    "GammaPP",
    "LateralForcePP",
    "energy_pp_per_area",
    "force_pp_per_area",
    "d2E_pp_dL2",
    "response_g",
    "rho_pp",
    "gamma_pp_per_area",
    "lateral_force_pp",
    "find_pp_peak",
]

HBAR_C = 3.16153e-26  # N m^2; single conversion site between scaled and SI values

DEFAULT_SPEC = QuadSpec(rel_tol=1e-6)
RESPONSE_SPEC = QuadSpec(rel_tol=1e-5)

_PI = math.pi
# fraction of the corrugation amplitude to the smallest other length scale
# beyond which the second-order expansion is advisory only
_PERTURBATIVE_RATIO = 0.2


@dataclass(frozen=True)
class LengthScales:
    """The length triple (L, lambda_C, lambda_P), all in nanometers."""

    L_nm: float
    lambda_c_nm: float
    lambda_p_nm: float

    def __post_init__(self):
        for name in ("L_nm", "lambda_c_nm", "lambda_p_nm"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")

    @property
    def kC_L(self) -> float:
        return 2.0 * _PI * self.L_nm / self.lambda_c_nm

    @property
    def kP_L(self) -> float:
        return 2.0 * _PI * self.L_nm / self.lambda_p_nm

    @property
    def model(self) -> MirrorModel:
        return MirrorModel.plasma(self.lambda_p_nm)


@dataclass(frozen=True)
class Corrugation:
    """Corrugation amplitudes and lateral mismatch, in nanometers."""

    a1_nm: float
    a2_nm: float
    b_nm: float = 0.0

    def __post_init__(self):
        if self.a1_nm < 0.0 or self.a2_nm < 0.0:
            raise ValueError("corrugation amplitudes must be >= 0")

    def beyond_perturbative(self, scales: LengthScales) -> bool:
        """True when the amplitudes are too large for the second-order
        expansion to be trusted (advisory, never enforced)."""
        smallest = min(scales.L_nm, scales.lambda_c_nm, scales.lambda_p_nm)
        return max(self.a1_nm, self.a2_nm) > _PERTURBATIVE_RATIO * smallest


@dataclass(frozen=True)
class ResponseValue:
    """Quadrature result for g_hat = -G(k) L^5 / (hbar c)."""

    g_hat: float
    err_est: float
    evals: int
    converged: bool


class EnergyPP(NamedTuple):
    per_area: float  # J/m^2, negative (binding)
    dimensionless: float  # -E L^3 / (hbar c A), positive
    quad: QuadResult


class ForcePP(NamedTuple):
    per_area: float  # N/m^2, positive magnitude of the attraction
    dimensionless: float  # F L^4 / (hbar c A)
    quad: QuadResult


class CurvaturePP(NamedTuple):
    per_area: float  # J/m^4, negative
    dimensionless: float  # -E'' L^5 / (hbar c A), positive
    quad: QuadResult


def _variant(model: MirrorModel, kP_L: float | None) -> tuple[float, bool]:
    if model.is_perfect:
        return 0.0, True
    if kP_L is None:
        raise ValueError("plasma variant needs kP_L")
    if not kP_L > 0.0:
        raise ValueError(f"need kP_L > 0, got {kP_L}")
    return float(kP_L), False


def _scaled(res: QuadResult, c: float) -> QuadResult:
    return QuadResult(c * res.value, abs(c) * res.err_est, res.evals, res.converged)


def _pp_integral(which: int, kP_L: float | None, model: MirrorModel,
                 spec: QuadSpec) -> QuadResult:
    """Semi-infinite gamma integral of the plate integrand family.

    The error budget is split evenly between the gamma level and the polar
    angle level; the reported error adds the inner budget to the outer
    estimate.
    """
    lam, perfect = _variant(model, kP_L)
    half = 0.5 * spec.rel_tol
    state = {"evals": 0, "ok": True}

    def f(gammas):
        g = np.ascontiguousarray(gammas, dtype=float)
        vals = np.empty_like(g)
        errs = np.empty_like(g)
        ev, ok = _kernels.pp_gamma_block(g, lam, which, perfect, half, vals, errs)
        state["evals"] += int(ev)
        state["ok"] = state["ok"] and bool(ok)
        return vals

    res = integrate_semi_infinite(f, spec.with_rel_tol(half))
    err = res.err_est + half * abs(res.value)
    return QuadResult(res.value, err, state["evals"], res.converged and state["ok"])


def energy_pp_per_area(L_nm: float, model: MirrorModel,
                       spec: QuadSpec = DEFAULT_SPEC,
                       hbar_c: float = HBAR_C) -> EnergyPP:
    """Casimir energy per unit area between plane parallel plates."""
    kP_L = None if model.is_perfect else model.kp_l(L_nm)
    raw = _pp_integral(0, kP_L, model, spec)
    e_hat = _scaled(raw, -1.0 / (4.0 * _PI**2))
    L = L_nm * 1e-9
    return EnergyPP(-hbar_c * e_hat.value / L**3, e_hat.value, e_hat)


def force_pp_per_area(L_nm: float, model: MirrorModel,
                      spec: QuadSpec = DEFAULT_SPEC,
                      hbar_c: float = HBAR_C) -> ForcePP:
    """Magnitude of the attractive normal force per unit area.

    Computed from the analytic L-derivative of the plate integrand (the
    derivative acts on the round-trip exponential only), not from finite
    differences.
    """
    kP_L = None if model.is_perfect else model.kp_l(L_nm)
    raw = _pp_integral(1, kP_L, model, spec)
    f_hat = _scaled(raw, 1.0 / (2.0 * _PI**2))
    L = L_nm * 1e-9
    return ForcePP(hbar_c * f_hat.value / L**4, f_hat.value, f_hat)


def d2E_pp_dL2(L_nm: float, model: MirrorModel,
               spec: QuadSpec = DEFAULT_SPEC,
               hbar_c: float = HBAR_C) -> CurvaturePP:
    """Second distance derivative of the plate energy per unit area
    (analytic differentiation under the integral; negative)."""
    kP_L = None if model.is_perfect else model.kp_l(L_nm)
    raw = _pp_integral(2, kP_L, model, spec)
    c_hat = _scaled(raw, 1.0 / _PI**2)
    L = L_nm * 1e-9
    return CurvaturePP(-hbar_c * c_hat.value / L**5, c_hat.value, c_hat)


def f_hat(kP_L: float | None, model: MirrorModel,
          spec: QuadSpec = DEFAULT_SPEC) -> QuadResult:
    """Dimensionless force F L^4 / (hbar c A) at a given plasma scale."""
    return _scaled(_pp_integral(1, kP_L, model, spec), 1.0 / (2.0 * _PI**2))


def response_g(kC_L: float, kP_L: float | None = None,
               model: MirrorModel = MirrorModel.perfect(),
               spec: QuadSpec = RESPONSE_SPEC) -> ResponseValue:
    """Dimensionless corrugation response g_hat(K; Lam) = -G(k_C) L^5/(hbar c).

    K = 0 collapses to the specular (proximity-force) limit and is evaluated
    with the dedicated two-dimensional integral.  For K > 0 the kernel is
    integrated over (gamma1, gamma2, psi); the outer gamma1 level receives
    half of the error budget and the two inner levels a quarter each.  The
    outer axis is truncated where the integrand, bounded by
    exp(-gamma1 - |gamma1 - K|) times a low-order polynomial, has fallen more
    than twelve decades below its peak.
    """
    lam, perfect = _variant(model, kP_L)
    if kC_L < 0.0:
        raise ValueError(f"need kC_L >= 0, got {kC_L}")
    if kC_L == 0.0:
        raw = _pp_integral(3, kP_L, model, spec)
        g0 = _scaled(raw, 1.0 / _PI**2)
        return ResponseValue(g0.value, g0.err_est, g0.evals, g0.converged)

    k = float(kC_L)
    tol_outer = 0.5 * spec.rel_tol
    tol_mid = 0.25 * spec.rel_tol
    tol_psi = 0.25 * spec.rel_tol
    state = {"evals": 0, "ok": True}

    def f(g1s):
        g1 = np.ascontiguousarray(g1s, dtype=float)
        vals = np.empty_like(g1)
        errs = np.empty_like(g1)
        ev, ok = _kernels.response_outer_block(
            g1, k, lam, perfect, tol_mid, tol_psi, vals, errs
        )
        state["evals"] += int(ev) if not perfect else len(g1)
        state["ok"] = state["ok"] and bool(ok)
        return vals

    upper = k + 16.0 + 2.5 * math.log1p(k)
    res = integrate_finite(f, 0.0, upper, spec.with_rel_tol(tol_outer))
    norm = 1.0 / (4.0 * _PI**3 * k)
    value = res.value * norm
    err = (res.err_est + (tol_mid + tol_psi) * abs(res.value)) * norm
    return ResponseValue(value, err, state["evals"], res.converged and state["ok"])


def rho_pp(kC_L: float, kP_L: float | None = None,
           model: MirrorModel = MirrorModel.perfect(),
           spec: QuadSpec = RESPONSE_SPEC) -> QuadResult:
    """Ratio of the lateral-force coefficient to its proximity-force value,
    rho = g_hat(K)/g_hat(0).  Errors of the two quadratures add in
    quadrature."""
    if kC_L == 0.0:
        return QuadResult(1.0, 0.0, 0, True)
    gk = response_g(kC_L, kP_L, model, spec)
    g0 = response_g(0.0, kP_L, model, spec)
    value = gk.g_hat / g0.g_hat
    err = value * math.hypot(gk.err_est / gk.g_hat, g0.err_est / g0.g_hat)
    return QuadResult(value, err, gk.evals + g0.evals, gk.converged and g0.converged)


class GammaPP(NamedTuple):
    per_area: float  # N/m^4, coefficient magnitude per a1 a2
    per_area_pfa: float  # N/m^4
    pn_um2_nm2: float  # pN/um^2 per nm^2 of a1 a2
    pn_um2_nm2_pfa: float
    rho: float
    err_est: float
    evals: int
    converged: bool


def gamma_pp_per_area(scales: LengthScales, model: MirrorModel,
                      spec: QuadSpec = RESPONSE_SPEC,
                      hbar_c: float = HBAR_C) -> GammaPP:
    """Lateral-force coefficient magnitude per unit plate area and per unit
    a1 a2, together with its proximity-force counterpart.

    The restoring sign convention lives in :func:`lateral_force_pp`: the
    physical coefficient is minus the magnitude returned here.
    """
    kP_L = None if model.is_perfect else scales.kP_L
    gk = response_g(scales.kC_L, kP_L, model, spec)
    g0 = response_g(0.0, kP_L, model, spec)
    L = scales.L_nm * 1e-9
    k_c = 2.0 * _PI / (scales.lambda_c_nm * 1e-9)
    conv = hbar_c * k_c / (2.0 * L**5)
    per_area = conv * gk.g_hat
    per_area_pfa = conv * g0.g_hat
    err = conv * math.hypot(gk.err_est, g0.err_est * gk.g_hat / g0.g_hat)
    return GammaPP(
        per_area=per_area,
        per_area_pfa=per_area_pfa,
        pn_um2_nm2=per_area * 1e-18,
        pn_um2_nm2_pfa=per_area_pfa * 1e-18,
        rho=gk.g_hat / g0.g_hat,
        err_est=err,
        evals=gk.evals + g0.evals,
        converged=gk.converged and g0.converged,
    )


class LateralForcePP(NamedTuple):
    per_area: float  # N/m^2, signed; restores crest alignment
    per_area_pfa: float  # N/m^2, signed
    rho: float
    perturbative: bool  # False when the amplitudes violate the expansion
    err_est: float
    evals: int
    converged: bool


def lateral_force_pp(scales: LengthScales, corr: Corrugation, model: MirrorModel,
                     spec: QuadSpec = RESPONSE_SPEC,
                     hbar_c: float = HBAR_C) -> LateralForcePP:
    """Lateral force per unit area for a corrugation pair, with its
    proximity-force counterpart.

    The force is -Gamma a1 a2 sin(k_C b) with Gamma the positive coefficient
    magnitude, so it vanishes at b = 0 and b = lambda_C/2, is extremal at
    b = lambda_C/4, and pushes the plates back toward aligned crests.
    """
    g = gamma_pp_per_area(scales, model, spec, hbar_c)
    a1a2 = corr.a1_nm * corr.a2_nm * 1e-18  # m^2
    phase = scales.kC_L * corr.b_nm / scales.L_nm  # k_C b
    s = math.sin(phase)
    return LateralForcePP(
        per_area=-g.per_area * a1a2 * s,
        per_area_pfa=-g.per_area_pfa * a1a2 * s,
        rho=g.rho,
        perturbative=not corr.beyond_perturbative(scales),
        err_est=g.err_est * a1a2 * abs(s),
        evals=g.evals,
        converged=g.converged,
    )


def find_pp_peak(L_nm: float, lambda_p_nm: float | None, model: MirrorModel,
                 spec: QuadSpec = RESPONSE_SPEC,
                 lo: float = 0.5, hi: float = 6.0, xtol: float = 0.02) -> PeakResult:
    """Peak of the lateral-force coefficient over the scaled corrugation
    wavenumber K = k_C L at fixed L (the coefficient is proportional to
    K g_hat(K))."""
    kP_L = None
    if not model.is_perfect:
        if lambda_p_nm is None:
            lambda_p_nm = model.lambda_p_nm
        kP_L = 2.0 * _PI * L_nm / lambda_p_nm
    return golden_section_max(
        lambda k: k * response_g(k, kP_L, model, spec).g_hat, lo, hi, xtol
    )
