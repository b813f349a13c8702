"""Perfect-reflector results and short-corrugation-wavelength asymptotics.

For perfect mirrors the frequency integral of the corrugation kernel is
elementary and the coefficient ratio reduces to a two-dimensional integral
over the mode wavevectors gamma, gamma' with a data-dependent inner strip
|gamma - K| < gamma' < gamma + K:

    rho(K) = 30 / (pi^4 K) * Int dgamma Int dgamma' e^(-gamma-gamma')
             * (1/4 (gamma^2 + gamma'^2 - K^2)^2 + gamma^2 gamma'^2)
             / ((1 - e^(-2 gamma)) (1 - e^(-2 gamma')))

with the large-K closed form

    rho(K) ~= 30/pi^4 (K^4/15 + K^2 + 3K + 3) e^(-K).

In the rugged regime (K well beyond both 1 and the plasma scale) the plasma
ratio behaves like beta(Lam) K^(7/2) e^(-K); ``fit_beta`` extracts the
prefactor as the median of compensated samples over a caller-chosen window
and reports the residual spread so the flatness of the window is auditable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mirror_optics import MirrorModel
from .plane_plane import RESPONSE_SPEC, rho_pp
from .quadrature import (
    DependentAxis,
    QuadResult,
    QuadSpec,
    SemiInfiniteAxis,
    integrate_nested,
)

__all__ = [
    "AsymptoticFit",
    "rho_perfect",
    "rho_perfect_asymptote",
    "alpha",
    "fit_beta",
]

_PI = math.pi
DEFAULT_SPEC = QuadSpec(rel_tol=1e-6)


def _strip_integrand(k: float):
    ksq = k * k

    def f(g: float, gp: np.ndarray) -> np.ndarray:
        num = 0.25 * (g * g + gp * gp - ksq) ** 2 + g * g * gp * gp
        den = (-np.expm1(-2.0 * g)) * (-np.expm1(-2.0 * gp))
        return np.exp(-g - gp) * num / den

    return f


def rho_perfect(kC_L: float, spec: QuadSpec = DEFAULT_SPEC) -> QuadResult:
    """Coefficient ratio for perfect reflectors; depends on K = k_C L only."""
    if not kC_L > 0.0:
        raise ValueError(f"need kC_L > 0, got {kC_L}")
    k = float(kC_L)
    res = integrate_nested(
        _strip_integrand(k),
        [SemiInfiniteAxis(), DependentAxis(lambda g: (abs(g - k), g + k))],
        spec,
    )
    c = 30.0 / (_PI**4 * k)
    return QuadResult(c * res.value, c * res.err_est, res.evals, res.converged)


def rho_perfect_asymptote(kC_L: float) -> float:
    """Large-K closed form of the perfect-reflector ratio (exact arithmetic;
    not a valid approximation of rho below K of order ten)."""
    k = float(kC_L)
    return 30.0 / _PI**4 * (k**4 / 15.0 + k * k + 3.0 * k + 3.0) * math.exp(-k)


def alpha(kC_L: float, kP_L: float | None = None,
          model: MirrorModel = MirrorModel.perfect(),
          spec: QuadSpec = RESPONSE_SPEC) -> QuadResult:
    """Exponentially compensated ratio alpha = rho e^K, the quantity that
    exposes the power-law prefactor in the rugged regime (for perfect
    mirrors alpha approaches 2/pi^4 K^4 from above)."""
    if kC_L == 0.0:
        return QuadResult(1.0, 0.0, 0, True)
    if model.is_perfect:
        rho = rho_perfect(kC_L, spec)
    else:
        rho = rho_pp(kC_L, kP_L, model, spec)
    c = math.exp(kC_L)
    return QuadResult(c * rho.value, c * rho.err_est, rho.evals, rho.converged)


@dataclass(frozen=True)
class AsymptoticFit:
    """Rugged-regime prefactor extracted from compensated samples."""

    beta_coeff: float
    fit_range: tuple[float, float]
    residual: float  # max relative deviation from the median over the range
    exponent: float
    kc_l_values: tuple[float, ...]
    compensated: tuple[float, ...]


def fit_beta(kP_L: float | None, model: MirrorModel,
             fit_range: tuple[float, float],
             spec: QuadSpec = RESPONSE_SPEC,
             exponent: float = 3.5,
             n_points: int = 5) -> AsymptoticFit:
    """Estimate the prefactor of rho ~= beta K^exponent e^(-K) over a window.

    The window must sit in the rugged regime, K >= max(8, 2 kP_L).  beta is
    the median of rho e^K K^(-exponent) over the sampled points; the residual
    records how flat the compensated curve actually is and is never folded
    away.  Any non-convergent sample aborts the fit.
    """
    lo, hi = fit_range
    floor = 8.0 if model.is_perfect else max(8.0, 2.0 * kP_L)
    if not (hi > lo >= floor):
        raise ValueError(
            f"fit_range {fit_range} must sit inside the rugged regime "
            f"[{floor}, inf)"
        )
    if n_points < 3:
        raise ValueError("need at least 3 sample points")
    ks = np.linspace(lo, hi, n_points)
    comp = []
    for k in ks:
        r = rho_perfect(float(k), spec) if model.is_perfect else rho_pp(
            float(k), kP_L, model, spec
        )
        if not r.converged:
            raise RuntimeError(
                f"quadrature did not converge at kC_L = {k:g} "
                f"(err_est = {r.err_est:g}, evals = {r.evals}); fit aborted"
            )
        comp.append(r.value * math.exp(float(k)) * float(k) ** (-exponent))
    comp_arr = np.asarray(comp)
    beta = float(np.median(comp_arr))
    residual = float(np.max(np.abs(comp_arr / beta - 1.0)))
    return AsymptoticFit(
        beta_coeff=beta,
        fit_range=(float(lo), float(hi)),
        residual=residual,
        exponent=float(exponent),
        kc_l_values=tuple(float(k) for k in ks),
        compensated=tuple(float(c) for c in comp_arr),
    )
