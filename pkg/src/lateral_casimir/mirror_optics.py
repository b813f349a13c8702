"""Optical response of the mirrors on the imaginary frequency axis.

Everything here is dimensionless: transverse wavevectors tau = k L and
frequencies u = xi L / c are scaled by the gap L, and the plasma response
enters through the single parameter kp_l = k_P L = 2 pi L / lambda_P.
The wavevector magnitude of a mode is gamma = sqrt(tau^2 + u^2) and its
in-medium counterpart gamma_t = sqrt(gamma^2 + kp_l^2).

Reflection amplitudes are computed in cancellation-free forms equivalent to
the textbook ratios

    r_TE = (gamma - gamma_t) / (gamma + gamma_t)
    r_TM = (eps gamma - gamma_t) / (eps gamma + gamma_t),  eps = 1 + (kp_l/u)^2

namely r_TE = -kp_l^2 / (gamma + gamma_t)^2 and

    r_TM = kp_l^2 (tau^2 + gamma gamma_t)
           / ((gamma + gamma_t)(gamma kp_l^2 + u^2 (gamma + gamma_t)))

which remain finite and exact at u = 0 (static limit r_TM = 1, r_TE given by
the same expression).  The perfect-reflector variant is r_TE = -1, r_TM = +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Polarization",
    "MirrorModel",
    "ModePoint",
    "KernelInputs",
    "ZeroFrequencyError",
    "epsilon_imag",
    "fresnel",
    "roundtrip_h",
    "cross_kernel_b",
]


class ZeroFrequencyError(ValueError):
    """The permittivity diverges at u = 0; callers must use the static-limit
    amplitudes instead (``fresnel`` and ``KernelInputs`` already do)."""


class Polarization(Enum):
    TE = "TE"
    TM = "TM"


@dataclass(frozen=True)
class MirrorModel:
    """Mirror response: plasma metal with wavelength ``lambda_p_nm`` or an
    ideal perfect reflector."""

    variant: str
    lambda_p_nm: float | None = None

    def __post_init__(self):
        if self.variant not in ("plasma", "perfect"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "plasma":
            if self.lambda_p_nm is None or not self.lambda_p_nm > 0.0:
                raise ValueError("plasma variant needs lambda_p_nm > 0")
        elif self.lambda_p_nm is not None:
            raise ValueError("perfect variant takes no plasma wavelength")

    @classmethod
    def plasma(cls, lambda_p_nm: float) -> "MirrorModel":
        return cls("plasma", lambda_p_nm)

    @classmethod
    def perfect(cls) -> "MirrorModel":
        return cls("perfect")

    @property
    def is_perfect(self) -> bool:
        return self.variant == "perfect"

    def kp_l(self, L_nm: float) -> float:
        """Plasma wavevector scaled by a gap of ``L_nm`` nanometers."""
        if self.is_perfect:
            raise ValueError("perfect variant has no plasma scale")
        return 2.0 * math.pi * L_nm / self.lambda_p_nm


@dataclass(frozen=True)
class ModePoint:
    """One imaginary-frequency / transverse-wavevector sample.

    u is the scaled imaginary frequency, tau the scaled transverse wavevector
    magnitude and phi the azimuth of the wavevector in the transverse plane.
    """

    u: float
    tau: float
    phi: float = 0.0

    def __post_init__(self):
        if self.u < 0.0 or self.tau < 0.0:
            raise ValueError(f"need u >= 0 and tau >= 0, got u={self.u}, tau={self.tau}")

    @property
    def gamma(self) -> float:
        return math.hypot(self.tau, self.u)


def epsilon_imag(u: float, kp_l: float) -> float:
    """Plasma permittivity 1 + (kp_l / u)^2 on the imaginary frequency axis."""
    if u == 0.0:
        raise ZeroFrequencyError(
            "permittivity diverges at u = 0; use the static-limit amplitudes"
        )
    return 1.0 + (kp_l / u) ** 2


def _require_kp(model: MirrorModel, kp_l: float | None) -> float:
    if model.is_perfect:
        return 0.0
    if kp_l is None:
        raise ValueError(
            "plasma variant needs kp_l = 2 pi L / lambda_P; pick a gap L first"
        )
    if not kp_l > 0.0:
        raise ValueError(f"need kp_l > 0, got {kp_l}")
    return kp_l


@dataclass(frozen=True)
class KernelInputs:
    """Per-mode shorthand factors entering the corrugation kernel."""

    kappa: float
    kappa_t: float
    beta: float
    beta_t: float
    mu_plus: float
    mu_minus: float
    h_te: float
    h_tm: float

    @classmethod
    def evaluate(cls, tau: float, u: float, kp_l: float) -> "KernelInputs":
        gam = math.hypot(tau, u)
        if gam <= 0.0:
            raise ValueError("mode at gamma = 0 is outside the kernel domain")
        gt = math.hypot(gam, kp_l)
        s = gam + gt
        tau2 = tau * tau
        lam2 = kp_l * kp_l
        den = gam * lam2 + u * u * s

        r_te = -lam2 / (s * s)
        r_tm = lam2 * (tau2 + gam * gt) / (s * den)
        e1 = math.exp(-gam)
        e2 = e1 * e1
        em2 = -math.expm1(-2.0 * gam)
        one_m_rte2 = (2.0 * gam / s) * ((s * s + lam2) / (s * s))
        one_m_rtm2 = (u * u * (lam2 + s * s) / (s * den)) * (1.0 + r_tm)
        h_te = r_te * e1 / (em2 + one_m_rte2 * e2)
        h_tm = r_tm * e1 / (em2 + one_m_rtm2 * e2)
        return cls(
            kappa=gam,
            kappa_t=gt,
            beta=tau / gam,
            beta_t=tau / gt,
            mu_plus=s * gam * gt / (gam * gt + tau2),
            mu_minus=-lam2 * gam * gt / den,
            h_te=h_te,
            h_tm=h_tm,
        )


def fresnel(pol: Polarization, tau, u, model: MirrorModel, kp_l: float | None = None):
    """Specular reflection amplitude of one mirror at a mode (tau, u).

    Accepts scalars or broadcastable arrays.  Perfect mirrors return -1 for
    TE and +1 for TM; the plasma variant needs the scaled plasma wavevector
    ``kp_l``.  On the imaginary axis r_TE <= 0 <= r_TM and |r| <= 1.
    """
    tau = np.asarray(tau, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(tau < 0.0) or np.any(u < 0.0):
        raise ValueError("need tau >= 0 and u >= 0")
    if np.any((tau == 0.0) & (u == 0.0)):
        raise ValueError("mode (tau, u) = (0, 0) is outside the domain")
    if model.is_perfect:
        out = np.where(pol is Polarization.TE, -1.0, 1.0) * np.ones(np.broadcast(tau, u).shape)
        return out if out.ndim else float(out)
    lam = _require_kp(model, kp_l)
    gam = np.hypot(tau, u)
    gt = np.hypot(gam, lam)
    s = gam + gt
    if pol is Polarization.TE:
        out = -(lam * lam) / (s * s)
    else:
        out = lam * lam * (tau * tau + gam * gt) / (s * (gam * lam * lam + u * u * s))
    return out if out.ndim else float(out)


def roundtrip_h(pol: Polarization, tau, u, model: MirrorModel, kp_l: float | None = None):
    """Round-trip factor h_p = r_p e^{-gamma} / (1 - r_p^2 e^{-2 gamma})."""
    tau = np.asarray(tau, dtype=float)
    u = np.asarray(u, dtype=float)
    gam = np.hypot(tau, u)
    if np.any(gam <= 0.0):
        raise ValueError("round-trip factor needs gamma > 0")
    r = np.asarray(fresnel(pol, tau, u, model, kp_l))
    e1 = np.exp(-gam)
    den = -np.expm1(-2.0 * gam) + (1.0 - r * r) * e1 * e1
    out = r * e1 / den
    return out if out.ndim else float(out)


def _mode_inputs(mode: ModePoint, u: float, model: MirrorModel, kp_l: float | None):
    if model.is_perfect:
        gam = math.hypot(mode.tau, u)
        if gam <= 0.0:
            raise ValueError("mode at gamma = 0 is outside the kernel domain")
        return gam
    return KernelInputs.evaluate(mode.tau, u, _require_kp(model, kp_l))


def _branch_sums(tau: float, u: float, kp_l: float) -> tuple[float, float]:
    """Closed forms of sum_e mu_e and sum_e e mu_e for one mode."""
    gam = math.hypot(tau, u)
    gt = math.hypot(gam, kp_l)
    u2l2 = u * u + kp_l * kp_l
    q = u * u * (tau * tau) + u2l2 * (gam * gam)
    return 2.0 * u * u * gam * (gt * gt) / q, 2.0 * u2l2 * (gam * gam) * gt / q


def cross_kernel_b(
    mode1: ModePoint,
    mode2: ModePoint,
    u: float | None = None,
    model: MirrorModel = MirrorModel.perfect(),
    kp_l: float | None = None,
) -> float:
    """Second-order nonspecular cross kernel coupling two transverse modes.

    Scattering preserves the frequency, so a single ``u`` applies to both
    modes; when ``u`` is omitted the modes must agree on theirs.  The value
    is the kernel scaled by L^2.  At coincident modes it collapses to the
    specular combination 4 gamma^2 (h_TE^2 + h_TM^2).
    """
    if u is None:
        if mode1.u != mode2.u:
            raise ValueError(
                f"modes carry different frequencies ({mode1.u} vs {mode2.u}); "
                "pass u explicitly"
            )
        u = mode1.u
    c = math.cos(mode2.phi - mode1.phi)
    c = min(1.0, max(-1.0, c))
    s2 = max(0.0, 1.0 - c * c)

    # groupings below pair factors of the two modes so that swapping the
    # modes only commutes individual IEEE operations, keeping the kernel
    # bit-identical under the exchange
    if model.is_perfect:
        g1 = _mode_inputs(mode1, u, model, kp_l)
        g2 = _mode_inputs(mode2, u, model, kp_l)
        dsq = mode1.tau**2 + mode2.tau**2 - 2.0 * (mode1.tau * mode2.tau) * c
        q1 = math.exp(-g1) / (-math.expm1(-2.0 * g1))
        q2 = math.exp(-g2) / (-math.expm1(-2.0 * g2))
        poly = 0.25 * (g1 * g1 + g2 * g2 - dsq) ** 2 + (g1 * g1) * (g2 * g2)
        return 4.0 * (q1 * q2) * poly / (g1 * g2)

    # branch weights summed per mode before assembly: mu_plus and mu_minus
    # individually grow like kp_l, so the literal double sum over branches
    # loses (kp_l/gamma)^2 epsilon of relative accuracy; the closed sums
    #   sum_e mu_e (1 + e beta beta_t) = 2 gamma
    #   sum_e mu_e                     = 2 u^2 gamma gamma_t^2 / q
    #   sum_e e mu_e                   = 2 (u^2 + kp_l^2) gamma^2 gamma_t / q
    # with q = u^2 tau^2 + (u^2 + kp_l^2) gamma^2 are cancellation-free
    lam = _require_kp(model, kp_l)
    m1 = KernelInputs.evaluate(mode1.tau, u, lam)
    m2 = KernelInputs.evaluate(mode2.tau, u, lam)
    sb1, sd1 = _branch_sums(mode1.tau, u, lam)
    sb2, sd2 = _branch_sums(mode2.tau, u, lam)

    te_te = ((m1.h_te * m2.h_te) * (c * c)) * (4.0 * (m1.kappa * m2.kappa))
    te_tm = ((m1.h_te * m2.h_tm) * s2) * (2.0 * (m1.kappa * sb2))
    tm_te = ((m1.h_tm * m2.h_te) * s2) * (2.0 * (m2.kappa * sb1))
    t1 = c * sb1 + (m1.beta * m2.beta_t) * sd1
    t2 = c * sb2 + (m2.beta * m1.beta_t) * sd2
    tm_tm = (m1.h_tm * m2.h_tm) * (t1 * t2)
    return (te_te + tm_tm) - (te_tm + tm_te)
