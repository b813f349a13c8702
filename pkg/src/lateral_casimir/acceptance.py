"""Built-in validation suite: headline numbers, identities and scaling laws.

Each criterion owns its frozen target values and tolerances and reports one
pass/fail line with the measured numbers, so a report is self-contained.
``hbar_c`` can be overridden to verify that the suite actually fails when a
physical constant is corrupted (negative control).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .mirror_optics import MirrorModel, ModePoint, Polarization, cross_kernel_b, roundtrip_h
from .perfect_limits import fit_beta, rho_perfect, rho_perfect_asymptote
from .plane_plane import (
    HBAR_C,
    RESPONSE_SPEC,
    d2E_pp_dL2,
    energy_pp_per_area,
    f_hat,
    find_pp_peak,
    force_pp_per_area,
    response_g,
    rho_pp,
)
from .plane_sphere import (
    SphereSetup,
    clear_response_cache,
    find_ps_peak,
    gamma_ps,
    offset_analysis,
    powerlaw_fit_ps,
    rho_ps,
)
from .quadrature import QuadSpec
from .search import loglog_slope

__all__ = ["CriterionResult", "run_criterion", "run_all", "format_report", "CRITERIA"]

_PI = math.pi

# experimental parameter set: gold-coated plates at the measured geometry
EXP_L_NM = 220.0
EXP_LAMBDA_C_NM = 1200.0
EXP_LAMBDA_P_NM = 137.0
EXP_K = 2.0 * _PI * EXP_L_NM / EXP_LAMBDA_C_NM  # 1.15192 (from the lengths)
EXP_LAM = 2.0 * _PI * EXP_L_NM / EXP_LAMBDA_P_NM  # 10.0898

_GOLD = MirrorModel.plasma(EXP_LAMBDA_P_NM)
_PERFECT = MirrorModel.perfect()


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    lines: list[str]
    seconds: float

    def report(self, with_time: bool = True) -> str:
        head = f"{'PASS' if self.passed else 'FAIL'}  {self.index:>2}. {self.name}"
        if with_time:
            head += f"  [{self.seconds:.1f} s]"
        return "\n".join([head] + [f"        {ln}" for ln in self.lines])


def _check(lines: list[str], label: str, value: float, target: float,
           tol: float) -> bool:
    ok = abs(value - target) <= tol
    lines.append(
        f"{label}: computed {value:.6g}, target {target:.6g} +/- {tol:.2g}"
        f" -> {'ok' if ok else 'MISS'}"
    )
    return ok


def _c1_rho_plasma_headline(hbar_c: float):
    lines = []
    r = rho_pp(EXP_K, EXP_LAM, _GOLD)
    ok = _check(lines, "rho_pp(gold, L=220nm, lambda_C=1.2um)", r.value, 0.814, 0.005)
    return ok and r.converged, lines


def _c2_rho_perfect_headline(hbar_c: float):
    lines = []
    r = rho_perfect(EXP_K)
    ok = _check(lines, "rho_perfect(kC_L=1.15192)", r.value, 0.819, 0.005)
    return ok and r.converged, lines


def _c3_rho_plasma_55nm(hbar_c: float):
    lines = []
    lam = 2.0 * _PI * 55.0 / EXP_LAMBDA_P_NM  # 2.5224
    r = rho_pp(EXP_K, lam, _GOLD)
    ok = _check(lines, "rho_pp(gold, L=55nm, lambda_C=300nm)", r.value, 0.838, 0.005)
    return ok and r.converged, lines


def _c4_proximity_force_theorem(hbar_c: float):
    # the specular limit of the response must equal the curvature of the
    # plate energy; checked against both the analytic derivative of the
    # plate integrand and a second finite difference of the energy itself
    lines = []
    spec = QuadSpec(rel_tol=1e-6)
    fd_spec = QuadSpec(rel_tol=1e-10)
    ok = True
    for label, model, kp_l, L_nm in (
        ("plasma kP_L=1", _GOLD, 1.0, EXP_LAMBDA_P_NM / (2.0 * _PI)),
        ("plasma kP_L=10", _GOLD, 10.0, 10.0 * EXP_LAMBDA_P_NM / (2.0 * _PI)),
        ("perfect", _PERFECT, None, EXP_L_NM),
    ):
        g0 = response_g(0.0, kp_l, model, spec)
        curv = d2E_pp_dL2(L_nm, model, spec, hbar_c)
        rel = abs(g0.g_hat - curv.dimensionless) / curv.dimensionless
        h = 2e-3 * L_nm * 1e-9
        es = [
            energy_pp_per_area(L_nm * (1.0 + s * 2e-3), model, fd_spec, hbar_c).per_area
            for s in (-1.0, 0.0, 1.0)
        ]
        fd = (es[0] - 2.0 * es[1] + es[2]) / h**2  # J/m^4, negative
        g0_si = -hbar_c * g0.g_hat / (L_nm * 1e-9) ** 5
        rel_fd = abs(g0_si - fd) / abs(fd)
        good = rel < 1e-3 and rel_fd < 1e-3 and g0.converged and curv.quad.converged
        lines.append(
            f"{label}: mismatch {rel:.3g} (analytic), {rel_fd:.3g} "
            f"(finite-difference oracle) -> {'ok' if good else 'MISS'} (< 1e-3)"
        )
        ok = ok and good
    return ok, lines


def _c5_specular_collapse(hbar_c: float):
    lines = []
    rng = np.random.default_rng(20250811)
    worst = 0.0
    for i in range(100):
        tau = float(10.0 ** rng.uniform(-2.0, 1.2))
        u = float(10.0 ** rng.uniform(-2.0, 1.2))
        kp_l = 2.5224 if i % 2 else EXP_LAM
        mode = ModePoint(u=u, tau=tau, phi=float(rng.uniform(0.0, 2.0 * _PI)))
        b = cross_kernel_b(mode, mode, u, _GOLD, kp_l)
        gam = mode.gamma
        hte = roundtrip_h(Polarization.TE, tau, u, _GOLD, kp_l)
        htm = roundtrip_h(Polarization.TM, tau, u, _GOLD, kp_l)
        ref = 4.0 * gam * gam * (hte * hte + htm * htm)
        worst = max(worst, abs(b - ref) / abs(ref))
    ok = worst <= 1e-10
    lines.append(f"coincident-mode collapse over 100 modes: worst relative "
                 f"deviation {worst:.3g} -> {'ok' if ok else 'MISS'} (<= 1e-10)")
    return ok, lines


def _c6_asymptote_agreement(hbar_c: float):
    lines = []
    ok = True
    for k in (8.0, 10.0, 12.0, 15.0):
        r = rho_perfect(k)
        a = rho_perfect_asymptote(k)
        rel = abs(r.value - a) / r.value
        good = rel <= 0.01 and r.converged
        lines.append(f"kC_L={k:g}: rho {r.value:.6g} vs asymptote {a:.6g}, "
                     f"relative {rel:.3%} -> {'ok' if good else 'MISS'} (<= 1%)")
        ok = ok and good
    return ok, lines


def _c7_perfect_limit_monotone(hbar_c: float):
    lines = []
    rp = rho_perfect(1.0).value
    diffs = []
    for lam in (1.0, 2.5, 5.0, 10.0, 100.0):
        r = rho_pp(1.0, lam, _GOLD)
        diffs.append(abs(r.value - rp))
        lines.append(f"kP_L={lam:g}: |rho_plasma - rho_perfect| = {diffs[-1]:.6f}")
    ok = all(b < a for a, b in zip(diffs, diffs[1:]))
    lines.append(
        f"strictly decreasing -> {'ok' if ok else 'MISS'} "
        f"(the plasma ratio crosses the perfect-mirror value near kP_L ~ 5 "
        f"and approaches it from below, so the absolute difference dips and "
        f"rebounds; rho_perfect(1) = {rp:.6f})"
    )
    return ok, lines


def _c8_plane_sphere_headline(hbar_c: float):
    lines = []
    probe = SphereSetup(100.0, EXP_L_NM, EXP_LAMBDA_C_NM, EXP_LAMBDA_P_NM)
    r0 = gamma_ps(probe, _GOLD, hbar_c=hbar_c)
    r_um = 100.0 * 585.0 / r0.gamma_ps_pfa
    setup = SphereSetup(r_um, EXP_L_NM, EXP_LAMBDA_C_NM, EXP_LAMBDA_P_NM)
    r = gamma_ps(setup, _GOLD, hbar_c=hbar_c)
    lines.append(f"radius pinned by Gamma_PS_PFA = 585 pN/um^2: R = {r_um:.1f} um")
    ok = _check(lines, "Gamma_PS", r.gamma_ps, 421.0, 6.0)
    ok = _check(lines, "rho_PS", r.rho_ps, 0.72, 0.01) and ok
    alt = rho_ps(setup, _GOLD)
    rel = abs(alt.value - r.rho_ps) / r.rho_ps
    good = rel < 1e-3
    lines.append(f"force-weighted rho_PS route agrees to {rel:.2g} -> "
                 f"{'ok' if good else 'MISS'}")
    return ok and good and r.converged, lines


def _c9_peak_positions(hbar_c: float):
    lines = []
    ps = find_ps_peak(EXP_L_NM, EXP_LAMBDA_P_NM, 100.0, _GOLD)
    pp = find_pp_peak(EXP_L_NM, EXP_LAMBDA_P_NM, _GOLD)
    ok = _check(lines, "plane-sphere peak kC_L", ps.x, 2.08, 0.05)
    ok = _check(lines, "plane-plane peak kC_L", pp.x, 2.6, 0.05) and ok
    good = ps.x < pp.x
    lines.append(f"PS peak below PP peak -> {'ok' if good else 'MISS'}")
    return ok and good, lines


def _c10_power_law(hbar_c: float):
    lines = []
    fit = powerlaw_fit_ps((200.0, 300.0), EXP_LAMBDA_C_NM, EXP_LAMBDA_P_NM,
                          100.0, _GOLD, n_points=9)
    ok = _check(lines, "d ln Gamma_PS / d ln L over [200, 300] nm",
                fit.exponent, -4.1, 0.15)

    # proximity-force counterpart must sit between the two pure power laws
    k_c = 2.0 * _PI / (EXP_LAMBDA_C_NM * 1e-9)
    pfa = []
    for L in fit.L_values:
        fh = f_hat(2.0 * _PI * L / EXP_LAMBDA_P_NM, _GOLD)
        pfa.append(_PI * k_c * 100.0 * 1e-6 * hbar_c * fh.value / (L * 1e-9) ** 4)
    slope_pfa = loglog_slope(fit.L_values, pfa)
    good = -4.0 < slope_pfa < -3.0
    lines.append(f"PFA-only slope {slope_pfa:.3f} in (-4, -3) -> "
                 f"{'ok' if good else 'MISS'}")
    ok = ok and good

    # far beyond the corrugation wavelength the fall-off is exponential
    far = powerlaw_fit_ps((2000.0, 2600.0), EXP_LAMBDA_C_NM, EXP_LAMBDA_P_NM,
                          100.0, _GOLD, n_points=8)
    good = far.exponent < -6.0
    lines.append(f"local slope at L ~ 2 lambda_C: {far.exponent:.2f} < -6 -> "
                 f"{'ok' if good else 'MISS'}")
    return ok and good, lines


def _c11_normal_force_regimes(hbar_c: float):
    lines = []
    ok = True
    h = 0.01
    for L_nm, target in ((EXP_LAMBDA_P_NM / 100.0, -3.0), (100.0 * EXP_LAMBDA_P_NM, -4.0)):
        f1 = force_pp_per_area(L_nm * (1.0 - h), _GOLD, hbar_c=hbar_c)
        f2 = force_pp_per_area(L_nm * (1.0 + h), _GOLD, hbar_c=hbar_c)
        slope = math.log(f2.per_area / f1.per_area) / math.log((1.0 + h) / (1.0 - h))
        ok = _check(lines, f"d ln F / d ln L at L = {L_nm:g} nm", slope, target, 0.1) and ok

    L = EXP_L_NM * 1e-9
    e = energy_pp_per_area(EXP_L_NM, _PERFECT, hbar_c=hbar_c)
    f = force_pp_per_area(EXP_L_NM, _PERFECT, hbar_c=hbar_c)
    e_ref = -_PI**2 * 3.16153e-26 / (720.0 * L**3)
    f_ref = _PI**2 * 3.16153e-26 / (240.0 * L**4)
    rel_e = abs(e.per_area - e_ref) / abs(e_ref)
    rel_f = abs(f.per_area - f_ref) / f_ref
    good = rel_e < 1e-4 and rel_f < 1e-4
    lines.append(f"perfect-mirror closed forms: energy off by {rel_e:.2g}, "
                 f"force off by {rel_f:.2g} -> {'ok' if good else 'MISS'} (< 1e-4)")
    return ok and good, lines


_RUGGED_WINDOW = (12.0, 20.0)  # inside the admissible region K >= max(8, 2 kP_L)


def _c12_rugged_asymptotics(hbar_c: float):
    lines = []
    fit = fit_beta(1.0, _GOLD, _RUGGED_WINDOW, n_points=5)
    ok = fit.residual < 0.10
    lines.append(
        f"compensated rho e^K K^(-7/2) over K in {_RUGGED_WINDOW}: beta = "
        f"{fit.beta_coeff:.4g}, residual {fit.residual:.3%} -> "
        f"{'ok' if ok else 'MISS'} (< 10%)"
    )
    ks = np.array(fit.kc_l_values)
    rhos = np.array(fit.compensated) * np.exp(-ks) * ks**3.5
    perf = np.array([rho_perfect(float(k)).value for k in ks])
    slope = loglog_slope(ks, rhos / perf)
    good = -0.6 <= slope <= -0.4
    lines.append(f"log-log slope of rho_plasma/rho_perfect: {slope:.4f} -> "
                 f"{'ok' if good else 'MISS'} (-0.5 +/- 0.1)")
    return ok and good, lines


def _c13_offset_confusion(hbar_c: float):
    lines = []
    oc = offset_analysis((220.0, 260.0), 20.0, EXP_LAMBDA_C_NM, EXP_LAMBDA_P_NM,
                         100.0, _GOLD)
    shrink = oc.max_gap_offset < oc.max_gap_plain
    under = oc.max_gap_offset < 0.10
    lines.append(f"max relative gap to PFA: no offset {oc.max_gap_plain:.3f}, "
                 f"20 nm offset {oc.max_gap_offset:.3f}")
    lines.append(f"offset shrinks the gap -> {'ok' if shrink else 'MISS'}; "
                 f"offset gap < 10% pointwise -> {'ok' if under else 'MISS'}")
    return shrink and under, lines


def _c14_determinism(hbar_c: float):
    lines = []
    clear_response_cache()
    a = rho_perfect(EXP_K)
    b = rho_perfect(EXP_K)
    bit_identical = (a.value == b.value) and (a.err_est == b.err_est) and (
        a.evals == b.evals
    )
    lines.append(f"rerun of rho_perfect bit-identical -> "
                 f"{'ok' if bit_identical else 'MISS'}")

    g1 = response_g(EXP_K, EXP_LAM, _GOLD, RESPONSE_SPEC)
    g2 = response_g(EXP_K, EXP_LAM, _GOLD, RESPONSE_SPEC)
    bit2 = g1.g_hat == g2.g_hat and g1.evals == g2.evals
    lines.append(f"rerun of response_g bit-identical -> {'ok' if bit2 else 'MISS'}")

    ok_mono = True
    for label, loose, tight in (
        ("rho_perfect", rho_perfect(EXP_K, QuadSpec(rel_tol=1e-6)),
         rho_perfect(EXP_K, QuadSpec(rel_tol=5e-7))),
        ("rho_pp", rho_pp(EXP_K, EXP_LAM, _GOLD, RESPONSE_SPEC),
         rho_pp(EXP_K, EXP_LAM, _GOLD, RESPONSE_SPEC.with_rel_tol(5e-6))),
    ):
        moved = abs(tight.value - loose.value)
        good = moved <= max(loose.err_est, 1e-15)
        lines.append(f"halving rel_tol moves {label} by {moved:.3g} <= "
                     f"err_est {loose.err_est:.3g} -> {'ok' if good else 'MISS'}")
        ok_mono = ok_mono and good
    return bit_identical and bit2 and ok_mono, lines


CRITERIA = (
    ("rho plasma headline (gold, experimental geometry)", _c1_rho_plasma_headline),
    ("rho perfect headline", _c2_rho_perfect_headline),
    ("rho plasma at kP_L = 2.52", _c3_rho_plasma_55nm),
    ("proximity force theorem", _c4_proximity_force_theorem),
    ("specular kernel collapse", _c5_specular_collapse),
    ("perfect-mirror asymptote agreement", _c6_asymptote_agreement),
    ("perfect-limit convergence monotonicity", _c7_perfect_limit_monotone),
    ("plane-sphere headline coefficients", _c8_plane_sphere_headline),
    ("lateral-coefficient peak positions", _c9_peak_positions),
    ("plane-sphere power-law fit", _c10_power_law),
    ("normal-force regimes and closed forms", _c11_normal_force_regimes),
    ("rugged-corrugation asymptotics", _c12_rugged_asymptotics),
    ("distance-offset confusion", _c13_offset_confusion),
    ("determinism and tolerance monotonicity", _c14_determinism),
)


def run_criterion(index: int, hbar_c: float = HBAR_C) -> CriterionResult:
    """Run one criterion (1-based index)."""
    name, fn = CRITERIA[index - 1]
    t0 = time.perf_counter()
    passed, lines = fn(hbar_c)
    return CriterionResult(index, name, passed, lines, time.perf_counter() - t0)


def run_all(indices=None, hbar_c: float = HBAR_C) -> list[CriterionResult]:
    if indices is None:
        indices = range(1, len(CRITERIA) + 1)
    return [run_criterion(i, hbar_c) for i in indices]


def format_report(results: list[CriterionResult], with_time: bool = True) -> str:
    lines = [r.report(with_time) for r in results]
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} criteria passed")
    return "\n".join(lines)
