import math

import pytest

from lateral_casimir import (
    HBAR_C,
    Corrugation,
    LengthScales,
    MirrorModel,
    QuadSpec,
    d2E_pp_dL2,
    energy_pp_per_area,
    force_pp_per_area,
    gamma_pp_per_area,
    lateral_force_pp,
    response_g,
    rho_perfect,
    rho_pp,
)

GOLD = MirrorModel.plasma(137.0)
PERFECT = MirrorModel.perfect()
PI = math.pi

EXP = LengthScales(L_nm=220.0, lambda_c_nm=1200.0, lambda_p_nm=137.0)


def test_length_scales():
    assert EXP.kC_L == pytest.approx(2.0 * PI * 220.0 / 1200.0, rel=1e-12)
    assert EXP.kP_L == pytest.approx(2.0 * PI * 220.0 / 137.0, rel=1e-12)
    with pytest.raises(ValueError):
        LengthScales(L_nm=-1.0, lambda_c_nm=1.0, lambda_p_nm=1.0)


def test_corrugation_perturbative_flag():
    mild = Corrugation(a1_nm=5.0, a2_nm=8.0, b_nm=0.0)
    assert not mild.beyond_perturbative(EXP)
    # the measured amplitudes: a1 = 59 nm against lambda_P = 137 nm
    rough = Corrugation(a1_nm=59.0, a2_nm=8.0, b_nm=0.0)
    assert rough.beyond_perturbative(EXP)
    with pytest.raises(ValueError):
        Corrugation(a1_nm=-1.0, a2_nm=0.0)


def test_energy_perfect_closed_form():
    e = energy_pp_per_area(220.0, PERFECT)
    L = 220e-9
    assert e.per_area == pytest.approx(-PI**2 * HBAR_C / (720.0 * L**3), rel=1e-4)
    assert e.per_area < 0.0
    assert e.dimensionless == pytest.approx(PI**2 / 720.0, rel=1e-7)


def test_energy_plasma_limits():
    perfect = energy_pp_per_area(220.0, PERFECT).per_area
    # extreme plasma scale reproduces the ideal mirror
    nearly = energy_pp_per_area(220.0, MirrorModel.plasma(2.0 * PI * 220.0 / 1e4))
    assert nearly.per_area == pytest.approx(perfect, rel=2e-3)
    # gold at the experimental gap binds less than the ideal mirror
    gold = energy_pp_per_area(220.0, GOLD).per_area
    assert 0.4 * abs(perfect) < abs(gold) < abs(perfect)
    assert gold < 0.0


def test_force_perfect_closed_form():
    f = force_pp_per_area(220.0, PERFECT)
    L = 220e-9
    assert f.per_area == pytest.approx(PI**2 * HBAR_C / (240.0 * L**4), rel=1e-4)
    assert f.per_area > 0.0


def test_force_matches_energy_finite_difference():
    spec = QuadSpec(rel_tol=1e-10)
    L, h = 220.0, 220.0 * 1e-4
    e_hi = energy_pp_per_area(L + h, GOLD, spec).per_area
    e_lo = energy_pp_per_area(L - h, GOLD, spec).per_area
    fd = (e_hi - e_lo) / (2.0 * h * 1e-9)  # dE/dL > 0
    f = force_pp_per_area(L, GOLD, spec)
    assert f.per_area == pytest.approx(fd, rel=1e-5)


def test_force_regime_exponents():
    for L_nm, target in ((1.37, -3.0), (13700.0, -4.0)):
        h = 0.01
        f1 = force_pp_per_area(L_nm * (1 - h), GOLD).per_area
        f2 = force_pp_per_area(L_nm * (1 + h), GOLD).per_area
        slope = math.log(f2 / f1) / math.log((1 + h) / (1 - h))
        assert slope == pytest.approx(target, abs=0.1)


def test_curvature_perfect_closed_form():
    c = d2E_pp_dL2(220.0, PERFECT)
    L = 220e-9
    assert c.per_area == pytest.approx(-12.0 * PI**2 * HBAR_C / (720.0 * L**5), rel=1e-4)
    assert c.per_area < 0.0


def test_curvature_matches_second_finite_difference():
    spec = QuadSpec(rel_tol=1e-10)
    L, h = 220.0, 220.0 * 2e-3
    es = [energy_pp_per_area(L + s * h, GOLD, spec).per_area for s in (-1.0, 0.0, 1.0)]
    fd = (es[0] - 2.0 * es[1] + es[2]) / (h * 1e-9) ** 2
    c = d2E_pp_dL2(L, GOLD, spec)
    assert c.per_area == pytest.approx(fd, rel=1e-4)


def test_curvature_equals_specular_response():
    # proximity-force identity at the experimental plasma scale
    c = d2E_pp_dL2(220.0, GOLD)
    g0 = response_g(0.0, EXP.kP_L, GOLD)
    assert g0.g_hat == pytest.approx(c.dimensionless, rel=1e-3)


def test_response_specular_limit_consistency():
    # the dedicated 2D route at K = 0 against the 3D kernel at tiny K
    lam = EXP.kP_L
    g0 = response_g(0.0, lam, GOLD)
    g_small = response_g(1e-3, lam, GOLD)
    assert g_small.g_hat == pytest.approx(g0.g_hat, rel=1e-4)


def test_response_decreases_with_corrugation_wavenumber():
    lam = EXP.kP_L
    vals = [response_g(k, lam, GOLD).g_hat for k in (0.0, 0.5, 1.0, 2.0, 4.0)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert all(v > 0 for v in vals)


def test_response_perfect_limit():
    g_plasma = response_g(1.0, 1e8, GOLD)
    g_perfect = response_g(1.0, model=PERFECT)
    assert g_plasma.g_hat == pytest.approx(g_perfect.g_hat, rel=1e-4)


def test_rho_pp_basics():
    assert rho_pp(0.0, EXP.kP_L, GOLD).value == 1.0
    r = rho_pp(EXP.kC_L, EXP.kP_L, GOLD)
    assert r.converged
    assert r.value == pytest.approx(0.814, abs=0.005)
    r55 = rho_pp(EXP.kC_L, 2.0 * PI * 55.0 / 137.0, GOLD)
    assert r55.value == pytest.approx(0.838, abs=0.005)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0, 5.0])
def test_rho_pp_perfect_route_matches_strip_integral(k):
    # the 3D kernel route and the reduced 2D integral are independent paths
    via_kernel = rho_pp(k, model=PERFECT)
    via_strip = rho_perfect(k)
    assert via_kernel.value == pytest.approx(via_strip.value, rel=1e-3)


def test_gamma_pp_ratio_is_rho():
    g = gamma_pp_per_area(EXP, GOLD)
    r = rho_pp(EXP.kC_L, EXP.kP_L, GOLD)
    assert g.per_area / g.per_area_pfa == pytest.approx(r.value, rel=1e-14)
    assert g.rho == r.value
    assert g.pn_um2_nm2 == pytest.approx(g.per_area * 1e-18, rel=1e-15)


def test_gamma_pp_vanishes_linearly_at_small_wavenumber():
    s1 = LengthScales(220.0, 2.0 * PI * 220.0 / 1e-3, 137.0)
    s2 = LengthScales(220.0, 2.0 * PI * 220.0 / 2e-3, 137.0)
    g1 = gamma_pp_per_area(s1, GOLD)
    g2 = gamma_pp_per_area(s2, GOLD)
    assert g2.per_area / g1.per_area == pytest.approx(2.0, rel=1e-3)


def test_lateral_force_mismatch_dependence():
    corr0 = Corrugation(a1_nm=5.0, a2_nm=8.0, b_nm=0.0)
    assert lateral_force_pp(EXP, corr0, GOLD).per_area == 0.0

    quarter = Corrugation(a1_nm=5.0, a2_nm=8.0, b_nm=300.0)  # lambda_C / 4
    half = Corrugation(a1_nm=5.0, a2_nm=8.0, b_nm=600.0)  # lambda_C / 2
    f_quarter = lateral_force_pp(EXP, quarter, GOLD)
    f_half = lateral_force_pp(EXP, half, GOLD)
    g = gamma_pp_per_area(EXP, GOLD)
    a1a2 = 5.0 * 8.0 * 1e-18
    assert abs(f_quarter.per_area) == pytest.approx(g.per_area * a1a2, rel=1e-12)
    assert abs(f_half.per_area) <= 1e-12 * abs(f_quarter.per_area)
    # restoring: just past alignment the force is negative (pulls b back)
    assert f_quarter.per_area < 0.0
    assert f_quarter.per_area / f_quarter.per_area_pfa == pytest.approx(
        f_quarter.rho, rel=1e-12
    )
    assert f_quarter.perturbative


def test_lateral_force_surfaces_perturbative_advisory():
    rough = Corrugation(a1_nm=59.0, a2_nm=8.0, b_nm=300.0)
    assert not lateral_force_pp(EXP, rough, GOLD).perturbative
