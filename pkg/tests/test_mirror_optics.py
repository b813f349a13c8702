import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lateral_casimir import _kernels
from lateral_casimir.mirror_optics import (
    KernelInputs,
    MirrorModel,
    ModePoint,
    Polarization,
    ZeroFrequencyError,
    cross_kernel_b,
    epsilon_imag,
    fresnel,
    roundtrip_h,
)

GOLD = MirrorModel.plasma(137.0)
PERFECT = MirrorModel.perfect()

positive = st.floats(min_value=1e-3, max_value=30.0)


def test_model_validation():
    with pytest.raises(ValueError):
        MirrorModel("plasma")
    with pytest.raises(ValueError):
        MirrorModel.plasma(-3.0)
    with pytest.raises(ValueError):
        MirrorModel("perfect", 137.0)
    assert GOLD.kp_l(137.0) == pytest.approx(2.0 * math.pi)
    with pytest.raises(ValueError):
        PERFECT.kp_l(100.0)


def test_epsilon_imag_values():
    assert epsilon_imag(3.7, 3.7) == pytest.approx(2.0, rel=1e-15)
    assert epsilon_imag(1e9, 1.0) == pytest.approx(1.0, rel=1e-12)
    assert epsilon_imag(1.85, 3.7) == pytest.approx(5.0, rel=1e-15)
    with pytest.raises(ZeroFrequencyError):
        epsilon_imag(0.0, 3.7)


def test_fresnel_perfect():
    assert fresnel(Polarization.TE, 1.3, 0.7, PERFECT) == -1.0
    assert fresnel(Polarization.TM, 1.3, 0.7, PERFECT) == 1.0


def test_fresnel_closed_form_equal_scales():
    # tau = u = kp_l: gamma = sqrt(2) kp, gamma_t = sqrt(3) kp, eps = 2
    s2, s3 = math.sqrt(2.0), math.sqrt(3.0)
    lam = 4.2
    r_te = fresnel(Polarization.TE, lam, lam, GOLD, kp_l=lam)
    r_tm = fresnel(Polarization.TM, lam, lam, GOLD, kp_l=lam)
    assert r_te == pytest.approx((s2 - s3) / (s2 + s3), rel=1e-12)
    assert r_tm == pytest.approx((2.0 * s2 - s3) / (2.0 * s2 + s3), rel=1e-12)
    assert r_te == pytest.approx(-0.10102051443364374, rel=1e-12)
    assert r_tm == pytest.approx(0.2404082057734576, rel=1e-12)


def test_fresnel_perfect_limit():
    for pol, target in ((Polarization.TE, -1.0), (Polarization.TM, 1.0)):
        r = fresnel(pol, 1.3, 0.7, GOLD, kp_l=1e8)
        assert r == pytest.approx(target, abs=1e-6)


def test_fresnel_static_limit():
    # u = 0: TM reaches its static value 1, TE stays partial
    tau, lam = 1.3, 3.7
    gt = math.hypot(tau, lam)
    assert fresnel(Polarization.TM, tau, 0.0, GOLD, kp_l=lam) == pytest.approx(1.0)
    assert fresnel(Polarization.TE, tau, 0.0, GOLD, kp_l=lam) == pytest.approx(
        (tau - gt) / (tau + gt), rel=1e-12
    )


@settings(max_examples=60, deadline=None)
@given(tau=positive, u=positive, lam=st.floats(min_value=0.05, max_value=1e4))
def test_fresnel_bounds(tau, u, lam):
    r_te = fresnel(Polarization.TE, tau, u, GOLD, kp_l=lam)
    r_tm = fresnel(Polarization.TM, tau, u, GOLD, kp_l=lam)
    assert -1.0 < r_te <= 0.0
    assert 0.0 <= r_tm < 1.0


def test_fresnel_domain_errors():
    with pytest.raises(ValueError):
        fresnel(Polarization.TE, 0.0, 0.0, PERFECT)
    with pytest.raises(ValueError):
        fresnel(Polarization.TE, 1.0, 1.0, GOLD)  # kp_l missing


def test_roundtrip_perfect_closed_form():
    val = math.exp(-1.0) / (1.0 - math.exp(-2.0))  # 0.4254590641196608
    h_tm = roundtrip_h(Polarization.TM, 0.6, 0.8, PERFECT)
    h_te = roundtrip_h(Polarization.TE, 0.6, 0.8, PERFECT)
    assert h_tm == pytest.approx(val, rel=1e-14)
    assert h_te == pytest.approx(-val, rel=1e-14)


def test_roundtrip_plasma_reaches_perfect():
    h_tm = roundtrip_h(Polarization.TM, 0.6, 0.8, GOLD, kp_l=1e8)
    assert h_tm == pytest.approx(0.4254590641196608, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(tau=positive, u=positive, lam=st.floats(min_value=0.05, max_value=100.0))
def test_roundtrip_bounds(tau, u, lam):
    gam = math.hypot(tau, u)
    cap = math.exp(-gam) / (1.0 - math.exp(-2.0 * gam))
    for pol, sign in ((Polarization.TE, -1.0), (Polarization.TM, 1.0)):
        h = roundtrip_h(pol, tau, u, GOLD, kp_l=lam)
        assert math.copysign(1.0, h) == sign or h == 0.0
        assert abs(h) < cap


def test_roundtrip_domain_error():
    with pytest.raises(ValueError):
        roundtrip_h(Polarization.TE, 0.0, 0.0, PERFECT)


def test_kernel_inputs_invariants():
    ki = KernelInputs.evaluate(1.3, 0.7, 3.7)
    assert 0.0 <= ki.beta <= 1.0
    assert 0.0 <= ki.beta_t < ki.beta
    assert ki.kappa_t > ki.kappa
    assert ki.h_te < 0.0 < ki.h_tm
    with pytest.raises(ValueError):
        KernelInputs.evaluate(0.0, 0.0, 3.7)


@settings(max_examples=50, deadline=None)
@given(tau=positive, u=positive, lam=st.floats(min_value=0.1, max_value=50.0),
       phi=st.floats(min_value=0.0, max_value=2.0 * math.pi))
def test_specular_collapse(tau, u, lam, phi):
    mode = ModePoint(u=u, tau=tau, phi=phi)
    b = cross_kernel_b(mode, mode, u, GOLD, kp_l=lam)
    gam = mode.gamma
    h_te = roundtrip_h(Polarization.TE, tau, u, GOLD, kp_l=lam)
    h_tm = roundtrip_h(Polarization.TM, tau, u, GOLD, kp_l=lam)
    ref = 4.0 * gam * gam * (h_te * h_te + h_tm * h_tm)
    assert b == pytest.approx(ref, rel=1e-10)


def test_swap_symmetry_bitwise():
    m1 = ModePoint(u=0.7, tau=1.3, phi=0.4)
    m2 = ModePoint(u=0.7, tau=2.1, phi=1.9)
    for model, kp in ((GOLD, 3.7), (PERFECT, None)):
        assert cross_kernel_b(m1, m2, 0.7, model, kp) == cross_kernel_b(
            m2, m1, 0.7, model, kp
        )


def test_angle_sign_symmetry():
    m1 = ModePoint(u=0.5, tau=1.0, phi=0.0)
    plus = ModePoint(u=0.5, tau=1.7, phi=0.8)
    minus = ModePoint(u=0.5, tau=1.7, phi=-0.8)
    assert cross_kernel_b(m1, plus, 0.5, GOLD, 3.7) == cross_kernel_b(
        m1, minus, 0.5, GOLD, 3.7
    )


def test_plasma_reaches_perfect_kernel():
    rng = np.random.default_rng(7)
    for _ in range(10):
        u = float(rng.uniform(0.1, 3.0))
        m1 = ModePoint(u=u, tau=float(rng.uniform(0.1, 4.0)), phi=0.0)
        m2 = ModePoint(u=u, tau=float(rng.uniform(0.1, 4.0)),
                       phi=float(rng.uniform(0.0, math.pi)))
        b_plasma = cross_kernel_b(m1, m2, u, GOLD, kp_l=1e8)
        b_perf = cross_kernel_b(m1, m2, u, PERFECT)
        assert b_plasma == pytest.approx(b_perf, rel=1e-5)


def test_compiled_kernel_matches_reference():
    rng = np.random.default_rng(11)
    for _ in range(20):
        u = float(rng.uniform(0.05, 3.0))
        g1 = float(rng.uniform(u + 1e-3, 6.0))
        g2 = float(rng.uniform(u + 1e-3, 6.0))
        lam = float(rng.uniform(0.3, 30.0))
        tau1 = math.sqrt(g1 * g1 - u * u)
        tau2 = math.sqrt(g2 * g2 - u * u)
        phi = float(rng.uniform(0.0, math.pi))
        m1 = ModePoint(u=u, tau=tau1, phi=0.0)
        m2 = ModePoint(u=u, tau=tau2, phi=phi)
        ref = cross_kernel_b(m1, m2, u, GOLD, kp_l=lam)
        fast = _kernels.b_plasma_point(g1, g2, u, math.cos(phi), lam)
        assert fast == pytest.approx(ref, rel=1e-12)


def test_kernel_frequency_mismatch_raises():
    m1 = ModePoint(u=0.5, tau=1.0)
    m2 = ModePoint(u=0.6, tau=1.0)
    with pytest.raises(ValueError):
        cross_kernel_b(m1, m2, model=GOLD, kp_l=3.7)


def test_mode_point_validation():
    with pytest.raises(ValueError):
        ModePoint(u=-0.1, tau=1.0)
    with pytest.raises(ValueError):
        ModePoint(u=0.1, tau=-1.0)
    assert ModePoint(u=3.0, tau=4.0).gamma == pytest.approx(5.0)
