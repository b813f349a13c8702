import math

import numpy as np
import pytest

from lateral_casimir import (
    MirrorModel,
    QuadSpec,
    alpha,
    fit_beta,
    rho_perfect,
    rho_perfect_asymptote,
)

PI = math.pi
GOLD = MirrorModel.plasma(137.0)
PERFECT = MirrorModel.perfect()


def test_rho_perfect_proximity_limit():
    assert rho_perfect(1e-3).value == pytest.approx(1.0, abs=1e-3)


def test_rho_perfect_headline():
    k = 2.0 * PI * 220.0 / 1200.0
    assert rho_perfect(k).value == pytest.approx(0.819, abs=0.005)


def test_rho_perfect_against_dense_trapezoid_oracle():
    # frozen from a 4000 x 1200 trapezoid evaluation of the strip integral
    assert rho_perfect(2.0).value == pytest.approx(0.62052338, rel=5e-7)


def test_rho_perfect_scale_free():
    a = rho_perfect(3.0)
    b = rho_perfect(3.0)
    assert a.value == b.value and a.evals == b.evals


def test_rho_perfect_bounds():
    for k in (0.2, 1.0, 4.0, 9.0):
        v = rho_perfect(k).value
        assert 0.0 < v < 1.0
    with pytest.raises(ValueError):
        rho_perfect(0.0)


def test_asymptote_closed_form_values():
    assert rho_perfect_asymptote(0.0) == pytest.approx(90.0 / PI**4, rel=1e-14)
    v10 = 30.0 / PI**4 * (1e4 / 15.0 + 100.0 + 33.0) * math.exp(-10.0)
    assert rho_perfect_asymptote(10.0) == pytest.approx(v10, rel=1e-14)
    assert rho_perfect_asymptote(10.0) == pytest.approx(0.011181, rel=1e-4)
    assert rho_perfect_asymptote(20.0) == pytest.approx(7.065e-6, rel=1e-3)


@pytest.mark.parametrize("k", [10.0, 12.0, 15.0, 20.0])
def test_asymptote_agrees_at_large_wavenumber(k):
    assert rho_perfect(k).value == pytest.approx(rho_perfect_asymptote(k), rel=0.01)


def test_asymptote_error_at_window_edge():
    # at K = 8 the closed form still misses by slightly more than a percent
    r = rho_perfect(8.0).value
    rel = abs(r - rho_perfect_asymptote(8.0)) / r
    assert 0.01 < rel < 0.015


def test_alpha_limits():
    assert alpha(0.0, model=PERFECT).value == 1.0
    assert alpha(1e-3, model=PERFECT).value == pytest.approx(1.0, abs=2e-3)
    a10 = alpha(10.0, model=PERFECT)
    assert a10.value == pytest.approx(
        rho_perfect_asymptote(10.0) * math.exp(10.0), rel=0.01
    )
    assert a10.value > 2.0 / PI**4 * 1e4  # exceeds the pure quartic term


def test_alpha_plasma_below_perfect_quartic_in_rugged_regime():
    kp = 46.0  # one-micron gap with the gold plasma wavelength
    a = alpha(60.0, kp, GOLD)
    assert a.value < 2.0 / PI**4 * 60.0**4


def test_fit_beta_window_flatness():
    fit = fit_beta(1.0, GOLD, (12.0, 20.0), n_points=5)
    assert fit.beta_coeff > 0.0
    assert fit.residual < 0.10
    assert len(fit.compensated) == 5
    assert fit.exponent == 3.5


def test_fit_beta_perfect_recovers_quartic_prefactor():
    fit = fit_beta(None, PERFECT, (30.0, 46.0), exponent=4.0, n_points=5)
    assert fit.beta_coeff == pytest.approx(2.0 / PI**4, rel=0.02)
    assert fit.residual < 0.02


def test_fit_beta_rejects_window_outside_rugged_regime():
    with pytest.raises(ValueError):
        fit_beta(1.0, GOLD, (5.0, 12.0))
    with pytest.raises(ValueError):
        fit_beta(10.0, GOLD, (12.0, 20.0))  # needs K >= 2 kP_L = 20


def test_fit_beta_aborts_on_non_convergence():
    starved = QuadSpec(rel_tol=1e-9, max_evals=150)
    with pytest.raises(RuntimeError, match="fit aborted"):
        fit_beta(1.0, GOLD, (12.0, 20.0), spec=starved, n_points=3)
