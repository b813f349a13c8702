"""Lateral Casimir force between corrugated metal mirrors beyond the
proximity force approximation.

The package computes the second-order lateral-force coefficient for
sinusoidally corrugated plane-plane and plane-sphere geometries, for plasma
metals and perfect reflectors, and quantifies how far the proximity force
approximation drifts from the full scattering result.
"""

from .mirror_optics import (
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
from .perfect_limits import (
    AsymptoticFit,
    alpha,
    fit_beta,
    rho_perfect,
    rho_perfect_asymptote,
)
from .plane_plane import (
    HBAR_C,
    Corrugation,
    LengthScales,
    ResponseValue,
    d2E_pp_dL2,
    energy_pp_per_area,
    find_pp_peak,
    force_pp_per_area,
    gamma_pp_per_area,
    lateral_force_pp,
    response_g,
    rho_pp,
)
from .plane_sphere import (
    OffsetCurves,
    PowerLawFit,
    PsResult,
    SphereSetup,
    clear_response_cache,
    find_ps_peak,
    gamma_ps,
    offset_analysis,
    powerlaw_fit_ps,
    rho_ps,
)
from .quadrature import (
    DependentAxis,
    FiniteAxis,
    IntegrandError,
    QuadResult,
    QuadSpec,
    SemiInfiniteAxis,
    integrate_finite,
    integrate_nested,
    integrate_semi_infinite,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticFit",
    "Corrugation",
    "DependentAxis",
    "FiniteAxis",
    "HBAR_C",
    "IntegrandError",
    "KernelInputs",
    "LengthScales",
    "MirrorModel",
    "ModePoint",
    "OffsetCurves",
    "Polarization",
    "PowerLawFit",
    "PsResult",
    "QuadResult",
    "QuadSpec",
    "ResponseValue",
    "SemiInfiniteAxis",
    "SphereSetup",
    "ZeroFrequencyError",
    "alpha",
    "clear_response_cache",
    "cross_kernel_b",
    "d2E_pp_dL2",
    "energy_pp_per_area",
    "epsilon_imag",
    "find_pp_peak",
    "find_ps_peak",
    "fit_beta",
    "force_pp_per_area",
    "fresnel",
    "gamma_pp_per_area",
    "gamma_ps",
    "integrate_finite",
    "integrate_nested",
    "integrate_semi_infinite",
    "lateral_force_pp",
    "offset_analysis",
    "powerlaw_fit_ps",
    "response_g",
    "rho_perfect",
    "rho_perfect_asymptote",
    "rho_pp",
    "rho_ps",
    "__version__",
]
