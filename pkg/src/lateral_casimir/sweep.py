"""Parameter sweeps and table emission for the command-line interface.

A sweep evaluates one observable set per grid point, optionally across a
thread pool; rows are assembled by grid index so serial and parallel runs
produce identical tables.  Every table carries a hash of the physics-affecting
configuration fields in its header, so outputs are traceable to their inputs.
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .mirror_optics import MirrorModel
from .perfect_limits import rho_perfect, rho_perfect_asymptote
from .plane_plane import HBAR_C, RESPONSE_SPEC, f_hat, response_g
from .plane_sphere import PS_SPEC, SphereSetup, gamma_ps
from .quadrature import QuadSpec

__all__ = [
    "SweepAxis",
    "RunConfig",
    "UsageError",
    "pp_table",
    "ps_table",
    "figure_table",
    "write_csv",
    "write_json",
]

_PI = math.pi

PP_COLUMNS = ("kc_l", "kp_l", "rho", "g_hat", "alpha",
              "gamma_pn_um2_nm2", "gamma_pfa_pn_um2_nm2", "err_est", "converged")
PS_COLUMNS = ("kc_l", "kp_l", "gamma_ps", "gamma_ps_pfa", "gamma_ps_offset",
              "rho_ps", "err_est", "converged")

PP_UNITS = "kc_l,kp_l,rho,g_hat,alpha:dimensionless gamma:pN/um^2.nm^-2"
PS_UNITS = "kc_l,kp_l,rho_ps:dimensionless gamma:pN/um^2.nm^-2 (xa1a2[nm^2]->pN/um^2)"


class UsageError(ValueError):
    """Invalid configuration or command usage (exit code 1)."""


_SWEEP_AXES = ("kc_l", "l", "lambda_c")


@dataclass(frozen=True)
class SweepAxis:
    name: str
    lo: float
    hi: float
    points: int

    def __post_init__(self):
        if self.name not in _SWEEP_AXES:
            raise UsageError(
                f"unknown sweep axis {self.name!r}; choose from {_SWEEP_AXES}"
            )
        if self.points < 1:
            raise UsageError("sweep needs at least one point")
        if self.points > 1 and not self.hi > self.lo:
            raise UsageError(f"empty sweep range [{self.lo}, {self.hi}]")

    def values(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.points)

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        parts = text.split(":")
        if len(parts) != 4:
            raise UsageError(f"--sweep wants axis:min:max:points, got {text!r}")
        try:
            return cls(parts[0].lower(), float(parts[1]), float(parts[2]), int(parts[3]))
        except ValueError as exc:
            raise UsageError(f"bad --sweep value {text!r}: {exc}") from exc


@dataclass
class RunConfig:
    """Everything a run needs; mirrors the command-line flags."""

    geometry: str = "pp"
    L_nm: float = 220.0
    lambda_c_nm: float = 1200.0
    lambda_p_nm: float = 137.0
    perfect: bool = False
    R_um: float = 100.0
    a1_nm: float = 0.0
    a2_nm: float = 0.0
    b_nm: float = 0.0
    sweep: SweepAxis | None = None
    offset_nm: float = 0.0
    rel_tol: float | None = None
    fmt: str = "csv"
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.geometry not in ("pp", "ps"):
            raise UsageError(f"geometry must be pp or ps, got {self.geometry!r}")
        for name in ("L_nm", "lambda_c_nm", "R_um"):
            if not getattr(self, name) > 0.0:
                raise UsageError(f"{name} must be > 0")
        if not self.perfect and not self.lambda_p_nm > 0.0:
            raise UsageError("lambda_p_nm must be > 0 for the plasma model")
        if self.offset_nm < 0.0:
            raise UsageError("offset must be >= 0")
        if self.rel_tol is not None and not self.rel_tol > 0.0:
            raise UsageError("rel-tol must be > 0")
        if self.fmt not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.fmt!r}")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")

    @property
    def model(self) -> MirrorModel:
        if self.perfect:
            return MirrorModel.perfect()
        return MirrorModel.plasma(self.lambda_p_nm)

    def response_spec(self) -> QuadSpec:
        if self.rel_tol is None:
            return RESPONSE_SPEC
        return RESPONSE_SPEC.with_rel_tol(self.rel_tol)

    def ps_spec(self) -> QuadSpec:
        if self.rel_tol is None:
            return PS_SPEC
        return PS_SPEC.with_rel_tol(self.rel_tol)

    def config_hash(self) -> str:
        """Hash of the physics-affecting fields only (not output or worker
        settings), so identical physics always lands in identical headers."""
        physics = {
            "geometry": self.geometry,
            "L_nm": self.L_nm,
            "lambda_c_nm": self.lambda_c_nm,
            "lambda_p_nm": None if self.perfect else self.lambda_p_nm,
            "perfect": self.perfect,
            "R_um": self.R_um if self.geometry == "ps" else None,
            "a1_nm": self.a1_nm,
            "a2_nm": self.a2_nm,
            "b_nm": self.b_nm,
            "sweep": None if self.sweep is None else (
                self.sweep.name, self.sweep.lo, self.sweep.hi, self.sweep.points
            ),
            "offset_nm": self.offset_nm if self.geometry == "ps" else 0.0,
            "rel_tol": self.rel_tol,
        }
        blob = json.dumps(physics, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _point_geometry(cfg: RunConfig, axis: str | None, value: float | None):
    """Per-point (L, kc_l) after applying the sweep axis.  kc_l = 0 is a
    valid plane-plane point (the proximity limit)."""
    L = cfg.L_nm
    if axis == "l":
        L = value
        kc_l = 2.0 * _PI * L / cfg.lambda_c_nm
    elif axis == "lambda_c":
        kc_l = 2.0 * _PI * L / value
    elif axis == "kc_l":
        kc_l = value
    else:
        kc_l = 2.0 * _PI * L / cfg.lambda_c_nm
    return L, kc_l


def _map_indexed(evaluate: Callable[[int], dict], n: int, jobs: int) -> list[dict]:
    """Evaluate rows by index, optionally in a thread pool; assemble in grid
    order.  On interruption the completed rows are carried out in a
    :class:`_PartialRows` so the caller can still flush them."""
    if jobs <= 1 or n <= 1:
        rows_list: list[dict] = []
        try:
            for i in range(n):
                rows_list.append(evaluate(i))
        except KeyboardInterrupt:
            raise _PartialRows(rows_list) from None
        return rows_list

    pool = ThreadPoolExecutor(max_workers=jobs)
    futures = {pool.submit(evaluate, i): i for i in range(n)}
    rows: dict[int, dict] = {}
    try:
        for fut, i in futures.items():
            rows[i] = fut.result()
    except KeyboardInterrupt:
        pool.shutdown(wait=False, cancel_futures=True)
        for fut, i in futures.items():
            if i not in rows and fut.done() and not fut.cancelled():
                try:
                    rows[i] = fut.result(timeout=0)
                except Exception:
                    pass
        raise _PartialRows([rows[i] for i in sorted(rows)]) from None
    pool.shutdown(wait=True)
    return [rows[i] for i in sorted(rows)]


class _PartialRows(Exception):
    """Carries completed rows out of an interrupted sweep."""

    def __init__(self, rows):
        super().__init__("sweep interrupted")
        self.rows = rows


def pp_table(cfg: RunConfig) -> list[dict]:
    """Plane-plane observables over the sweep grid."""
    spec = cfg.response_spec()
    model = cfg.model
    axis = cfg.sweep.name if cfg.sweep else None
    values = cfg.sweep.values() if cfg.sweep else np.array([float("nan")])

    def evaluate(i: int) -> dict:
        value = None if axis is None else float(values[i])
        L, kc_l = _point_geometry(cfg, axis, value)
        kp_l = math.inf if cfg.perfect else 2.0 * _PI * L / cfg.lambda_p_nm
        if kc_l == 0.0:
            gk = g0 = response_g(0.0, None if cfg.perfect else kp_l, model, spec)
        else:
            gk = response_g(kc_l, None if cfg.perfect else kp_l, model, spec)
            g0 = response_g(0.0, None if cfg.perfect else kp_l, model, spec)
        rho = gk.g_hat / g0.g_hat
        k_c = kc_l / (L * 1e-9)
        conv_f = HBAR_C * k_c / (2.0 * (L * 1e-9) ** 5) * 1e-18
        err = rho * math.hypot(gk.err_est / gk.g_hat, g0.err_est / g0.g_hat)
        return {
            "kc_l": kc_l,
            "kp_l": kp_l,
            "rho": rho,
            "g_hat": gk.g_hat,
            "alpha": rho * math.exp(kc_l),
            "gamma_pn_um2_nm2": conv_f * gk.g_hat,
            "gamma_pfa_pn_um2_nm2": conv_f * g0.g_hat,
            "err_est": err,
            "converged": gk.converged and g0.converged,
        }

    return _map_indexed(evaluate, len(values), cfg.jobs)


def ps_table(cfg: RunConfig) -> list[dict]:
    """Plane-sphere observables over the sweep grid."""
    spec = cfg.ps_spec()
    inner = cfg.response_spec()
    model = cfg.model
    axis = cfg.sweep.name if cfg.sweep else None
    values = cfg.sweep.values() if cfg.sweep else np.array([float("nan")])
    lam_p = None if cfg.perfect else cfg.lambda_p_nm

    def evaluate(i: int) -> dict:
        value = None if axis is None else float(values[i])
        L, kc_l = _point_geometry(cfg, axis, value)
        if not kc_l > 0.0:
            raise UsageError("plane-sphere sweeps need kc_l > 0")
        lam_c = 2.0 * _PI * L / kc_l
        setup = SphereSetup(cfg.R_um, L, lam_c, lam_p)
        r = gamma_ps(setup, model, spec, inner)
        if cfg.offset_nm > 0.0:
            off_setup = SphereSetup(cfg.R_um, L - cfg.offset_nm, lam_c, lam_p)
            off = gamma_ps(off_setup, model, spec, inner).gamma_ps
        else:
            off = r.gamma_ps
        return {
            "kc_l": setup.kC_L,
            "kp_l": math.inf if cfg.perfect else setup.kP_L(),
            "gamma_ps": r.gamma_ps,
            "gamma_ps_pfa": r.gamma_ps_pfa,
            "gamma_ps_offset": off,
            "rho_ps": r.rho_ps,
            "err_est": r.err_est,
            "converged": r.converged,
        }

    return _map_indexed(evaluate, len(values), cfg.jobs)


# ---------------------------------------------------------------------------
# canonical figure data


_EXP_L = 220.0
_EXP_LAMBDA_C = 1200.0
_EXP_LAMBDA_P = 137.0
_FIG_R_UM = 100.0  # canonical sphere radius for the coefficient scale


def _fig2(jobs: int) -> tuple[tuple[str, ...], list[dict], str]:
    ks = np.linspace(0.1, 12.0, 60)

    def evaluate(i: int) -> dict:
        k = float(ks[i])
        r = rho_perfect(k)
        return {
            "kc_l": k,
            "rho": r.value,
            "rho_asymptote": rho_perfect_asymptote(k),
            "err_est": r.err_est,
            "converged": r.converged,
        }

    rows = _map_indexed(evaluate, len(ks), jobs)
    return ("kc_l", "rho", "rho_asymptote", "err_est", "converged"), rows, \
        "kc_l,rho:dimensionless"


def _fig3(jobs: int) -> tuple[tuple[str, ...], list[dict], str]:
    ks = np.linspace(0.1, 10.0, 34)
    kps = (1.0, 2.5, 5.0, 10.0)
    grid = [(kp, float(k)) for kp in kps for k in ks]
    model = MirrorModel.plasma(_EXP_LAMBDA_P)

    def evaluate(i: int) -> dict:
        kp, k = grid[i]
        gk = response_g(k, kp, model)
        g0 = response_g(0.0, kp, model)
        return {
            "kp_l": kp,
            "kc_l": k,
            "rho": gk.g_hat / g0.g_hat,
            "err_est": gk.err_est / g0.g_hat,
            "converged": gk.converged and g0.converged,
        }

    rows = _map_indexed(evaluate, len(grid), jobs)
    return ("kp_l", "kc_l", "rho", "err_est", "converged"), rows, \
        "kp_l,kc_l,rho:dimensionless"


def _fig4(jobs: int) -> tuple[tuple[str, ...], list[dict], str]:
    kp = 46.0  # L = 1 um with the gold plasma wavelength
    ks = np.concatenate([np.linspace(2.0, 40.0, 20), np.linspace(44.0, 70.0, 7)])
    model = MirrorModel.plasma(_EXP_LAMBDA_P)

    def evaluate(i: int) -> dict:
        k = float(ks[i])
        gk = response_g(k, kp, model)
        g0 = response_g(0.0, kp, model)
        alpha = gk.g_hat / g0.g_hat * math.exp(k)
        return {
            "kc_l": k,
            "alpha": alpha,
            "alpha_perfect_quartic": 2.0 / _PI**4 * k**4,
            "err_est": alpha * gk.err_est / gk.g_hat,
            "converged": gk.converged and g0.converged,
        }

    rows = _map_indexed(evaluate, len(ks), jobs)
    return ("kc_l", "alpha", "alpha_perfect_quartic", "err_est", "converged"), rows, \
        "kc_l,alpha:dimensionless"


def _fig5(jobs: int) -> tuple[tuple[str, ...], list[dict], str]:
    ls = np.geomspace(150.0, 1000.0, 18)
    model = MirrorModel.plasma(_EXP_LAMBDA_P)
    k_c = 2.0 * _PI / (_EXP_LAMBDA_C * 1e-9)
    pfa_perfect_hat = _PI**2 / 240.0

    def evaluate(i: int) -> dict:
        L = float(ls[i])
        setup = SphereSetup(_FIG_R_UM, L, _EXP_LAMBDA_C, _EXP_LAMBDA_P)
        r = gamma_ps(setup, model)
        pfa_perfect = (
            _PI * k_c * _FIG_R_UM * 1e-6 * HBAR_C * pfa_perfect_hat / (L * 1e-9) ** 4
        )
        return {
            "L_nm": L,
            "gamma_ps": r.gamma_ps,
            "gamma_ps_pfa": r.gamma_ps_pfa,
            "gamma_ps_pfa_perfect": pfa_perfect,
            "err_est": r.err_est,
            "converged": r.converged,
        }

    rows = _map_indexed(evaluate, len(ls), jobs)
    # short-distance power-law reference, L^-3 pinned to the first PFA value
    l0, g0 = rows[0]["L_nm"], rows[0]["gamma_ps_pfa"]
    for row in rows:
        row["plasmon_power_reference"] = g0 * (l0 / row["L_nm"]) ** 3
    cols = ("L_nm", "gamma_ps", "gamma_ps_pfa", "gamma_ps_pfa_perfect",
            "plasmon_power_reference", "err_est", "converged")
    return cols, rows, "L_nm:nm gamma:pN/um^2.nm^-2"


def _fig6(jobs: int) -> tuple[tuple[str, ...], list[dict], str]:
    k_exp = 2.0 * _PI * _EXP_L / _EXP_LAMBDA_C
    ks = np.sort(np.append(np.linspace(0.5, 6.0, 23), k_exp))
    model = MirrorModel.plasma(_EXP_LAMBDA_P)

    def evaluate(i: int) -> dict:
        k = float(ks[i])
        setup = SphereSetup(_FIG_R_UM, _EXP_L, 2.0 * _PI * _EXP_L / k, _EXP_LAMBDA_P)
        r = gamma_ps(setup, model)
        return {
            "kc_l": k,
            "gamma_ps": r.gamma_ps,
            "gamma_ps_pfa": r.gamma_ps_pfa,
            "rho_ps": r.rho_ps,
            "experimental_marker": int(k == k_exp),
            "err_est": r.err_est,
            "converged": r.converged,
        }

    rows = _map_indexed(evaluate, len(ks), jobs)
    cols = ("kc_l", "gamma_ps", "gamma_ps_pfa", "rho_ps",
            "experimental_marker", "err_est", "converged")
    return cols, rows, "kc_l,rho_ps:dimensionless gamma:pN/um^2.nm^-2"


def _fig7(jobs: int) -> tuple[tuple[str, ...], list[dict], str]:
    cfg = RunConfig(
        geometry="ps",
        L_nm=_EXP_L,
        lambda_c_nm=_EXP_LAMBDA_C,
        lambda_p_nm=_EXP_LAMBDA_P,
        R_um=_FIG_R_UM,
        sweep=SweepAxis("l", 220.0, 260.0, 9),
        offset_nm=20.0,
        jobs=jobs,
    )
    rows = ps_table(cfg)
    out = [
        {
            "L_nm": 220.0 + 5.0 * i,
            "gamma_ps": row["gamma_ps"],
            "gamma_ps_pfa": row["gamma_ps_pfa"],
            "gamma_ps_offset": row["gamma_ps_offset"],
            "err_est": row["err_est"],
            "converged": row["converged"],
        }
        for i, row in enumerate(rows)
    ]
    cols = ("L_nm", "gamma_ps", "gamma_ps_pfa", "gamma_ps_offset",
            "err_est", "converged")
    return cols, out, "L_nm:nm gamma:pN/um^2.nm^-2"


_FIGURES = {
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7": _fig7,
}


def figure_table(name: str, jobs: int = 1):
    """Canonical data behind one of the published curves; returns
    (columns, rows, units)."""
    try:
        builder = _FIGURES[name]
    except KeyError:
        raise UsageError(
            f"unknown figure {name!r}; choose from {sorted(_FIGURES)}"
        ) from None
    return builder(jobs)


# ---------------------------------------------------------------------------
# table writers


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(stream, columns, rows, config_hash: str, units: str) -> None:
    """Locale-independent CSV: LF endings, full-precision floats, a leading
    comment line carrying the config hash and unit legend."""
    stream.write(f"# config-hash={config_hash} units={units}\n")
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(_format_cell(row[c]) for c in columns) + "\n")


def write_json(stream, columns, rows, config_hash: str, units: str,
               config_echo: dict | None = None) -> None:
    payload = {
        "config_hash": config_hash,
        "units": units,
        "columns": list(columns),
        "records": rows,
    }
    if config_echo is not None:
        payload["config"] = config_echo
    json.dump(payload, stream, indent=2, sort_keys=True)
    stream.write("\n")


def emit(cfg_or_hash, columns, rows, units, fmt: str, out: str | None,
         config_echo: dict | None = None) -> None:
    config_hash = (
        cfg_or_hash if isinstance(cfg_or_hash, str) else cfg_or_hash.config_hash()
    )
    if out is None:
        stream = sys.stdout
        close = False
    else:
        stream = open(out, "w", encoding="utf-8", newline="\n")
        close = True
    try:
        if fmt == "json":
            write_json(stream, columns, rows, config_hash, units, config_echo)
        else:
            write_csv(stream, columns, rows, config_hash, units)
    finally:
        if close:
            stream.close()
