"""Command-line interface: plane-plane and plane-sphere sweeps, canonical
figure data, and the built-in validation suite.

Exit codes: 0 success with all points converged, 1 usage or configuration
error, 2 at least one point failed to converge (rows are still emitted and
flagged), 3 internal error, 130 interrupted (completed rows are flushed).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__, acceptance
from .plane_plane import HBAR_C
from .sweep import (
    PP_COLUMNS,
    PP_UNITS,
    PS_COLUMNS,
    PS_UNITS,
    RunConfig,
    SweepAxis,
    UsageError,
    _PartialRows,
    emit,
    figure_table,
    pp_table,
    ps_table,
)

_CONFIG_KEYS = {
    "L": "L",
    "lambda-c": "lambda_c",
    "lambda_c": "lambda_c",
    "lambda-p": "lambda_p",
    "lambda_p": "lambda_p",
    "perfect": "perfect",
    "radius": "radius",
    "a1": "a1",
    "a2": "a2",
    "b": "b",
    "sweep": "sweep",
    "offset": "offset",
    "rel-tol": "rel_tol",
    "rel_tol": "rel_tol",
    "format": "format",
    "out": "out",
    "jobs": "jobs",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(p: _Parser) -> None:
    p.add_argument("--L", type=float, default=220.0, metavar="NM",
                   help="mean separation distance in nm (default 220)")
    p.add_argument("--lambda-c", type=float, default=1200.0, metavar="NM",
                   help="corrugation wavelength in nm (default 1200)")
    p.add_argument("--lambda-p", type=float, default=137.0, metavar="NM",
                   help="plasma wavelength in nm (default 137, gold)")
    p.add_argument("--perfect", action="store_true",
                   help="use perfect reflectors instead of the plasma model")
    p.add_argument("--a1", type=float, default=0.0, metavar="NM",
                   help="corrugation amplitude of plate 1 in nm")
    p.add_argument("--a2", type=float, default=0.0, metavar="NM",
                   help="corrugation amplitude of plate 2 in nm")
    p.add_argument("--b", type=float, default=0.0, metavar="NM",
                   help="lateral mismatch of the corrugations in nm")
    p.add_argument("--sweep", metavar="AXIS:MIN:MAX:POINTS",
                   help="sweep one axis (kc_l, l or lambda_c)")
    p.add_argument("--rel-tol", type=float, default=None,
                   help="override the relative quadrature tolerance")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH", help="output path (default stdout)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker threads for sweep points (default 1)")
    p.add_argument("--config", metavar="PATH",
                   help="JSON file with keys mirroring the flags; flags override")


def build_parser() -> _Parser:
    parser = _Parser(prog="lateral-casimir",
                     description="Lateral Casimir force between corrugated "
                                 "mirrors, beyond the proximity force "
                                 "approximation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    pp = sub.add_parser("pp", help="plane-plane observables over a sweep")
    _add_common(pp)

    ps = sub.add_parser("ps", help="plane-sphere observables over a sweep")
    _add_common(ps)
    ps.add_argument("--radius", type=float, default=100.0, metavar="UM",
                    help="sphere radius in micrometers (default 100)")
    ps.add_argument("--offset", type=float, default=0.0, metavar="NM",
                    help="distance-calibration offset for the third curve")

    fig = sub.add_parser("figure", help="emit canonical curve data")
    fig.add_argument("name", choices=("fig2", "fig3", "fig4", "fig5", "fig6", "fig7"))
    fig.add_argument("--format", choices=("csv", "json"), default="csv")
    fig.add_argument("--out", metavar="PATH",
                     help="output path (default <name>.csv)")
    fig.add_argument("--jobs", type=int, default=1)

    val = sub.add_parser("validate", help="run the built-in validation suite")
    val.add_argument("--criteria", metavar="LIST",
                     help="comma-separated criterion numbers (default all)")
    val.add_argument("--corrupt-hbar-c", type=float, default=1.0,
                     metavar="FACTOR",
                     help="self-test hook: scale the conversion constant and "
                          "verify the suite fails")
    return parser


def _apply_config_file(argv: list[str]) -> list[str]:
    """Prepend file-sourced flag values so explicit flags override them."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a path")
    path = argv[i + 1]
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object of flag values")

    injected: list[str] = []
    for key, value in data.items():
        norm = _CONFIG_KEYS.get(key)
        if norm is None:
            raise UsageError(f"unknown config key {key!r}")
        flag = "--" + norm.replace("_", "-")
        if isinstance(value, bool):
            if value:
                injected.append(flag)
        else:
            injected.extend([flag, str(value)])
    # file values first, explicit flags after: last occurrence wins
    return injected + argv


def _run_config(ns: argparse.Namespace, geometry: str) -> RunConfig:
    return RunConfig(
        geometry=geometry,
        L_nm=ns.L,
        lambda_c_nm=ns.lambda_c,
        lambda_p_nm=ns.lambda_p,
        perfect=ns.perfect,
        R_um=getattr(ns, "radius", 100.0),
        a1_nm=ns.a1,
        a2_nm=ns.a2,
        b_nm=ns.b,
        sweep=SweepAxis.parse(ns.sweep) if ns.sweep else None,
        offset_nm=getattr(ns, "offset", 0.0),
        rel_tol=ns.rel_tol,
        fmt=ns.format,
        out=ns.out,
        jobs=ns.jobs,
    )


def _emit_rows(cfg: RunConfig, columns, units, rows, partial: bool) -> int:
    echo = {k: v for k, v in vars(cfg).items() if k not in ("fmt", "out", "jobs")}
    echo["sweep"] = None if cfg.sweep is None else vars(cfg.sweep).copy()
    emit(cfg, columns, rows, units, cfg.fmt, cfg.out, config_echo=echo)
    if partial:
        return 130
    if any(not row["converged"] for row in rows):
        return 2
    return 0


def _cmd_table(ns: argparse.Namespace, geometry: str) -> int:
    cfg = _run_config(ns, geometry)
    table = pp_table if geometry == "pp" else ps_table
    try:
        rows = table(cfg)
    except _PartialRows as partial:
        sys.stderr.write("interrupted; flushing completed rows\n")
        return _emit_rows(cfg, PP_COLUMNS if geometry == "pp" else PS_COLUMNS,
                          PP_UNITS if geometry == "pp" else PS_UNITS,
                          partial.rows, partial=True)
    return _emit_rows(cfg, PP_COLUMNS if geometry == "pp" else PS_COLUMNS,
                      PP_UNITS if geometry == "pp" else PS_UNITS, rows,
                      partial=False)


def _cmd_figure(ns: argparse.Namespace) -> int:
    columns, rows, units = figure_table(ns.name, ns.jobs)
    out = ns.out if ns.out else f"{ns.name}.{'json' if ns.format == 'json' else 'csv'}"
    emit(ns.name, columns, rows, units, ns.format, out)
    sys.stderr.write(f"wrote {out}\n")
    if any(not row["converged"] for row in rows):
        return 2
    return 0


def _cmd_validate(ns: argparse.Namespace) -> int:
    indices = None
    if ns.criteria:
        try:
            indices = sorted({int(tok) for tok in ns.criteria.split(",") if tok})
        except ValueError as exc:
            raise UsageError(f"bad --criteria list {ns.criteria!r}") from exc
        bad = [i for i in indices if not 1 <= i <= len(acceptance.CRITERIA)]
        if bad:
            raise UsageError(f"criteria out of range: {bad}")
    results = acceptance.run_all(indices, hbar_c=ns.corrupt_hbar_c * HBAR_C)
    print(acceptance.format_report(results))
    return 0 if all(r.passed for r in results) else 1


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv and argv[0] in ("pp", "ps", "figure", "validate"):
            argv = argv[:1] + _apply_config_file(argv[1:])
        parser = build_parser()
        ns = parser.parse_args(argv)
        if ns.command == "pp":
            return _cmd_table(ns, "pp")
        if ns.command == "ps":
            return _cmd_table(ns, "ps")
        if ns.command == "figure":
            return _cmd_figure(ns)
        return _cmd_validate(ns)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except KeyboardInterrupt:
        return 130
    except BrokenPipeError:
        return 0
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
