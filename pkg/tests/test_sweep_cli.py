import io
import json
import math

import pytest

from lateral_casimir.cli import main
from lateral_casimir.sweep import (
    PP_COLUMNS,
    PP_UNITS,
    RunConfig,
    SweepAxis,
    UsageError,
    figure_table,
    pp_table,
    ps_table,
    write_csv,
)

PI = math.pi
EXP_K = 2.0 * PI * 220.0 / 1200.0


def test_sweep_axis_parsing():
    ax = SweepAxis.parse("kc_l:0.5:2.0:4")
    assert ax.values().tolist() == [0.5, 1.0, 1.5, 2.0]
    assert SweepAxis.parse("l:220:220:1").values().tolist() == [220.0]
    for bad in ("kc_l:0.5:2.0", "bogus:0:1:5", "kc_l:2:1:5", "kc_l:a:b:3"):
        with pytest.raises(UsageError):
            SweepAxis.parse(bad)


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig(geometry="nope")
    with pytest.raises(UsageError):
        RunConfig(L_nm=-5.0)
    with pytest.raises(UsageError):
        RunConfig(fmt="yaml")
    with pytest.raises(UsageError):
        RunConfig(jobs=0)


def test_config_hash_tracks_physics_only():
    base = RunConfig(geometry="pp", L_nm=220.0)
    assert base.config_hash() == RunConfig(geometry="pp", L_nm=220.0,
                                           jobs=4, fmt="json").config_hash()
    assert base.config_hash() != RunConfig(geometry="pp", L_nm=221.0).config_hash()
    assert base.config_hash() != RunConfig(geometry="pp", L_nm=220.0,
                                           rel_tol=1e-4).config_hash()
    assert base.config_hash() != RunConfig(geometry="pp", L_nm=220.0,
                                           perfect=True).config_hash()


def test_pp_single_point_proximity_limit():
    cfg = RunConfig(geometry="pp", sweep=SweepAxis("kc_l", 0.0, 0.0, 1))
    rows = pp_table(cfg)
    assert len(rows) == 1
    assert rows[0]["rho"] == 1.0
    assert rows[0]["gamma_pn_um2_nm2"] == 0.0
    assert rows[0]["converged"]


def test_pp_single_point_perfect_headline():
    cfg = RunConfig(geometry="pp", perfect=True,
                    sweep=SweepAxis("kc_l", EXP_K, EXP_K, 1))
    row = pp_table(cfg)[0]
    assert row["rho"] == pytest.approx(0.819, abs=0.005)
    assert row["kp_l"] == math.inf


def test_pp_plasma_headline_row():
    cfg = RunConfig(geometry="pp", sweep=SweepAxis("kc_l", EXP_K, EXP_K, 1))
    row = pp_table(cfg)[0]
    assert row["rho"] == pytest.approx(0.814, abs=0.005)
    assert row["alpha"] == pytest.approx(row["rho"] * math.exp(row["kc_l"]), rel=1e-12)


def test_parallel_and_serial_tables_identical():
    mk = lambda jobs: RunConfig(geometry="pp", jobs=jobs,
                                sweep=SweepAxis("kc_l", 0.4, 1.6, 4))
    serial = pp_table(mk(1))
    parallel = pp_table(mk(2))
    assert serial == parallel


def test_csv_format():
    cfg = RunConfig(geometry="pp", sweep=SweepAxis("kc_l", 0.5, 1.0, 2))
    rows = pp_table(cfg)
    buf = io.StringIO()
    write_csv(buf, PP_COLUMNS, rows, cfg.config_hash(), PP_UNITS)
    text = buf.getvalue()
    lines = text.split("\n")
    assert lines[0].startswith("# config-hash=")
    assert lines[1] == ",".join(PP_COLUMNS)
    assert len(lines) == 2 + len(rows) + 1  # header, columns, rows, trailing LF
    assert "\r" not in text
    assert "nan" not in text.lower()
    # full-precision round trip
    first = lines[2].split(",")
    assert float(first[PP_COLUMNS.index("rho")]) == rows[0]["rho"]


def test_ps_table_offset_column():
    cfg = RunConfig(geometry="ps", sweep=SweepAxis("l", 230.0, 230.0, 1),
                    offset_nm=20.0)
    row = ps_table(cfg)[0]
    assert row["gamma_ps_offset"] > row["gamma_ps"]
    assert row["rho_ps"] == pytest.approx(
        row["gamma_ps"] / row["gamma_ps_pfa"], rel=1e-12
    )


def test_cli_pp_exit_code_and_output(tmp_path, capsys):
    out = tmp_path / "pp.csv"
    code = main(["pp", "--sweep", f"kc_l:{EXP_K}:{EXP_K}:1", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert text.startswith("# config-hash=")
    assert "rho" in text.splitlines()[1]


def test_cli_json_output(tmp_path):
    out = tmp_path / "pp.json"
    code = main(["pp", "--sweep", "kc_l:1.0:1.0:1", "--format", "json",
                 "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["records"][0]["rho"] == pytest.approx(0.85, abs=0.05)
    assert payload["config"]["L_nm"] == 220.0
    assert "config_hash" in payload


def test_cli_config_file_with_flag_override(tmp_path):
    cfg_file = tmp_path / "run.json"
    cfg_file.write_text(json.dumps({"L": 220.0, "lambda-c": 1200.0,
                                    "sweep": "kc_l:1.0:1.0:1", "format": "json"}))
    out = tmp_path / "o.json"
    # the explicit flag overrides the file's sweep
    code = main(["pp", "--config", str(cfg_file), "--sweep", "kc_l:0.5:0.5:1",
                 "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["records"][0]["kc_l"] == 0.5


def test_cli_usage_errors():
    assert main(["pp", "--sweep", "bogus"]) == 1
    assert main(["ps", "--radius", "-3"]) == 1
    assert main(["figure", "wat"]) == 1
    assert main(["pp", "--config", "/does/not/exist.json"]) == 1


def test_cli_validate_subset(capsys):
    assert main(["validate", "--criteria", "2,5"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "2/2 criteria passed" in out


def test_cli_validate_negative_control(capsys):
    # corrupting the conversion constant must fail the closed-form criterion
    assert main(["validate", "--criteria", "11", "--corrupt-hbar-c", "1.05"]) == 1
    out = capsys.readouterr().out
    assert "FAIL  11" in out


def test_figure_fig2_shape():
    cols, rows, units = figure_table("fig2")
    assert cols[0] == "kc_l"
    rhos = [r["rho"] for r in rows]
    assert rhos[0] > 0.99  # proximity limit at the left edge
    assert all(b < a for a, b in zip(rhos, rhos[1:]))  # decreasing
    tail = rows[-1]
    assert tail["rho"] == pytest.approx(tail["rho_asymptote"], rel=0.01)


def test_figure_fig3_curve_ordering():
    cols, rows, units = figure_table("fig3")
    curves = {}
    for row in rows:
        curves.setdefault(row["kp_l"], []).append((row["kc_l"], row["rho"]))
    assert sorted(curves) == [1.0, 2.5, 5.0, 10.0]
    for pts in curves.values():
        rhos = [r for _, r in pts]
        assert all(b < a for a, b in zip(rhos, rhos[1:]))
        assert all(0.0 < r <= 1.0 for r in rhos)
    # near the proximity limit the softest mirror hugs the approximation
    # most closely: at fixed kc_l the curves order downward in kp_l
    at_one = {
        kp: min(pts, key=lambda p: abs(p[0] - 1.0))[1] for kp, pts in curves.items()
    }
    assert at_one[1.0] > at_one[2.5] > at_one[5.0] > at_one[10.0]


def test_figure_fig6_scattering_below_pfa():
    cols, rows, units = figure_table("fig6")
    assert any(row["experimental_marker"] for row in rows)
    for row in rows:
        assert row["gamma_ps"] <= row["gamma_ps_pfa"]
        assert 0.0 < row["rho_ps"] <= 1.0
