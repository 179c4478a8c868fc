"""Config resolution, CSV emission, sidecar metadata, exit codes."""

import json

import pytest

from capmimo import cli
from capmimo.cli import (
    CSV_COLUMNS,
    ConfigError,
    main,
    parse_config,
    read_rows_csv,
    write_rows_csv,
)


def test_defaults_from_empty_file(tmp_path):
    cfg_file = tmp_path / "empty.cfg"
    cfg_file.write_text("")
    command, rc = parse_config(["sweep-receiver", "--config", str(cfg_file)])
    assert command == "sweep-receiver"
    assert rc.length == 2.0
    assert rc.wavelength == 0.04
    assert rc.power == 1.0
    assert rc.noise == 2.0
    assert rc.distances == (10.0, 1.0, 0.1)
    assert rc.m_list == (5, 10, 20, 40, 80, 100, 160)
    resolved = rc.resolved_dict()
    assert resolved["ref_m"] == 1600
    assert resolved["inner_points"] == 1000


def test_flag_overrides_file(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("distance = 50\nscenario = filed  # comment\n")
    _, rc = parse_config(["dof", "--config", str(cfg_file), "--distance", "100"])
    assert rc.distance == 100.0
    assert rc.scenario == "filed"


def test_unknown_key_rejected(tmp_path):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("wavelenght = 0.04\n")
    with pytest.raises(ConfigError):
        parse_config(["dof", "--config", str(cfg_file)])


def test_invalid_value_rejected(tmp_path):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("ref_m = soon\n")
    with pytest.raises(ConfigError):
        parse_config(["dof", "--config", str(cfg_file)])


def test_zero_wavelength_rejected():
    assert main(["dof", "--wavelength", "0"]) == 2


def test_malformed_list_rejected():
    assert main(["sweep-receiver", "--m-list", "4,five", "--out", "x.csv"]) == 2


def test_missing_out_is_config_error(capsys):
    assert main(["sweep-receiver", "--m-list", "2,4", "--ref-m", "64",
                 "--distances", "10"]) == 2
    assert "out" in capsys.readouterr().err


def _run_small_sweep(tmp_path, name="sweep.csv", extra=()):
    out = tmp_path / name
    code = main(["sweep-receiver", "--distances", "10", "--m-list", "2,4,8",
                 "--ref-m", "64", "--inner-points", "512", "--out", str(out), *extra])
    return code, out


def test_sweep_receiver_writes_csv_and_meta(tmp_path, capsys):
    code, out = _run_small_sweep(tmp_path)
    assert code == 0
    stdout = capsys.readouterr().out
    assert "wavelength = 0.04" in stdout  # resolved config printed up front
    text = out.read_text()
    header = text.splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)
    assert len(text.splitlines()) == 4
    meta = json.loads(out.with_suffix(".meta").read_text())
    assert meta["tool"] == "capmimo"
    assert meta["command"] == "sweep-receiver"
    assert meta["resolved_config"]["ref_m"] == 64
    assert "slope_fits" in meta and "timings" in meta


def test_csv_round_trip(tmp_path):
    _, out = _run_small_sweep(tmp_path)
    rows = read_rows_csv(out)
    assert len(rows) == 3
    echo = tmp_path / "echo.csv"
    write_rows_csv(rows, echo)
    assert echo.read_bytes() == out.read_bytes()


def test_rerun_byte_identical(tmp_path):
    _, first = _run_small_sweep(tmp_path, "a.csv")
    _, second = _run_small_sweep(tmp_path, "b.csv")
    assert first.read_bytes() == second.read_bytes()


def test_timings_flag_fills_wall_time(tmp_path):
    code, out = _run_small_sweep(tmp_path, extra=("--timings",))
    assert code == 0
    rows = read_rows_csv(out)
    assert any(r.wall_time_s > 0 for r in rows)
    _, plain = _run_small_sweep(tmp_path, "plain.csv")
    assert all(r.wall_time_s == 0.0 for r in read_rows_csv(plain))


def test_sweep_grid_meta_has_symmetry(tmp_path):
    out = tmp_path / "grid.csv"
    code = main(["sweep-grid", "--distance", "10", "--m1-list", "2,4",
                 "--m2-list", "2,4", "--ref-m", "64", "--inner-points", "512",
                 "--out", str(out)])
    assert code == 0
    meta = json.loads(out.with_suffix(".meta").read_text())
    assert meta["symmetry_gap"] >= 0.0
    rows = read_rows_csv(out)
    assert {(r.m1, r.m2) for r in rows} == {(2, 2), (2, 4), (4, 2), (4, 4)}


def test_dof_prints_counts(capsys):
    code = main(["dof", "--distance", "100", "--ref-m", "128"])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "eigen_count =" in stdout
    assert "analytic_dof = 1.0" in stdout


def test_bounds_table_all_within(tmp_path, capsys):
    out = tmp_path / "bounds.csv"
    code = main(["bounds", "--m-list", "10,50", "--out", str(out)])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "gap_bound" in stdout
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(cli.BOUNDS_COLUMNS)
    assert all(line.endswith("true") for line in lines[1:])


def test_failed_cells_exit_nonzero_without_keep_going(tmp_path, monkeypatch):
    from capmimo import experiments as experiments_mod
    real = experiments_mod.mi_discrete_rx

    def flaky(m, cfg, inner_points=None):
        if m == 4:
            raise RuntimeError("synthetic")
        return real(m, cfg, inner_points)

    monkeypatch.setattr(experiments_mod, "mi_discrete_rx", flaky)
    monkeypatch.setenv("CAPMIMO_THREADS", "1")
    code, out = _run_small_sweep(tmp_path, "fail.csv")
    assert code == 1
    rows = read_rows_csv(out)
    assert any(r.error for r in rows)  # failed cell recorded, not dropped
    code2, _ = _run_small_sweep(tmp_path, "kept.csv", extra=("--keep-going",))
    assert code2 == 0


def test_unwritable_output_path(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("file, not a directory")
    code, _ = _run_small_sweep(tmp_path, "blocker/out.csv")
    assert code == 1


def test_log_base_changes_stdout_units(tmp_path, capsys):
    _run_small_sweep(tmp_path, "nats.csv")
    assert "nats" in capsys.readouterr().out
    _run_small_sweep(tmp_path, "bits.csv", extra=("--log-base", "2"))
    assert "bits" in capsys.readouterr().out


def test_csv_reports_both_nats_and_bits(tmp_path):
    import math
    _, out = _run_small_sweep(tmp_path)
    lines = out.read_text().splitlines()
    idx_nats = CSV_COLUMNS.index("mi_nats")
    idx_bits = CSV_COLUMNS.index("mi_bits")
    for line in lines[1:]:
        cells = line.split(",")
        assert float(cells[idx_bits]) == pytest.approx(
            float(cells[idx_nats]) / math.log(2.0), rel=1e-12)
