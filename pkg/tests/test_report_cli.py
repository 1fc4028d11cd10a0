"""Report serialization stability, assertion grammar, and the CLI contract."""

from __future__ import annotations

import json

import pytest

from mistsim.cli import main
from mistsim.mist_filter import Sample
from mistsim.reconstruction import TransmissionLog
from mistsim.report import (
    check_assertion,
    dumps_stable,
    emit_report,
    round_floats,
    write_csv,
)

SIM_CFG = """\
[run]
seed = 11
duration_ms = 200000
mode = both

[filter]
n = 10
p = 0.05

[device cloud]
kind = cloud

[device gw]
kind = gateway

[device a]
kind = sensor

[device b]
kind = sensor

[link a gw]
latency_ms = 4

[link b gw]
latency_ms = 6

[link gw cloud]
latency_ms = 50

[source a]
kind = normal
mean = 25
stddev = 4
period_ms = 100
count = 2000

[source b]
kind = normal
mean = 28
stddev = 1
period_ms = 100
count = 2000
"""


@pytest.fixture
def sim_cfg(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(SIM_CFG, encoding="utf-8")
    return path


# -------------------------------------------------------- serialization


def test_round_floats_nine_significant_digits():
    assert round_floats(0.123456789123) == 0.123456789
    assert round_floats(1234567891234.0) == 1234567890000.0
    assert round_floats({"a": [1.00000000049, 2]}) == {"a": [1.0, 2]}
    assert round_floats(7) == 7
    assert round_floats(True) is True
    assert round_floats("x") == "x"
    assert round_floats(None) is None


def test_round_floats_rejects_non_finite():
    with pytest.raises(ValueError):
        round_floats(float("nan"))
    with pytest.raises(ValueError):
        round_floats({"deep": [float("inf")]})


def test_dumps_stable_is_order_insensitive():
    a = {"x": 1, "y": {"b": 2.0, "a": 3.0}}
    b = {"y": {"a": 3.0, "b": 2.0}, "x": 1}
    assert dumps_stable(a) == dumps_stable(b)
    assert dumps_stable(a).endswith("\n")


def test_write_csv_formatting(tmp_path):
    path = tmp_path / "t.csv"
    write_csv(path, ("a", "b", "c", "d"), [(1, 0.123456789123, None, True)])
    assert path.read_text() == "a,b,c,d\n1,0.123456789,,true\n"


def test_emit_report_writes_expected_files(tmp_path):
    samples = [Sample(0.0, 1.0), Sample(1.0, 2.0), Sample(2.0, 3.0)]
    log = TransmissionLog(entries=(samples[0], samples[2]), total_count=3)
    written = emit_report(
        {"k": 1.0},
        tmp_path,
        sensor_rows=[("x", 1)],
        sensor_header=("sensor", "total"),
        link_rows=[("m", "a->b", 1, 100, 400.0)],
        plot_series={"plot_x": (samples, log)},
    )
    names = [p.name for p in written]
    assert names == ["report.json", "sensor_metrics.csv", "link_usage.csv", "plot_x.csv"]
    plot_lines = (tmp_path / "plot_x.csv").read_text().splitlines()
    assert plot_lines[0] == "timestamp,raw,reconstructed,transmitted_flag"
    assert len(plot_lines) == 4  # header + one row per sample
    flags = [int(line.split(",")[-1]) for line in plot_lines[1:]]
    assert flags == [1, 0, 1]
    # Suppressed sample holds the last transmitted value.
    assert plot_lines[2].split(",")[2] == "1.0"


# ----------------------------------------------------------- assertions


REPORT = {
    "runs": [{"sensors": {"S1": {"reduction_percent": 99.0, "note": None}}}],
    "comparison": {"cloud_energy_j": {"reduction_percent": 0.5}},
    "flag": True,
}


@pytest.mark.parametrize(
    "expr,expected",
    [
        ("runs.0.sensors.S1.reduction_percent == 99.0", True),
        ("runs.0.sensors.S1.reduction_percent >= 99", True),
        ("runs.0.sensors.S1.reduction_percent > 99", False),
        ("runs.0.sensors.S1.reduction_percent != 99", False),
        ("runs.0.sensors.S1.reduction_percent <= 98.5", False),
        ("comparison.cloud_energy_j.reduction_percent > 0", True),
        ("comparison.cloud_energy_j.reduction_percent < 1", True),
        ("runs.0.sensors.S1.note > 0", False),  # None never satisfies
        ("runs.0.sensors.S2.reduction_percent > 0", False),  # missing path
        ("runs.5.sensors.S1.reduction_percent > 0", False),  # bad index
        ("flag == 1", False),  # booleans are not numbers here
    ],
)
def test_check_assertion(expr, expected):
    assert check_assertion(REPORT, expr) is expected


@pytest.mark.parametrize(
    "expr",
    ["no operator here", "== 5", "runs.0 ==", "runs.0 == banana"],
)
def test_check_assertion_bad_grammar(expr):
    with pytest.raises(ValueError):
        check_assertion(REPORT, expr)


# ------------------------------------------------------------------ cli


def test_cli_filter_dataset_roundtrip(tmp_path, office_csv_path, capsys):
    out = tmp_path / "out"
    code = main(
        [
            "filter",
            "--dataset",
            str(office_csv_path),
            "--column",
            "temp_c",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["command"] == "filter"
    assert report["tool"]["name"] == "mistsim"
    (block,) = report["runs"]
    assert block["n"] == 10 and block["p"] == 0.05
    stats = block["sensors"]["office_temperature"]
    assert stats["total"] == 5000
    assert stats["transmitted"] == 369
    assert report["ingest"]["office_temperature"]["rows_read"] == 5000
    # plot data defaults on for the filter command
    plot = out / "plot_office_temperature_n10_p0.05.csv"
    assert plot.exists()
    assert len(plot.read_text().splitlines()) == 5001
    summary = capsys.readouterr().out
    assert "office_temperature" in summary
    assert "wrote" in summary


def test_cli_filter_sweep_grid(tmp_path, office_csv_path):
    out = tmp_path / "out"
    code = main(
        [
            "filter",
            "--dataset",
            str(office_csv_path),
            "--column",
            "temp_c",
            "--n",
            "10,20",
            "--p",
            "0.05,0.1",
            "--out",
            str(out),
            "--quiet",
        ]
    )
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert [(b["n"], b["p"]) for b in report["runs"]] == [
        (10, 0.05),
        (10, 0.1),
        (20, 0.05),
        (20, 0.1),
    ]
    rows = (out / "sensor_metrics.csv").read_text().splitlines()
    assert len(rows) == 5  # header + one sensor x four grid points


def test_cli_simulate_both_modes(tmp_path, sim_cfg, capsys):
    out = tmp_path / "out"
    code = main(["simulate", "--config", str(sim_cfg), "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["modes_run"] == ["cloud_only", "mist_fog_cloud"]
    comparison = report["comparison"]
    assert comparison["network_total_bytes"]["reduction_percent"] > 0
    assert comparison["cloud_energy_j"]["reduction_percent"] > 0
    assert (out / "link_usage.csv").exists()
    assert (out / "resolved.cfg").exists()
    link_lines = (out / "link_usage.csv").read_text().splitlines()
    assert len(link_lines) == 1 + 2 * 3  # two modes, three links
    summary = capsys.readouterr().out
    assert "cloud_only" in summary and "reduction" in summary


def test_cli_simulate_single_mode_has_no_comparison(tmp_path, sim_cfg):
    out = tmp_path / "out"
    code = main(
        ["simulate", "--config", str(sim_cfg), "--mode", "cloud_only", "--out", str(out), "--quiet"]
    )
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["modes_run"] == ["cloud_only"]
    assert "comparison" not in report


def test_cli_quiet_silences_stdout(tmp_path, sim_cfg, capsys):
    code = main(
        ["simulate", "--config", str(sim_cfg), "--out", str(tmp_path / "o"), "--quiet"]
    )
    assert code == 0
    assert capsys.readouterr().out == ""


def test_cli_reruns_are_byte_identical(tmp_path, sim_cfg):
    out1, out2 = tmp_path / "one", tmp_path / "two"
    for out in (out1, out2):
        assert main(["simulate", "--config", str(sim_cfg), "--out", str(out), "--quiet"]) == 0
    for name in ("report.json", "resolved.cfg", "sensor_metrics.csv", "link_usage.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_cli_resolved_config_reruns_identically(tmp_path, sim_cfg):
    out1 = tmp_path / "one"
    assert main(["simulate", "--config", str(sim_cfg), "--out", str(out1), "--quiet"]) == 0
    out2 = tmp_path / "two"
    assert (
        main(["simulate", "--config", str(out1 / "resolved.cfg"), "--out", str(out2), "--quiet"])
        == 0
    )
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    assert (out1 / "resolved.cfg").read_bytes() == (out2 / "resolved.cfg").read_bytes()


# ------------------------------------------------------------ exit codes


def test_exit_1_usage_errors(tmp_path, capsys):
    assert main(["filter"]) == 1  # needs --config or --dataset
    assert main(["simulate"]) == 1  # needs --config
    assert main(["filter", "--column", "x", "--dataset_missing"]) == 1  # unknown flag
    assert main(["filter", "--config", "c.cfg", "--column", "x"]) == 1
    assert main(["filter", "--dataset", "d.csv", "--n", "ten"]) == 1
    assert main(["simulate", "--config", str(tmp_path / "absent.cfg")]) == 1
    capsys.readouterr()


def test_exit_1_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[mystery]\n", encoding="utf-8")
    assert main(["simulate", "--config", str(cfg)]) == 1
    assert "unknown section" in capsys.readouterr().err


def test_exit_1_simulate_without_topology(tmp_path, capsys):
    cfg = tmp_path / "empty.cfg"
    cfg.write_text("[run]\nduration_ms = 1000\n", encoding="utf-8")
    assert main(["simulate", "--config", str(cfg)]) == 1
    assert "invalid topology" in capsys.readouterr().err


def test_exit_1_missing_dataset_file(tmp_path, capsys):
    assert main(["filter", "--dataset", str(tmp_path / "absent.csv")]) == 1
    assert "not found" in capsys.readouterr().err


def test_exit_2_runtime_error(tmp_path, capsys):
    csv = tmp_path / "wrong.csv"
    csv.write_text("timestamp,other\n0,1\n", encoding="utf-8")
    code = main(["filter", "--dataset", str(csv), "--column", "value"])
    assert code == 2
    assert "runtime error" in capsys.readouterr().err


def test_exit_3_failed_assertion(tmp_path, office_csv_path, capsys):
    args = [
        "filter",
        "--dataset",
        str(office_csv_path),
        "--column",
        "temp_c",
        "--out",
        str(tmp_path / "o"),
        "--quiet",
    ]
    good = "runs.0.sensors.office_temperature.reduction_percent >= 90"
    bad = "runs.0.sensors.office_temperature.reduction_percent >= 99.9"
    assert main(args + ["--assert", good]) == 0
    assert main(args + ["--assert", good, "--assert", bad]) == 3
    assert "assertion failed" in capsys.readouterr().err


def test_exit_1_unparsable_assertion(tmp_path, office_csv_path, capsys):
    args = [
        "filter",
        "--dataset",
        str(office_csv_path),
        "--column",
        "temp_c",
        "--out",
        str(tmp_path / "o"),
        "--quiet",
        "--assert",
        "gibberish",
    ]
    assert main(args) == 1
    assert "bad assertion" in capsys.readouterr().err


def test_version_flag_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "mistsim" in capsys.readouterr().out
