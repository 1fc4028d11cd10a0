"""Config parsing, resolution, overrides, and the serialize round trip."""

from __future__ import annotations

import pytest

from mistsim.config import (
    ConfigError,
    Overrides,
    Scenario,
    load_config,
    parse_config,
    serialize_scenario,
)
from mistsim.mist_filter import FilterConfig
from mistsim.sources import ReplaySpec, SensorSpec
from mistsim.topology import validate

MINIMAL = "[run]\n"

SMALL = """\
[run]
seed = 7
duration_ms = 5000

[filter]
n = 4
p = 0.1

[device cloud]
kind = cloud

[device gw]
kind = gateway

[device s1]
kind = sensor

[link s1 gw]
latency_ms = 2

[link gw cloud]
latency_ms = 10

[source s1]
kind = normal
mean = 25
stddev = 4
period_ms = 1000
count = 5
"""


def test_minimal_defaults():
    sc = parse_config(MINIMAL)
    assert sc.seed == 42
    assert sc.message_size_bytes == 100
    assert sc.mode == "both"
    assert sc.grid == (FilterConfig(n=10, p=0.05),)
    assert sc.sources == ()
    assert sc.duration_ms is None
    assert sc.plot_data is None


def test_small_scenario_parses():
    sc = parse_config(SMALL)
    assert sc.seed == 7
    assert sc.duration_ms == 5000.0
    assert validate(sc.topology) == []
    assert sc.grid == (FilterConfig(n=4, p=0.1),)
    (src,) = sc.sources
    assert isinstance(src, SensorSpec)
    assert (src.mean, src.stddev, src.count) == (25.0, 4.0, 5)
    assert src.seed == 8  # derived: run seed 7 + 1-based source position


def test_source_seed_can_be_pinned():
    sc = parse_config(SMALL.replace("count = 5", "count = 5\nseed = 999"))
    assert sc.sources[0].seed == 999


def test_duration_derived_from_synthetic_sources():
    text = SMALL.replace("duration_ms = 5000\n", "")
    sc = parse_config(text)
    assert sc.duration_ms == 5000.0  # 5 samples x 1000 ms


def test_duration_not_derived_with_replay_source(tmp_path):
    csv = tmp_path / "d.csv"
    csv.write_text("timestamp,value\n0,1\n", encoding="utf-8")
    text = (
        "[run]\n\n[source d]\nkind = replay\nfile = " + str(csv) + "\n"
    )
    sc = parse_config(text)
    assert sc.duration_ms is None
    (src,) = sc.sources
    assert isinstance(src, ReplaySpec)
    assert src.value_column == "value"


def test_replay_source_full_keys():
    text = (
        "[run]\n\n[source d]\n"
        "kind = replay\n"
        "file = data.csv\n"
        "value_column = temp_c\n"
        "timestamp_column = ts\n"
        "delimiter = \\t\n"
        "expected_period = 60\n"
    )
    (src,) = parse_config(text).sources
    assert src.delimiter == "\t"
    assert src.timestamp_column == "ts"
    assert src.expected_period == 60.0


def test_filter_grid_sweep_is_n_major():
    text = "[run]\n\n[filter]\nn = 10, 50\np = 0.05, 0.1\n"
    sc = parse_config(text)
    assert sc.grid == (
        FilterConfig(10, 0.05),
        FilterConfig(10, 0.1),
        FilterConfig(50, 0.05),
        FilterConfig(50, 0.1),
    )
    with pytest.raises(ConfigError, match="exactly one"):
        sc.filter_config()
    single = parse_config("[run]\n")
    assert single.filter_config() == FilterConfig(10, 0.05)


# ------------------------------------------------------------ rejections


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("", "at least a [run] section"),
        ("[DEFAULT]\nx = 1\n\n[run]\n", "[DEFAULT]"),
        ("[mystery]\n", "unknown section"),
        ("[run]\nspeed = 9\n", "unknown keys"),
        ("[run]\nseed = -1\n", "64 bits"),
        ("[run]\nseed = 18446744073709551616\n", "64 bits"),
        ("[run]\nseed = abc\n", "integer"),
        ("[run]\nduration_ms = 0\n", "> 0"),
        ("[run]\nduration_ms = -5\n", "> 0"),
        ("[run]\nmessage_size_bytes = 0\n", ">= 1"),
        ("[run]\nmode = sideways\n", "mode"),
        ("[run]\nplot_data = maybe\n", "boolean"),
        ("[run]\n\n[filter]\nq = 1\n", "unknown keys"),
        ("[run]\n\n[filter]\nn = ,\n", "at least one value"),
        ("[run]\n\n[filter]\nn = x\n", "comma-separated"),
        ("[run]\n\n[filter]\nn = 0\n", ">= 1"),
        ("[run]\n\n[filter]\np = -0.5\n", ">= 0"),
        ("[run]\n\n[energy]\nwarp_w = 1\n", "unknown keys"),
        ("[run]\n\n[energy]\ncloud_busy_w = 1\n", "cloud"),  # busy < default idle
        ("[run]\n\n[device d]\nkind = blimp\n", "kind"),
        ("[run]\n\n[device d]\nkind = sensor\ncolour = red\n", "unknown keys"),
        ("[run]\n\n[link a b]\n", "latency_ms is required"),
        ("[run]\n\n[link a]\nlatency_ms = 1\n", "unknown section"),
        ("[run]\n\n[source s]\nkind = magic\n", "'normal' or 'replay'"),
        ("[run]\n\n[source s]\nkind = replay\n", "file is required"),
        ("[run]\n\n[source s]\nkind = normal\nshape = 2\n", "unknown keys"),
        ("[run]\n\n[source s]\nkind = normal\nstddev = -1\n", "stddev"),
        ("[run]\n\n[source s]\nkind = normal\n\n[source s]\nkind = normal\n", ""),
        ("[run]\nseed = 1\n\n[run]\nseed = 2\n", ""),  # duplicate section
    ],
)
def test_bad_configs_raise(text, fragment):
    with pytest.raises(ConfigError, match=None) as exc:
        parse_config(text)
    assert fragment in str(exc.value)


def test_errors_name_the_origin():
    with pytest.raises(ConfigError, match="myfile.cfg"):
        parse_config("[run]\nspeed = 9\n", origin="myfile.cfg")


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "absent.cfg")


# ------------------------------------------------------------- overrides


def test_overrides_take_precedence():
    ov = Overrides(seed=100, n_values=(3,), p_values=(0.2,), mode="cloud_only")
    sc = parse_config(SMALL, overrides=ov)
    assert sc.seed == 100
    assert sc.grid == (FilterConfig(3, 0.2),)
    assert sc.mode == "cloud_only"
    # Derived source seeds follow the overriding run seed.
    assert sc.sources[0].seed == 101


def test_plot_data_default_only_fills_gap():
    sc = parse_config(MINIMAL, overrides=Overrides(plot_data_default=True))
    assert sc.plot_data is True
    sc = parse_config("[run]\nplot_data = false\n", overrides=Overrides(plot_data_default=True))
    assert sc.plot_data is False


def test_replace_sources_override():
    spec = ReplaySpec("probe", "x.csv")
    sc = parse_config(SMALL, overrides=Overrides(replace_sources=(spec,)))
    assert sc.sources == (spec,)


# ------------------------------------------------------------ round trip


def test_serialize_parse_fixpoint_small():
    sc = parse_config(SMALL)
    text = serialize_scenario(sc)
    again = parse_config(text)
    assert again == sc
    assert serialize_scenario(again) == text


def test_serialize_parse_fixpoint_table2(table2_cfg_path):
    sc = load_config(table2_cfg_path)
    text = serialize_scenario(sc)
    again = parse_config(text)
    assert again == sc
    assert serialize_scenario(again) == text


def test_table2_scenario_contents(table2_cfg_path):
    sc = load_config(table2_cfg_path)
    assert sc.seed == 42
    assert sc.duration_ms == 10_000_000.0
    assert sc.message_size_bytes == 100
    assert sc.mode == "both"
    assert sc.grid == (FilterConfig(10, 0.05),)
    assert validate(sc.topology) == []
    assert [d.id for d in sc.topology.sensors()] == ["S1", "S2", "S3", "S4", "S5", "S6"]
    latencies = {(l.src, l.dst): l.latency_ms for l in sc.topology.links}
    assert latencies[("S1", "gw")] == 4.0
    assert latencies[("gw", "cloud")] == 50.0
    assert [s.seed for s in sc.sources] == [43, 44, 45, 46, 47, 48]
    assert [(s.mean, s.stddev) for s in sc.sources] == [
        (25.0, 4.0),
        (29.0, 8.0),
        (24.0, 2.0),
        (20.0, 6.0),
        (28.0, 1.0),
        (22.0, 6.0),
    ]


def test_serialize_rejects_non_product_grid():
    sc = parse_config(MINIMAL)
    sc.grid = (FilterConfig(10, 0.05), FilterConfig(50, 0.1))
    with pytest.raises(ValueError, match="not an n-major product"):
        serialize_scenario(sc)


def test_serialized_floats_survive_reparse():
    text = "[run]\nduration_ms = 0.30000000000000004\n\n[filter]\np = 0.1,0.2\n"
    sc = parse_config(text)
    assert sc.duration_ms == 0.30000000000000004
    again = parse_config(serialize_scenario(sc))
    assert again.duration_ms == sc.duration_ms
    assert again.grid == sc.grid


def test_energy_overrides_apply():
    text = "[run]\n\n[energy]\nsensor_busy_w = 2.5\nsensor_idle_w = 0.5\n"
    sc = parse_config(text)
    params = sc.energy.for_kind("sensor")
    assert (params.busy_w, params.idle_w) == (2.5, 0.5)
    # Untouched kinds keep their defaults.
    assert sc.energy.for_kind("cloud").busy_w == 107.339


def test_scenario_equality_is_field_wise():
    assert parse_config(SMALL) == parse_config(SMALL)
    assert parse_config(SMALL) != parse_config(SMALL.replace("seed = 7", "seed = 8"))
    assert isinstance(parse_config(SMALL), Scenario)
