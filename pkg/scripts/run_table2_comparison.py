#!/usr/bin/env python3
"""Run the six-sensor comparison scenario and print the measured reductions.

Both pipelines run on identical streams: every raw sample forwarded, versus
dead-band filtering on the sensors.  The table shows what the filter does to
traffic and reconstruction error per sensor, then what that does to network
and cloud-energy totals.  Band widths can be swept with --p.

    python scripts/run_table2_comparison.py
    python scripts/run_table2_comparison.py --p 0.05 0.1 0.2
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from mistsim.config import load_config
from mistsim.engine import Mode, compare, run
from mistsim.mist_filter import FilterConfig
from mistsim.sources import gen_normal


def fmt_pct(value) -> str:
    return "n/a" if value is None else f"{value:8.3f}%"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--config",
        default=str(Path(__file__).resolve().parent.parent / "table2.cfg"),
        help="scenario file (default: the shipped table2.cfg)",
    )
    parser.add_argument(
        "--p",
        nargs="+",
        type=float,
        default=None,
        help="band fractions to sweep (default: the configured value)",
    )
    args = parser.parse_args()

    scenario = load_config(args.config)
    streams = {spec.device_id: gen_normal(spec) for spec in scenario.sources}
    n = scenario.filter_config().n
    p_values = args.p if args.p is not None else [scenario.filter_config().p]

    started = time.perf_counter()
    baseline = run(
        scenario.topology,
        streams,
        Mode.CLOUD_ONLY,
        scenario.filter_config(),
        scenario.energy,
        scenario.duration_ms,
        message_size_bytes=scenario.message_size_bytes,
        seed=scenario.seed,
    )
    print(f"scenario: {args.config}")
    print(
        f"seed {scenario.seed}, {len(streams)} sensors x "
        f"{max(len(s) for s in streams.values())} samples, "
        f"{scenario.message_size_bytes} B per message"
    )
    print(
        f"\ncloud-only baseline: {baseline.messages_emitted} messages, "
        f"{baseline.total_bytes} bytes, "
        f"cloud energy {baseline.device_energy_j[baseline.cloud_id]:.1f} J"
    )

    for p in p_values:
        fc = FilterConfig(n=n, p=p)
        mist = run(
            scenario.topology,
            streams,
            Mode.MIST_FOG_CLOUD,
            fc,
            scenario.energy,
            scenario.duration_ms,
            message_size_bytes=scenario.message_size_bytes,
            seed=scenario.seed,
        )
        print(f"\nfiltered, n={n} p={p}")
        print(f"  {'sensor':<8}{'total':>8}{'sent':>8}{'reduction':>11}{'avg err':>10}{'max err':>10}")
        for sensor_id in sorted(mist.sensor_reports):
            rep = mist.sensor_reports[sensor_id]
            reduction = 100.0 * rep.suppressed_count / rep.total_count
            print(
                f"  {sensor_id:<8}{rep.total_count:>8}{rep.transmitted_count:>8}"
                f"{reduction:>10.2f}%{rep.avg_abs_error:>10.3f}{rep.max_abs_error:>10.3f}"
            )
        rows = compare(baseline, mist)
        print(f"  network bytes   {fmt_pct(rows['network_total_bytes']['reduction_percent'])}")
        print(f"  byte x latency  {fmt_pct(rows['network_total_byte_ms']['reduction_percent'])}")
        print(f"  cloud messages  {fmt_pct(rows['cloud_messages']['reduction_percent'])}")
        print(f"  cloud energy    {fmt_pct(rows['cloud_energy_j']['reduction_percent'])}")

    print(f"\ntotal wall time {time.perf_counter() - started:.2f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
