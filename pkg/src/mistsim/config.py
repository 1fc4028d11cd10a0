"""Flat INI-style configuration: one file describes a whole scenario.

Section grammar (full key reference in ``docs/config_format.md``)::

    [run]                    seed, duration_ms, message_size_bytes, mode, plot_data
    [filter]                 n, p (comma-separated lists sweep the filter grid)
    [energy]                 <kind>_busy_w, <kind>_idle_w, <kind>_busy_ms_per_message
    [device <id>]            kind, level, uplink_kbps, downlink_kbps, ram_mb
    [link <src> <dst>]       latency_ms
    [source <device_id>]     kind=normal: mean, stddev, period_ms, count, seed
                             kind=replay: file, value_column, timestamp_column,
                                          delimiter, expected_period

Unknown sections or keys are hard errors, never silently ignored.  Loading
a file, serializing the result, and loading it again reproduces the same
scenario (and the identical topology), which is what lets a report's config
echo re-run bit-for-bit.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from .engine import DEFAULT_ENERGY_PARAMS, EnergyModel, EnergyParams
from .mist_filter import FilterConfig
from .rng import derive_seed
from .sources import ReplaySpec, SensorSpec, SourceSpec
from .topology import DEFAULT_LEVELS, KINDS, Device, Link, Topology

MODES = ("both", "cloud_only", "mist_fog_cloud")

DEFAULT_SEED = 42
DEFAULT_MESSAGE_SIZE = 100


class ConfigError(ValueError):
    """A config file could not be parsed or failed validation."""


@dataclass(frozen=True)
class Overrides:
    """Command-line knobs folded in during parsing, before seed resolution."""

    seed: Optional[int] = None
    n_values: Optional[tuple[int, ...]] = None
    p_values: Optional[tuple[float, ...]] = None
    mode: Optional[str] = None
    plot_data_default: Optional[bool] = None
    replace_sources: Optional[tuple[SourceSpec, ...]] = None


@dataclass
class Scenario:
    """A fully resolved run description."""

    topology: Topology
    sources: tuple[SourceSpec, ...]
    grid: tuple[FilterConfig, ...]
    energy: EnergyModel
    seed: int
    duration_ms: Optional[float]
    message_size_bytes: int
    mode: str
    plot_data: Optional[bool]

    def filter_config(self) -> FilterConfig:
        """The single grid point, for commands that do not sweep."""
        if len(self.grid) != 1:
            raise ConfigError(
                f"this command needs exactly one (n, p) pair, got {len(self.grid)}"
            )
        return self.grid[0]


def _section_error(origin: str, section: str, message: str) -> ConfigError:
    return ConfigError(f"{origin}: [{section}]: {message}")


def _check_keys(origin: str, section: str, present: Sequence[str], allowed: Sequence[str]) -> None:
    unknown = sorted(set(present) - set(allowed))
    if unknown:
        raise _section_error(
            origin, section, f"unknown keys {unknown}; allowed keys are {sorted(allowed)}"
        )


def _get_float(origin: str, section: str, raw: dict, key: str, default=None) -> Optional[float]:
    if key not in raw:
        return default
    try:
        return float(raw[key])
    except ValueError:
        raise _section_error(origin, section, f"{key} must be a number, got {raw[key]!r}") from None


def _get_int(origin: str, section: str, raw: dict, key: str, default=None) -> Optional[int]:
    if key not in raw:
        return default
    try:
        return int(raw[key])
    except ValueError:
        raise _section_error(
            origin, section, f"{key} must be an integer, got {raw[key]!r}"
        ) from None


def _get_bool(origin: str, section: str, raw: dict, key: str, default=None) -> Optional[bool]:
    if key not in raw:
        return default
    text = raw[key].strip().lower()
    if text in ("true", "yes", "on", "1"):
        return True
    if text in ("false", "no", "off", "0"):
        return False
    raise _section_error(origin, section, f"{key} must be a boolean, got {raw[key]!r}")


def _decode_delimiter(value: str) -> str:
    return "\t" if value == "\\t" else value


def _encode_delimiter(value: str) -> str:
    return "\\t" if value == "\t" else value


def parse_config(
    text: str, origin: str = "<config>", overrides: Optional[Overrides] = None
) -> Scenario:
    """Parse config text into a resolved :class:`Scenario`.

    Resolution fills every default: filter grid, per-source seeds (derived as
    ``seed + i`` for the i-th declared source, 1-based, unless the source
    pins its own), and the run duration (largest ``count * period_ms`` when
    every source is synthetic, otherwise left unset).
    """
    ov = overrides or Overrides()
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str  # keys are case sensitive
    try:
        parser.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    if parser.defaults():
        raise ConfigError(f"{origin}: a [DEFAULT] section is not supported")
    if not parser.sections():
        raise ConfigError(f"{origin}: empty config, at least a [run] section is required")

    devices: list[Device] = []
    links: list[Link] = []
    raw_sources: list[tuple[str, dict]] = []
    run_raw: dict = {}
    filter_raw: dict = {}
    energy_raw: dict = {}

    for section in parser.sections():
        tokens = section.split()
        raw = dict(parser[section])
        head = tokens[0] if tokens else ""
        if head == "run" and len(tokens) == 1:
            run_raw = raw
        elif head == "filter" and len(tokens) == 1:
            filter_raw = raw
        elif head == "energy" and len(tokens) == 1:
            energy_raw = raw
        elif head == "device" and len(tokens) == 2:
            devices.append(_parse_device(origin, section, tokens[1], raw))
        elif head == "link" and len(tokens) == 3:
            links.append(_parse_link(origin, section, tokens[1], tokens[2], raw))
        elif head == "source" and len(tokens) == 2:
            raw_sources.append((tokens[1], raw))
        else:
            raise ConfigError(
                f"{origin}: unknown section [{section}]; expected [run], [filter], "
                f"[energy], [device <id>], [link <src> <dst>] or [source <id>]"
            )

    _check_keys(
        origin, "run", run_raw, ("seed", "duration_ms", "message_size_bytes", "mode", "plot_data")
    )
    seed = ov.seed if ov.seed is not None else _get_int(origin, "run", run_raw, "seed", DEFAULT_SEED)
    if not 0 <= seed < 1 << 64:
        raise _section_error(origin, "run", f"seed must fit in 64 bits, got {seed!r}")
    duration_ms = _get_float(origin, "run", run_raw, "duration_ms")
    if duration_ms is not None and duration_ms <= 0:
        raise _section_error(origin, "run", f"duration_ms must be > 0, got {duration_ms!r}")
    message_size = _get_int(origin, "run", run_raw, "message_size_bytes", DEFAULT_MESSAGE_SIZE)
    if message_size < 1:
        raise _section_error(origin, "run", f"message_size_bytes must be >= 1, got {message_size!r}")
    mode = ov.mode if ov.mode is not None else run_raw.get("mode", "both")
    if mode not in MODES:
        raise _section_error(origin, "run", f"mode must be one of {MODES}, got {mode!r}")
    plot_data = _get_bool(origin, "run", run_raw, "plot_data", ov.plot_data_default)

    grid = _parse_filter_grid(origin, filter_raw, ov)
    energy = _parse_energy(origin, energy_raw)

    sources: list[SourceSpec]
    if ov.replace_sources is not None:
        sources = list(ov.replace_sources)
    else:
        sources = _build_sources(origin, raw_sources, seed)

    if duration_ms is None and sources and all(isinstance(s, SensorSpec) for s in sources):
        duration_ms = max(s.count * s.period_ms for s in sources)
        if duration_ms <= 0:
            duration_ms = None

    return Scenario(
        topology=Topology(devices=devices, links=links),
        sources=tuple(sources),
        grid=grid,
        energy=energy,
        seed=seed,
        duration_ms=duration_ms,
        message_size_bytes=message_size,
        mode=mode,
        plot_data=plot_data,
    )


def _parse_device(origin: str, section: str, device_id: str, raw: dict) -> Device:
    _check_keys(origin, section, raw, ("kind", "level", "uplink_kbps", "downlink_kbps", "ram_mb"))
    kind = raw.get("kind")
    if kind not in KINDS:
        raise _section_error(origin, section, f"kind must be one of {KINDS}, got {kind!r}")
    level = _get_int(origin, section, raw, "level", DEFAULT_LEVELS[kind])
    try:
        return Device(
            id=device_id,
            kind=kind,
            level=level,
            uplink_kbps=_get_float(origin, section, raw, "uplink_kbps", 0.0),
            downlink_kbps=_get_float(origin, section, raw, "downlink_kbps", 0.0),
            ram_mb=_get_float(origin, section, raw, "ram_mb", 0.0),
        )
    except ValueError as exc:
        raise _section_error(origin, section, str(exc)) from None


def _parse_link(origin: str, section: str, src: str, dst: str, raw: dict) -> Link:
    _check_keys(origin, section, raw, ("latency_ms",))
    latency = _get_float(origin, section, raw, "latency_ms")
    if latency is None:
        raise _section_error(origin, section, "latency_ms is required")
    return Link(src=src, dst=dst, latency_ms=latency)


def _parse_filter_grid(origin: str, filter_raw: dict, ov: Overrides) -> tuple[FilterConfig, ...]:
    _check_keys(origin, "filter", filter_raw, ("n", "p"))

    def parse_list(key: str, conv, fallback):
        if key in filter_raw:
            cells = [c.strip() for c in filter_raw[key].split(",") if c.strip()]
            if not cells:
                raise _section_error(origin, "filter", f"{key} must list at least one value")
            try:
                return tuple(conv(c) for c in cells)
            except ValueError:
                raise _section_error(
                    origin, "filter", f"{key} must be comma-separated numbers, got {filter_raw[key]!r}"
                ) from None
        return fallback

    n_values = ov.n_values if ov.n_values is not None else parse_list("n", int, (10,))
    p_values = ov.p_values if ov.p_values is not None else parse_list("p", float, (0.05,))
    try:
        return tuple(FilterConfig(n=n, p=p) for n in n_values for p in p_values)
    except ValueError as exc:
        raise _section_error(origin, "filter", str(exc)) from None


def _parse_energy(origin: str, energy_raw: dict) -> EnergyModel:
    fields = ("busy_w", "idle_w", "busy_ms_per_message")
    allowed = [f"{kind}_{field}" for kind in KINDS for field in fields]
    _check_keys(origin, "energy", energy_raw, allowed)
    params = {}
    for kind in KINDS:
        defaults = DEFAULT_ENERGY_PARAMS[kind]
        values = {
            field: _get_float(origin, "energy", energy_raw, f"{kind}_{field}", getattr(defaults, field))
            for field in fields
        }
        try:
            params[kind] = EnergyParams(**values)
        except ValueError as exc:
            raise _section_error(origin, "energy", f"{kind}: {exc}") from None
    return EnergyModel(params=params)


def _build_sources(
    origin: str, raw_sources: list[tuple[str, dict]], seed_base: int
) -> list[SourceSpec]:
    sources: list[SourceSpec] = []
    seen: set[str] = set()
    for ordinal, (device_id, raw) in enumerate(raw_sources, start=1):
        section = f"source {device_id}"
        if device_id in seen:
            raise _section_error(origin, section, "duplicate source for this device")
        seen.add(device_id)
        kind = raw.get("kind")
        if kind == "normal":
            _check_keys(origin, section, raw, ("kind", "mean", "stddev", "period_ms", "count", "seed"))
            try:
                spec = SensorSpec(
                    device_id=device_id,
                    mean=_get_float(origin, section, raw, "mean", 0.0),
                    stddev=_get_float(origin, section, raw, "stddev", 1.0),
                    period_ms=_get_float(origin, section, raw, "period_ms", 1000.0),
                    count=_get_int(origin, section, raw, "count", 10_000),
                    seed=_get_int(origin, section, raw, "seed", derive_seed(seed_base, ordinal)),
                )
            except ValueError as exc:
                raise _section_error(origin, section, str(exc)) from None
        elif kind == "replay":
            _check_keys(
                origin,
                section,
                raw,
                ("kind", "file", "value_column", "timestamp_column", "delimiter", "expected_period"),
            )
            if "file" not in raw:
                raise _section_error(origin, section, "file is required for replay sources")
            try:
                spec = ReplaySpec(
                    device_id=device_id,
                    path=raw["file"],
                    value_column=raw.get("value_column", "value"),
                    timestamp_column=raw.get("timestamp_column", "timestamp"),
                    delimiter=_decode_delimiter(raw.get("delimiter", ",")),
                    expected_period=_get_float(origin, section, raw, "expected_period"),
                )
            except ValueError as exc:
                raise _section_error(origin, section, str(exc)) from None
        else:
            raise _section_error(
                origin, section, f"kind must be 'normal' or 'replay', got {kind!r}"
            )
        sources.append(spec)
    return sources


def load_config(path: str | Path, overrides: Optional[Overrides] = None) -> Scenario:
    """Read and parse a config file.  See :func:`parse_config`."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return parse_config(text, origin=str(path), overrides=overrides)


def _grid_lists(grid: tuple[FilterConfig, ...]) -> tuple[list[int], list[float]]:
    """Recover the n and p lists (declaration order) behind a product grid."""
    n_values = list(dict.fromkeys(cfg.n for cfg in grid))
    p_values = list(dict.fromkeys(cfg.p for cfg in grid))
    product = tuple(FilterConfig(n=n, p=p) for n in n_values for p in p_values)
    if product != tuple(grid):
        raise ValueError("filter grid is not an n-major product of its n and p values")
    return n_values, p_values


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical config text for a scenario; parsing it back is the identity.

    Every resolved value is written explicitly (seeds, defaults, grid), so
    the output is a complete standalone description of the run.
    """
    lines: list[str] = []

    lines.append("[run]")
    lines.append(f"seed = {scenario.seed}")
    if scenario.duration_ms is not None:
        lines.append(f"duration_ms = {_fmt(scenario.duration_ms)}")
    lines.append(f"message_size_bytes = {scenario.message_size_bytes}")
    lines.append(f"mode = {scenario.mode}")
    if scenario.plot_data is not None:
        lines.append(f"plot_data = {_fmt(scenario.plot_data)}")
    lines.append("")

    n_values, p_values = _grid_lists(scenario.grid)
    lines.append("[filter]")
    lines.append("n = " + ",".join(str(n) for n in n_values))
    lines.append("p = " + ",".join(repr(p) for p in p_values))
    lines.append("")

    lines.append("[energy]")
    for kind in KINDS:
        params = scenario.energy.for_kind(kind)
        lines.append(f"{kind}_busy_w = {_fmt(params.busy_w)}")
        lines.append(f"{kind}_idle_w = {_fmt(params.idle_w)}")
        lines.append(f"{kind}_busy_ms_per_message = {_fmt(params.busy_ms_per_message)}")
    lines.append("")

    for dev in scenario.topology.devices:
        lines.append(f"[device {dev.id}]")
        lines.append(f"kind = {dev.kind}")
        lines.append(f"level = {dev.level}")
        lines.append(f"uplink_kbps = {_fmt(dev.uplink_kbps)}")
        lines.append(f"downlink_kbps = {_fmt(dev.downlink_kbps)}")
        lines.append(f"ram_mb = {_fmt(dev.ram_mb)}")
        lines.append("")

    for link in scenario.topology.links:
        lines.append(f"[link {link.src} {link.dst}]")
        lines.append(f"latency_ms = {_fmt(link.latency_ms)}")
        lines.append("")

    for source in scenario.sources:
        lines.append(f"[source {source.device_id}]")
        if isinstance(source, SensorSpec):
            lines.append("kind = normal")
            lines.append(f"mean = {_fmt(source.mean)}")
            lines.append(f"stddev = {_fmt(source.stddev)}")
            lines.append(f"period_ms = {_fmt(source.period_ms)}")
            lines.append(f"count = {source.count}")
            lines.append(f"seed = {source.seed}")
        else:
            lines.append("kind = replay")
            lines.append(f"file = {source.path}")
            lines.append(f"value_column = {source.value_column}")
            lines.append(f"timestamp_column = {source.timestamp_column}")
            lines.append(f"delimiter = {_encode_delimiter(source.delimiter)}")
            if source.expected_period is not None:
                lines.append(f"expected_period = {_fmt(source.expected_period)}")
        lines.append("")

    return "\n".join(lines)
