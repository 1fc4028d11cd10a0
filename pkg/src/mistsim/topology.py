"""Three-tier device graph: sensors feed a gateway, gateways feed the cloud.

Only trees are supported.  Each sensor has exactly one link, to a gateway;
each gateway has exactly one uplink, to the single cloud.  Uplink/downlink
rates and RAM are carried as descriptive capacity figures and reported
as-is; the simulator does not model bandwidth saturation or memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

KINDS = ("cloud", "gateway", "sensor")

# Conventional level per kind; validation only requires the ordering
# cloud < gateway < sensor, not these exact numbers.
DEFAULT_LEVELS = {"cloud": 0, "gateway": 1, "sensor": 2}


@dataclass(frozen=True)
class Device:
    id: str
    kind: str
    level: int
    uplink_kbps: float = 0.0
    downlink_kbps: float = 0.0
    ram_mb: float = 0.0

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("device id must be non-empty")
        if self.kind not in KINDS:
            raise ValueError(f"device kind must be one of {KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class Link:
    """Undirected edge; ``latency_ms`` applies per message in either direction."""

    src: str
    dst: str
    latency_ms: float


@dataclass
class Topology:
    """Devices and links in declaration order (order matters for tie-breaks)."""

    devices: list[Device] = field(default_factory=list)
    links: list[Link] = field(default_factory=list)

    def device(self, device_id: str) -> Device:
        for dev in self.devices:
            if dev.id == device_id:
                return dev
        raise KeyError(f"no device with id {device_id!r}")

    def by_kind(self, kind: str) -> list[Device]:
        return [d for d in self.devices if d.kind == kind]

    def sensors(self) -> list[Device]:
        return self.by_kind("sensor")

    def cloud(self) -> Device:
        clouds = self.by_kind("cloud")
        if len(clouds) != 1:
            raise ValueError(f"expected exactly one cloud device, found {len(clouds)}")
        return clouds[0]

    def links_of(self, device_id: str) -> list[Link]:
        return [l for l in self.links if device_id in (l.src, l.dst)]

    def uplink_path(self, sensor_id: str) -> list[Link]:
        """Links from a sensor up to the cloud: sensor->gateway, gateway->cloud.

        Only valid on a topology that passes :func:`validate`.
        """
        sensor = self.device(sensor_id)
        if sensor.kind != "sensor":
            raise ValueError(f"{sensor_id!r} is not a sensor")
        first = self.links_of(sensor_id)
        if len(first) != 1:
            raise ValueError(f"sensor {sensor_id!r} must have exactly one link")
        gw_id = first[0].dst if first[0].src == sensor_id else first[0].src
        gateway = self.device(gw_id)
        if gateway.kind != "gateway":
            raise ValueError(f"sensor {sensor_id!r} is not linked to a gateway")
        cloud_id = self.cloud().id
        for link in self.links_of(gw_id):
            if cloud_id in (link.src, link.dst):
                return [first[0], link]
        raise ValueError(f"gateway {gw_id!r} has no uplink to the cloud")


def validate(topology: Topology) -> list[str]:
    """Return every violation found, as readable strings; empty means valid.

    Deterministic and order independent: shuffling declaration order yields
    the same (sorted) violation list.
    """
    violations: list[str] = []
    devices = topology.devices
    ids = [d.id for d in devices]
    by_id = {d.id: d for d in devices}

    for dup in sorted({i for i in ids if ids.count(i) > 1}):
        violations.append(f"duplicate device id {dup!r}")

    clouds = topology.by_kind("cloud")
    if len(clouds) != 1:
        violations.append(f"expected exactly one cloud device, found {len(clouds)}")

    gateways = topology.by_kind("gateway")
    sensors = topology.by_kind("sensor")
    for cloud in clouds:
        for gw in gateways:
            if not cloud.level < gw.level:
                violations.append(
                    f"level ordering broken: cloud {cloud.id!r} level {cloud.level} "
                    f"must be below gateway {gw.id!r} level {gw.level}"
                )
    for gw in gateways:
        for sensor in sensors:
            if not gw.level < sensor.level:
                violations.append(
                    f"level ordering broken: gateway {gw.id!r} level {gw.level} "
                    f"must be below sensor {sensor.id!r} level {sensor.level}"
                )

    for dev in devices:
        for name, value in (
            ("uplink_kbps", dev.uplink_kbps),
            ("downlink_kbps", dev.downlink_kbps),
            ("ram_mb", dev.ram_mb),
        ):
            if not math.isfinite(value) or value < 0:
                violations.append(f"device {dev.id!r}: {name} must be finite and >= 0")

    usable_links: list[Link] = []
    for link in topology.links:
        ok = True
        for end in (link.src, link.dst):
            if end not in by_id:
                violations.append(f"link {link.src!r}->{link.dst!r}: unknown device {end!r}")
                ok = False
        if link.src == link.dst:
            violations.append(f"link {link.src!r}->{link.dst!r}: endpoints must differ")
            ok = False
        if not math.isfinite(link.latency_ms) or link.latency_ms < 0:
            violations.append(
                f"link {link.src!r}->{link.dst!r}: latency must be finite and >= 0"
            )
            ok = False
        if ok:
            usable_links.append(link)

    def kind_of(device_id: str) -> str:
        return by_id[device_id].kind

    for link in usable_links:
        pair = tuple(sorted((kind_of(link.src), kind_of(link.dst))))
        if pair not in (("gateway", "sensor"), ("cloud", "gateway")):
            violations.append(
                f"link {link.src!r}->{link.dst!r}: only sensor-gateway and "
                f"gateway-cloud links are allowed, got {pair[0]}-{pair[1]}"
            )

    incident: dict[str, list[Link]] = {d.id: [] for d in devices}
    for link in usable_links:
        if link.src in incident and link.dst in incident:
            incident[link.src].append(link)
            incident[link.dst].append(link)

    for sensor in sensors:
        n_links = len(incident.get(sensor.id, []))
        if n_links != 1:
            violations.append(
                f"sensor {sensor.id!r} must have exactly one link, found {n_links}"
            )
    cloud_ids = {c.id for c in clouds}
    for gw in gateways:
        uplinks = [
            l
            for l in incident.get(gw.id, [])
            if (l.src in cloud_ids or l.dst in cloud_ids)
        ]
        if len(uplinks) != 1:
            violations.append(
                f"gateway {gw.id!r} must have exactly one uplink to the cloud, "
                f"found {len(uplinks)}"
            )

    # Tree check: connected from the cloud and edge count one below node count.
    if len(clouds) == 1 and not violations:
        seen = {clouds[0].id}
        frontier = [clouds[0].id]
        while frontier:
            current = frontier.pop()
            for link in incident[current]:
                peer = link.dst if link.src == current else link.src
                if peer not in seen:
                    seen.add(peer)
                    frontier.append(peer)
        for dev in devices:
            if dev.id not in seen:
                violations.append(f"device {dev.id!r} is not reachable from the cloud")
        if len(usable_links) != len(devices) - 1:
            violations.append(
                f"not a tree: {len(devices)} devices need {len(devices) - 1} links, "
                f"found {len(usable_links)}"
            )

    return sorted(violations)
