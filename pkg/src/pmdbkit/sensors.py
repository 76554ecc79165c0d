"""Sensor identities and the sensor path grammar.

Every sensor in a cluster is addressed by a short slash path:

    node/c<cab>/n<node>     compute node (CPU side, excludes the GPU component)
    gpu/c<cab>/n<node>      GPU component of a compute node
    aries/c<cab>/b<blade>   network chip, one per 4-node blade
    blower/<idx>            cooling blower (system level, not per cabinet)
    svc/c<cab>              aggregate of a cabinet's service nodes
    extmeter/main           AC-side facility power meter
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class SensorDomain(Enum):
    NODE = "node"
    NODE_GPU = "gpu"
    ARIES_BLADE = "aries"
    BLOWER = "blower"
    CABINET_SERVICE = "svc"
    EXTERNAL_METER = "extmeter"


_REQUIRED_FIELDS = {
    SensorDomain.NODE: ("cabinet", "node"),
    SensorDomain.NODE_GPU: ("cabinet", "node"),
    SensorDomain.ARIES_BLADE: ("cabinet", "blade"),
    SensorDomain.BLOWER: ("blower",),
    SensorDomain.CABINET_SERVICE: ("cabinet",),
    SensorDomain.EXTERNAL_METER: (),
}

_INDEX_FIELDS = ("cabinet", "node", "blade", "blower")


@dataclass(frozen=True)
class SensorId:
    """One hardware sensor; index fields are set exactly when the domain needs them."""

    domain: SensorDomain
    cabinet: int | None = None
    node: int | None = None
    blade: int | None = None
    blower: int | None = None

    def __post_init__(self) -> None:
        required = _REQUIRED_FIELDS[self.domain]
        for name in _INDEX_FIELDS:
            value = getattr(self, name)
            if name in required:
                if value is None or value < 0:
                    raise ValueError(
                        f"{self.domain.value} sensor requires a non-negative {name!r} index"
                    )
            elif value is not None:
                raise ValueError(f"{self.domain.value} sensor does not take {name!r}")

    @property
    def path(self) -> str:
        d = self.domain
        if d is SensorDomain.NODE:
            return f"node/c{self.cabinet}/n{self.node}"
        if d is SensorDomain.NODE_GPU:
            return f"gpu/c{self.cabinet}/n{self.node}"
        if d is SensorDomain.ARIES_BLADE:
            return f"aries/c{self.cabinet}/b{self.blade}"
        if d is SensorDomain.BLOWER:
            return f"blower/{self.blower}"
        if d is SensorDomain.CABINET_SERVICE:
            return f"svc/c{self.cabinet}"
        return "extmeter/main"

    def __str__(self) -> str:
        return self.path


def node_sensor(cabinet: int, node: int) -> SensorId:
    return SensorId(SensorDomain.NODE, cabinet=cabinet, node=node)


def gpu_sensor(cabinet: int, node: int) -> SensorId:
    return SensorId(SensorDomain.NODE_GPU, cabinet=cabinet, node=node)


def aries_sensor(cabinet: int, blade: int) -> SensorId:
    return SensorId(SensorDomain.ARIES_BLADE, cabinet=cabinet, blade=blade)


def blower_sensor(index: int) -> SensorId:
    return SensorId(SensorDomain.BLOWER, blower=index)


def service_sensor(cabinet: int) -> SensorId:
    return SensorId(SensorDomain.CABINET_SERVICE, cabinet=cabinet)


def external_meter_sensor() -> SensorId:
    return SensorId(SensorDomain.EXTERNAL_METER)


_PATH_PATTERNS = (
    (re.compile(r"node/c(\d+)/n(\d+)$"), lambda m: node_sensor(int(m[1]), int(m[2]))),
    (re.compile(r"gpu/c(\d+)/n(\d+)$"), lambda m: gpu_sensor(int(m[1]), int(m[2]))),
    (re.compile(r"aries/c(\d+)/b(\d+)$"), lambda m: aries_sensor(int(m[1]), int(m[2]))),
    (re.compile(r"blower/(\d+)$"), lambda m: blower_sensor(int(m[1]))),
    (re.compile(r"svc/c(\d+)$"), lambda m: service_sensor(int(m[1]))),
    (re.compile(r"extmeter/main$"), lambda m: external_meter_sensor()),
)


def parse_sensor_path(path: str) -> SensorId:
    for pattern, build in _PATH_PATTERNS:
        m = pattern.fullmatch(path)
        if m:
            return build(m)
    raise ValueError(f"not a sensor path: {path!r}")
