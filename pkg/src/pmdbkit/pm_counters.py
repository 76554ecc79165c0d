"""Per-node pm_counters virtual file directory.

Seven files per node, refreshed on a 100 ms tick (10 Hz): point-in-time power,
accumulated energy, a generation counter that bumps whenever the power cap
changes, a startup counter, the free-running freshness counter, a version
number, and the current power cap (0 means uncapped). Power and energy carry
a unit suffix ("43 W", "18328219 J"); the counters are bare integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import MalformedContent, UnitMismatch
from .sensors import SensorId, parse_sensor_path
from .simulator import Simulator

TICK_MS = 100

FILE_NAMES = ("power", "energy", "generation", "startup", "freshness", "version", "power_cap")

_UNITS = {"power": "W", "energy": "J"}


@dataclass(frozen=True)
class PmCountersSnapshot:
    power_w: int
    energy_j: int
    generation: int
    startup: int
    freshness: int
    version: int
    power_cap_w: int

    def __post_init__(self) -> None:
        for name in ("power_w", "energy_j", "generation", "startup", "freshness",
                     "version", "power_cap_w"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def render_files(snapshot: PmCountersSnapshot) -> dict[str, str]:
    """Map of file name to bit-exact content."""
    return {
        "power": f"{snapshot.power_w} W\n",
        "energy": f"{snapshot.energy_j} J\n",
        "generation": f"{snapshot.generation}\n",
        "startup": f"{snapshot.startup}\n",
        "freshness": f"{snapshot.freshness}\n",
        "version": f"{snapshot.version}\n",
        "power_cap": f"{snapshot.power_cap_w}\n",
    }


_CONTENT_RE = re.compile(r"(\d+)(?:[ \t]+([A-Za-z]+))?\n?")


def parse_file(name: str, content: str) -> int:
    """Inverse of render_files for one file; parse(render(x)) == x."""
    if name not in FILE_NAMES:
        raise ValueError(f"unknown pm_counters file {name!r}")
    m = _CONTENT_RE.fullmatch(content)
    if not m:
        raise MalformedContent(f"{name}: cannot parse {content!r}")
    value, unit = int(m.group(1)), m.group(2)
    expected = _UNITS.get(name)
    if expected is None:
        if unit is not None:
            raise MalformedContent(f"{name}: counter file must be a bare integer, got {content!r}")
    elif unit is None:
        raise MalformedContent(f"{name}: missing {expected!r} unit in {content!r}")
    elif unit != expected:
        raise UnitMismatch(f"{name}: expected unit {expected!r}, got {unit!r}")
    return value


def parse_snapshot(files: dict[str, str]) -> PmCountersSnapshot:
    missing = [n for n in FILE_NAMES if n not in files]
    if missing:
        raise MalformedContent(f"missing pm_counters files: {missing}")
    return PmCountersSnapshot(
        power_w=parse_file("power", files["power"]),
        energy_j=parse_file("energy", files["energy"]),
        generation=parse_file("generation", files["generation"]),
        startup=parse_file("startup", files["startup"]),
        freshness=parse_file("freshness", files["freshness"]),
        version=parse_file("version", files["version"]),
        power_cap_w=parse_file("power_cap", files["power_cap"]),
    )


def poll(sim: Simulator, node: SensorId | str, t_ms: int) -> PmCountersSnapshot:
    """Snapshot for one node, quantized to the most recent 100 ms tick.

    Freshness is the tick index since startup, so two polls inside the same
    tick return identical snapshots. Values are truncated to integers the way
    the register files show them.
    """
    if isinstance(node, str):
        node = parse_sensor_path(node)
    if t_ms < 0 or (sim.horizon_ms is not None and t_ms > sim.horizon_ms):
        raise ValueError(f"t={t_ms} ms outside the simulated horizon")
    tick = t_ms // TICK_MS
    tick_ms = tick * TICK_MS
    node_side, gpu_side = sim.node_dc_power_at(node, tick_ms)
    energy = sim.cumulative_node_energy_j(node, tick_ms)
    cap, generation = sim.power_cap_state_at(node, tick_ms)
    return PmCountersSnapshot(
        power_w=int(node_side + gpu_side),
        energy_j=int(energy),
        generation=generation,
        startup=sim.startup_counter,
        freshness=tick,
        version=sim.pm_version,
        power_cap_w=cap,
    )


def materialize(snapshot: PmCountersSnapshot, root: str | Path) -> Path:
    """Write the snapshot as a real pm_counters/ directory tree; returns its path."""
    directory = Path(root) / "pm_counters"
    directory.mkdir(parents=True, exist_ok=True)
    for name, content in render_files(snapshot).items():
        (directory / name).write_text(content, encoding="utf-8")
    return directory
