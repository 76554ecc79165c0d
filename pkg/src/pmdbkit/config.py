"""Scenario config files (TOML or JSON) describing a simulator run.

Top-level keys: seed, horizon_s, service_node_watts, aries_watts_per_blade,
acdc_efficiency, plus [topology], [node_model], [blower_model] tables and a
[[profiles]] list. A profile selects nodes either explicitly
(``nodes = ["node/c0/n0", ...]``) or by cabinet (``cabinet = 0`` with optional
``node_first``/``node_count``), and may carry job identity (apid, jobid,
cmdname) so the run doubles as a job manifest.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .jobs import JobRegistry
from .sensors import SensorId, node_sensor, parse_sensor_path
from .simulator import (
    BlowerModel,
    ClusterTopology,
    NodePowerModel,
    Simulator,
    WorkloadProfile,
    build_cluster,
)


@dataclass(frozen=True)
class ProfileEntry:
    profile: WorkloadProfile
    apid: int | None = None
    jobid: int = 0
    cmdname: str = "./a.out"


@dataclass(frozen=True)
class ScenarioConfig:
    topology: ClusterTopology
    node_model: NodePowerModel
    blower_model: BlowerModel
    seed: int
    horizon_s: int
    service_node_watts: float = 25.0
    aries_watts_per_blade: float = 100.0
    acdc_efficiency: float = 0.95
    profiles: tuple[ProfileEntry, ...] = ()

    def make_simulator(self, seed: int | None = None) -> Simulator:
        return build_cluster(
            self.topology,
            self.node_model,
            self.blower_model,
            seed=self.seed if seed is None else seed,
            service_node_watts=self.service_node_watts,
            aries_watts_per_blade=self.aries_watts_per_blade,
            acdc_efficiency=self.acdc_efficiency,
        )

    def workload(self) -> list[WorkloadProfile]:
        return [entry.profile for entry in self.profiles]

    def job_registry(self) -> JobRegistry:
        """Finished jobs for every profile that carries an apid."""
        registry = JobRegistry()
        for entry in self.profiles:
            if entry.apid is None:
                continue
            registry.register_job(
                entry.apid, entry.jobid, entry.cmdname, entry.profile.nodes,
                entry.profile.start_ms,
            )
            registry.finish_job(entry.apid, entry.profile.end_ms)
        return registry


def _profile_nodes(entry: dict, topology: ClusterTopology) -> frozenset[SensorId]:
    if "nodes" in entry:
        return frozenset(parse_sensor_path(p) for p in entry["nodes"])
    if "cabinet" in entry:
        cabinet = int(entry["cabinet"])
        first = int(entry.get("node_first", 0))
        count = int(entry.get("node_count", topology.nodes_per_cabinet - first))
        return frozenset(node_sensor(cabinet, first + k) for k in range(count))
    raise ValueError("profile needs either 'nodes' or 'cabinet'")


def _require_horizon(data: dict) -> int:
    if "horizon_s" not in data:
        raise ValueError("config is missing 'horizon_s'")
    return int(data["horizon_s"])


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    if path.suffix.lower() == ".json":
        data = json.loads(path.read_text(encoding="utf-8"))
    else:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)

    topology = ClusterTopology(**data.get("topology", {}))
    node_model = NodePowerModel(**data.get("node_model", {}))
    blower_model = BlowerModel(**data.get("blower_model", {}))
    horizon_s = _require_horizon(data)

    profiles = []
    for entry in data.get("profiles", []):
        profile = WorkloadProfile(
            nodes=_profile_nodes(entry, topology),
            start_ms=int(entry.get("start_ms", 0)),
            end_ms=int(entry.get("end_ms", horizon_s * 1000)),
            cpu_load=float(entry.get("cpu_load", 0.0)),
            gpu_load=float(entry.get("gpu_load", 0.0)),
            pstate_khz=int(entry.get("pstate_khz", 2_600_000)),
        )
        profiles.append(
            ProfileEntry(
                profile=profile,
                apid=int(entry["apid"]) if "apid" in entry else None,
                jobid=int(entry.get("jobid", 0)),
                cmdname=str(entry.get("cmdname", "./a.out")),
            )
        )

    return ScenarioConfig(
        topology=topology,
        node_model=node_model,
        blower_model=blower_model,
        seed=int(data.get("seed", 0)),
        horizon_s=horizon_s,
        service_node_watts=float(data.get("service_node_watts", 25.0)),
        aries_watts_per_blade=float(data.get("aries_watts_per_blade", 100.0)),
        acdc_efficiency=float(data.get("acdc_efficiency", 0.95)),
        profiles=tuple(profiles),
    )
