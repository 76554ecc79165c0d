"""Synthetic XC-30-like cluster producing DC sensor streams plus an AC meter.

Every compute node has two disjoint sensors: ``node/...`` (idle + CPU dynamic
power) and ``gpu/...`` (GPU component), so summing sensors never double counts.
Aries network chips draw a constant 100 W per 4-node blade regardless of load,
blowers idle at their base wattage and ramp linearly toward max once the mean
cluster load passes a threshold, and the external meter reads the total DC
draw divided by the AC/DC conversion efficiency.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidTopology, UnknownNode, UnknownPState
from .sensors import (
    SensorDomain,
    SensorId,
    aries_sensor,
    blower_sensor,
    external_meter_sensor,
    gpu_sensor,
    node_sensor,
    service_sensor,
)
from .telemetry import MS_PER_S, PowerSample, TelemetryStore

#: P-states advertised by the compute-node cpufreq driver, in kHz.
#: 2601000 is the turbo pseudo-state sitting above the 2.6 GHz nominal clock.
SUPPORTED_PSTATES_KHZ: tuple[int, ...] = (2601000,) + tuple(range(2600000, 1100000, -100000))
NOMINAL_PSTATE_KHZ = 2_600_000
TURBO_PSTATE_KHZ = 2_601_000

_PSTATE_SET = frozenset(SUPPORTED_PSTATES_KHZ)


@dataclass(frozen=True)
class ClusterTopology:
    cabinets: int = 28
    nodes_per_cabinet: int = 192
    service_nodes_per_cabinet: int = 4
    nodes_per_blade: int = 4
    blowers: int = 17

    def __post_init__(self) -> None:
        if self.cabinets < 1:
            raise InvalidTopology(f"cabinets must be >= 1, got {self.cabinets}")
        if self.blowers < 1:
            raise InvalidTopology(f"blowers must be >= 1, got {self.blowers}")
        if self.nodes_per_cabinet < 1 or self.nodes_per_blade < 1:
            raise InvalidTopology("node counts must be >= 1")
        if self.nodes_per_cabinet % self.nodes_per_blade:
            raise InvalidTopology(
                f"nodes_per_cabinet={self.nodes_per_cabinet} not divisible by "
                f"nodes_per_blade={self.nodes_per_blade}"
            )
        if self.service_nodes_per_cabinet < 0:
            raise InvalidTopology("service_nodes_per_cabinet must be >= 0")

    @property
    def blades_per_cabinet(self) -> int:
        return self.nodes_per_cabinet // self.nodes_per_blade

    @property
    def total_nodes(self) -> int:
        return self.cabinets * self.nodes_per_cabinet


@dataclass(frozen=True)
class NodePowerModel:
    """Per-node power split: idle floor, frequency-cubed CPU dynamic, linear GPU.

    TDPs and peaks default to an E5-2670 Sandy Bridge (115 W, 166.4 GFLOPS)
    paired with a K20X (225 W, 1311 GFLOPS). The turbo pseudo-state pays an
    extra fraction of CPU dynamic power on top of its tiny clock bump.
    """

    idle_w: float = 43.0
    cpu_tdp_w: float = 115.0
    gpu_tdp_w: float = 225.0
    cpu_peak_gflops: float = 166.4
    gpu_peak_gflops: float = 1311.0
    freq_exponent: float = 3.0
    turbo_cpu_penalty: float = 0.10

    def __post_init__(self) -> None:
        for name in ("cpu_tdp_w", "gpu_tdp_w", "cpu_peak_gflops", "gpu_peak_gflops"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.idle_w < 0:
            raise ValueError("idle_w must be >= 0")
        if self.idle_w >= self.cpu_tdp_w:
            raise ValueError("idle_w must be below cpu_tdp_w")


@dataclass(frozen=True)
class BlowerModel:
    base_w: float = 4440.0
    max_w: float = 5600.0
    load_threshold: float = 0.8

    def __post_init__(self) -> None:
        if self.base_w < 0 or self.base_w > self.max_w:
            raise ValueError("need 0 <= base_w <= max_w")
        if not 0.0 < self.load_threshold < 1.0:
            raise ValueError("load_threshold must be in (0, 1)")


@dataclass(frozen=True)
class WorkloadProfile:
    """Constant load on a node set over [start_ms, end_ms)."""

    nodes: frozenset[SensorId]
    start_ms: int
    end_ms: int
    cpu_load: float
    gpu_load: float
    pstate_khz: int = NOMINAL_PSTATE_KHZ

    def __post_init__(self) -> None:
        if not self.nodes:
            raise ValueError("profile needs at least one node")
        for n in self.nodes:
            if n.domain is not SensorDomain.NODE:
                raise ValueError(f"profiles target node sensors, got {n}")
        if self.start_ms >= self.end_ms:
            raise ValueError("profile start must precede end")
        if not (0.0 <= self.cpu_load <= 1.0 and 0.0 <= self.gpu_load <= 1.0):
            raise ValueError("loads must be within [0, 1]")
        if self.pstate_khz not in _PSTATE_SET:
            raise UnknownPState(f"{self.pstate_khz} kHz is not a supported P-state")

    def covers(self, t_ms: int) -> bool:
        return self.start_ms <= t_ms < self.end_ms


def node_power(
    model: NodePowerModel, pstate_khz: int, cpu_load: float, gpu_load: float
) -> float:
    """Total node watts: idle + cpu_load*TDP*(f/f_nominal)^exp + gpu_load*GPU TDP."""
    if pstate_khz not in _PSTATE_SET:
        raise UnknownPState(f"{pstate_khz} kHz is not a supported P-state")
    if not (0.0 <= cpu_load <= 1.0 and 0.0 <= gpu_load <= 1.0):
        raise ValueError("loads must be within [0, 1]")
    ratio = pstate_khz / NOMINAL_PSTATE_KHZ
    cpu_dyn = cpu_load * model.cpu_tdp_w * ratio**model.freq_exponent
    if pstate_khz == TURBO_PSTATE_KHZ:
        cpu_dyn *= 1.0 + model.turbo_cpu_penalty
    return model.idle_w + cpu_dyn + gpu_load * model.gpu_tdp_w


class Simulator:
    """Deterministic sensor-stream generator for one cluster.

    The same (topology, models, profiles, seed) always produce byte-identical
    NDJSON output; the seed only feeds the initial values of the cumulative
    energy counters.
    """

    def __init__(
        self,
        topology: ClusterTopology,
        node_model: NodePowerModel | None = None,
        blower_model: BlowerModel | None = None,
        seed: int = 0,
        service_node_watts: float = 25.0,
        aries_watts_per_blade: float = 100.0,
        acdc_efficiency: float = 0.95,
        startup_counter: int = 1,
        pm_version: int = 1,
    ) -> None:
        if not 0.0 < acdc_efficiency <= 1.0:
            raise ValueError("acdc_efficiency must be in (0, 1]")
        if service_node_watts < 0 or aries_watts_per_blade < 0:
            raise ValueError("sensor wattages must be >= 0")
        self.topology = topology
        self.node_model = node_model or NodePowerModel()
        self.blower_model = blower_model or BlowerModel()
        self.seed = seed
        self.service_node_watts = service_node_watts
        self.aries_watts_per_blade = aries_watts_per_blade
        self.acdc_efficiency = acdc_efficiency
        self.startup_counter = startup_counter
        self.pm_version = pm_version

        t = topology
        self.node_sensors = [
            node_sensor(c, n) for c in range(t.cabinets) for n in range(t.nodes_per_cabinet)
        ]
        self.gpu_sensors = [
            gpu_sensor(c, n) for c in range(t.cabinets) for n in range(t.nodes_per_cabinet)
        ]
        self.aries_sensors = [
            aries_sensor(c, b) for c in range(t.cabinets) for b in range(t.blades_per_cabinet)
        ]
        self.service_sensors = (
            [service_sensor(c) for c in range(t.cabinets)]
            if t.service_nodes_per_cabinet
            else []
        )
        self.blower_sensors = [blower_sensor(i) for i in range(t.blowers)]
        self.meter_sensor = external_meter_sensor()
        self._node_set = frozenset(self.node_sensors)

        # DC sensors in emission order; the AC meter is emitted last.
        self._dc_sensors: list[SensorId] = (
            self.node_sensors
            + self.gpu_sensors
            + self.aries_sensors
            + self.service_sensors
            + self.blower_sensors
        )
        rng = random.Random(seed)
        self._initial_energy = {
            s: float(rng.randrange(10_000_000, 100_000_000))
            for s in self._dc_sensors + [self.meter_sensor]
        }

        self._profiles: tuple[WorkloadProfile, ...] = ()
        self.horizon_ms: int | None = None
        self._cap_changes: dict[SensorId, list[tuple[int, int]]] = {}

    # -- workload lookup --------------------------------------------------

    def _check_node(self, node: SensorId) -> None:
        if node not in self._node_set:
            raise UnknownNode(f"{node} is not a node of this cluster")

    def node_loads_at(self, node: SensorId, t_ms: int) -> tuple[float, float, int]:
        """(cpu_load, gpu_load, pstate_khz) for a node; the latest covering profile wins."""
        self._check_node(node)
        for profile in reversed(self._profiles):
            if profile.covers(t_ms) and node in profile.nodes:
                return profile.cpu_load, profile.gpu_load, profile.pstate_khz
        return 0.0, 0.0, NOMINAL_PSTATE_KHZ

    def node_dc_power_at(self, node: SensorId, t_ms: int) -> tuple[float, float]:
        """(node-side watts, gpu watts) using the workload active at t."""
        cpu, gpu, khz = self.node_loads_at(node, t_ms)
        node_side = node_power(self.node_model, khz, cpu, 0.0)
        gpu_side = gpu * self.node_model.gpu_tdp_w
        return node_side, gpu_side

    def mean_cluster_load_at(self, t_ms: int) -> float:
        total = 0.0
        for profile in self._profiles:
            if profile.covers(t_ms):
                total += (profile.cpu_load + profile.gpu_load) / 2.0 * len(profile.nodes)
        # Overlapping profiles slightly overweight shared nodes; blower input only.
        return total / len(self.node_sensors)

    def blower_power_at(self, t_ms: int) -> float:
        bm = self.blower_model
        load = self.mean_cluster_load_at(t_ms)
        if load <= bm.load_threshold:
            return bm.base_w
        frac = min(1.0, (load - bm.load_threshold) / (1.0 - bm.load_threshold))
        return bm.base_w + (bm.max_w - bm.base_w) * frac

    def service_power_at(self, cabinet: int, t_ms: int) -> float:
        return self.topology.service_nodes_per_cabinet * self.service_node_watts

    def dc_power_total_at(self, t_ms: int) -> float:
        terms = []
        for node in self.node_sensors:
            node_side, gpu_side = self.node_dc_power_at(node, t_ms)
            terms.append(node_side)
            terms.append(gpu_side)
        terms.append(self.aries_watts_per_blade * len(self.aries_sensors))
        for cab in range(self.topology.cabinets):
            if self.topology.service_nodes_per_cabinet:
                terms.append(self.service_power_at(cab, t_ms))
        terms.append(self.blower_power_at(t_ms) * len(self.blower_sensors))
        return math.fsum(terms)

    def external_meter(self, t_ms: int) -> float:
        """AC-side facility reading: total DC power over the conversion efficiency."""
        if t_ms < 0 or (self.horizon_ms is not None and t_ms > self.horizon_ms):
            raise ValueError(f"t={t_ms} ms outside the simulated horizon")
        return self.dc_power_total_at(t_ms) / self.acdc_efficiency

    # -- power capping (scripted; no capping controller) -------------------

    def schedule_power_cap(self, node: SensorId, t_ms: int, cap_w: int) -> None:
        self._check_node(node)
        if cap_w < 0:
            raise ValueError("power cap must be >= 0 (0 = uncapped)")
        events = self._cap_changes.setdefault(node, [])
        events.append((t_ms, cap_w))
        events.sort(key=lambda e: e[0])

    def power_cap_state_at(self, node: SensorId, t_ms: int) -> tuple[int, int]:
        """(cap watts, generation); generation counts actual cap value changes."""
        self._check_node(node)
        cap, generation = 0, 0
        for when, value in self._cap_changes.get(node, []):
            if when > t_ms:
                break
            if value != cap:
                cap, generation = value, generation + 1
        return cap, generation

    # -- cumulative energy (pm_counters uses 100 ms resolution) ------------

    def cumulative_node_energy_j(self, node: SensorId, t_ms: int) -> float:
        """Counter value (node + GPU, including the seeded initial offset) at t."""
        self._check_node(node)
        gpu = gpu_sensor(node.cabinet, node.node)
        terms = [self._initial_energy[node], self._initial_energy[gpu]]
        whole_s, rem_ms = divmod(t_ms, MS_PER_S)
        for s in range(whole_s):
            node_side, gpu_side = self.node_dc_power_at(node, s * MS_PER_S)
            terms.append(node_side + gpu_side)
        if rem_ms:
            node_side, gpu_side = self.node_dc_power_at(node, whole_s * MS_PER_S)
            terms.append((node_side + gpu_side) * rem_ms / MS_PER_S)
        return math.fsum(terms)

    # -- stream generation --------------------------------------------------

    def run(
        self,
        profiles: Sequence[WorkloadProfile],
        horizon_s: int,
        store: TelemetryStore | None = None,
    ) -> TelemetryStore:
        """Emit 1 Hz samples for every sensor over [0, horizon_s) seconds."""
        if horizon_s < 1:
            raise ValueError("horizon must cover at least one second")
        horizon_ms = horizon_s * MS_PER_S
        for profile in profiles:
            for n in profile.nodes:
                self._check_node(n)
            if profile.start_ms < 0 or profile.end_ms > horizon_ms:
                raise ValueError(
                    f"profile [{profile.start_ms}, {profile.end_ms}) outside horizon "
                    f"[0, {horizon_ms})"
                )
        self._profiles = tuple(profiles)
        self.horizon_ms = horizon_ms

        # Per-node profile lists preserve sequence order so the "latest wins"
        # rule matches node_loads_at exactly.
        per_node: dict[SensorId, list[WorkloadProfile]] = {}
        for profile in self._profiles:
            for n in profile.nodes:
                per_node.setdefault(n, []).append(profile)

        store = store if store is not None else TelemetryStore()
        acc = {s: 0.0 for s in self._dc_sensors}
        acc[self.meter_sensor] = 0.0
        n_nodes = len(self.node_sensors)
        aries_w = self.aries_watts_per_blade
        top = self.topology

        for sec in range(horizon_s):
            t = sec * MS_PER_S
            watts_pairs: list[tuple[float, float]] = []
            for node in self.node_sensors:
                cpu, gpu, khz = 0.0, 0.0, NOMINAL_PSTATE_KHZ
                for profile in reversed(per_node.get(node, ())):
                    if profile.covers(t):
                        cpu, gpu, khz = profile.cpu_load, profile.gpu_load, profile.pstate_khz
                        break
                watts_pairs.append(
                    (node_power(self.node_model, khz, cpu, 0.0), gpu * self.node_model.gpu_tdp_w)
                )
            # Blower ramp keys off the mean assigned load, overlap-weighted the
            # same way as mean_cluster_load_at.
            load_sum = 0.0
            for profile in self._profiles:
                if profile.covers(t):
                    load_sum += (profile.cpu_load + profile.gpu_load) / 2.0 * len(profile.nodes)
            mean_load = load_sum / n_nodes
            bm = self.blower_model
            if mean_load <= bm.load_threshold:
                blower_w = bm.base_w
            else:
                frac = min(1.0, (mean_load - bm.load_threshold) / (1.0 - bm.load_threshold))
                blower_w = bm.base_w + (bm.max_w - bm.base_w) * frac
            svc_w = top.service_nodes_per_cabinet * self.service_node_watts

            dc_terms: list[float] = []

            def emit(sensor: SensorId, watts: float) -> None:
                store.append_sample(
                    PowerSample(
                        sensor=sensor,
                        t_ms=t,
                        power_w=watts,
                        energy_j=self._initial_energy[sensor] + acc[sensor],
                    )
                )
                acc[sensor] += watts  # 1 Hz: one second at this power

            for node, (node_side, _) in zip(self.node_sensors, watts_pairs):
                emit(node, node_side)
                dc_terms.append(node_side)
            for g, (_, gpu_side) in zip(self.gpu_sensors, watts_pairs):
                emit(g, gpu_side)
                dc_terms.append(gpu_side)
            for a in self.aries_sensors:
                emit(a, aries_w)
                dc_terms.append(aries_w)
            for s in self.service_sensors:
                emit(s, svc_w)
                dc_terms.append(svc_w)
            for b in self.blower_sensors:
                emit(b, blower_w)
                dc_terms.append(blower_w)
            emit(self.meter_sensor, math.fsum(dc_terms) / self.acdc_efficiency)

        return store


def build_cluster(
    topology: ClusterTopology,
    node_model: NodePowerModel | None = None,
    blower_model: BlowerModel | None = None,
    seed: int = 0,
    **kwargs,
) -> Simulator:
    """Construct a deterministic simulator; identical seeds give identical streams."""
    return Simulator(topology, node_model, blower_model, seed, **kwargs)
