"""Job and cabinet energy bookkeeping.

Core relations:

    total_energy          = (E_n + N/4 * aries_watts * tau) / acdc_efficiency
    total_with_blowers    = (E_n + N/4 * aries_watts * tau + B * blower_watts * tau)
                            / acdc_efficiency
    ETS                   = mean_power * TTS
    HPL operation count   = (2/3) * N^3      (dense LU dominated by DGEMM)

E_n is the node-level energy of a job including the GPU component; the N/4
term charges one network chip per 4-node blade; B is the blower share
attributed to the job (17 blowers / 28 cabinets on the full-scale reference
system, pro-rated by the fraction of a cabinet the job occupies).
All internal units are joules, seconds and watts; kWh only appears in
serialized reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    EmptySeries,
    JobOpen,
    MissingSamples,
    NonPositiveDuration,
    NonPositiveRate,
)
from .jobs import JobRecord
from .sensors import SensorDomain, gpu_sensor
from .telemetry import JOULES_PER_KWH, Interval, TelemetryStore


@dataclass(frozen=True)
class CorrectionParams:
    acdc_efficiency: float = 0.95
    aries_watts_per_blade: float = 100.0
    blower_watts: float = 4440.0
    blowers_total: int = 17
    cabinets_total: int = 28

    def __post_init__(self) -> None:
        if not 0.0 < self.acdc_efficiency <= 1.0:
            raise ValueError("acdc_efficiency must be in (0, 1]")
        if self.aries_watts_per_blade < 0 or self.blower_watts < 0:
            raise ValueError("correction wattages must be >= 0")
        if self.blowers_total < 0 or self.cabinets_total < 1:
            raise ValueError("need blowers_total >= 0 and cabinets_total >= 1")


@dataclass(frozen=True)
class EnergyReport:
    """Job-level accounting summary; eq1 excludes blowers, eq2 includes them."""

    apid: int
    e_n_j: float
    n_nodes: int
    tau_s: float
    blower_share: float
    eq1_j: float
    eq2_j: float
    mean_power_w: float

    def to_dict(self) -> dict:
        warnings = []
        if self.n_nodes % 4:
            warnings.append(
                f"node count {self.n_nodes} is not a whole number of 4-node blades; "
                "the network term uses exact N/4"
            )
        return {
            "apid": self.apid,
            "E_n_j": self.e_n_j,
            "N": self.n_nodes,
            "tau_s": self.tau_s,
            "B": self.blower_share,
            "eq1_j": self.eq1_j,
            "eq2_j": self.eq2_j,
            "mean_power_w": self.mean_power_w,
            "E_n_kwh": self.e_n_j / JOULES_PER_KWH,
            "eq1_kwh": self.eq1_j / JOULES_PER_KWH,
            "eq2_kwh": self.eq2_j / JOULES_PER_KWH,
            "mean_power_kw": self.mean_power_w / 1000.0,
            "warnings": warnings,
        }


def job_node_energy(store: TelemetryStore, job: JobRecord) -> tuple[float, int, float]:
    """(E_n joules, N nodes, tau seconds) for a finished job.

    E_n integrates the node sensors of the job's nodes plus their GPU sensors
    where present, i.e. the node total including GPU.
    """
    if not job.finished:
        raise JobOpen(f"apid {job.apid} has not finished")
    interval = job.interval
    selected = []
    for node in sorted(job.nodes, key=lambda s: s.path):
        if node not in store:
            raise MissingSamples(f"{node} has no samples at all")
        selected.append(node)
        gpu = gpu_sensor(node.cabinet, node.node)
        if gpu in store:
            selected.append(gpu)
    try:
        e_n = store.integrate_energy(selected, interval)
    except EmptySeries as exc:
        raise MissingSamples(str(exc)) from exc
    return e_n, len(job.nodes), interval.duration_s


def estimate_total_energy(
    e_n_j: float, n_nodes: int, tau_s: float, params: CorrectionParams | None = None
) -> float:
    """Node energy corrected for network chips and AC/DC conversion (no blowers)."""
    params = params or CorrectionParams()
    if tau_s <= 0:
        raise NonPositiveDuration(f"tau must be positive, got {tau_s}")
    if e_n_j < 0 or n_nodes < 0:
        raise ValueError("E_n and N must be non-negative")
    aries_j = n_nodes / 4 * params.aries_watts_per_blade * tau_s
    return (e_n_j + aries_j) / params.acdc_efficiency


def estimate_total_energy_with_blowers(
    e_n_j: float,
    n_nodes: int,
    tau_s: float,
    blower_share: float,
    params: CorrectionParams | None = None,
) -> float:
    """As estimate_total_energy plus B * blower_watts charged per second of tau."""
    params = params or CorrectionParams()
    if tau_s <= 0:
        raise NonPositiveDuration(f"tau must be positive, got {tau_s}")
    if e_n_j < 0 or n_nodes < 0 or blower_share < 0:
        raise ValueError("E_n, N and B must be non-negative")
    aries_j = n_nodes / 4 * params.aries_watts_per_blade * tau_s
    blower_j = blower_share * params.blower_watts * tau_s
    return (e_n_j + aries_j + blower_j) / params.acdc_efficiency


def blower_share(cabinets_used: float, params: CorrectionParams | None = None) -> float:
    """Blower count attributed to a job occupying the given (possibly fractional)
    number of cabinets."""
    params = params or CorrectionParams()
    if cabinets_used < 0:
        raise ValueError("cabinets_used must be >= 0")
    return cabinets_used * params.blowers_total / params.cabinets_total


def cabinet_energy(store: TelemetryStore, cabinet: int, interval: Interval) -> float:
    """Energy of one cabinet: node + gpu + network + service sensors; blowers excluded."""
    wanted = (
        SensorDomain.NODE,
        SensorDomain.NODE_GPU,
        SensorDomain.ARIES_BLADE,
        SensorDomain.CABINET_SERVICE,
    )
    selected = [s for s in store.sensors() if s.domain in wanted and s.cabinet == cabinet]
    if not selected:
        raise MissingSamples(f"cabinet {cabinet} has no sensors in the store")
    try:
        return store.integrate_energy(selected, interval)
    except EmptySeries as exc:
        raise MissingSamples(str(exc)) from exc


def mean_power(energy_j: float, tau_s: float) -> float:
    if tau_s <= 0:
        raise NonPositiveDuration(f"tau must be positive, got {tau_s}")
    return energy_j / tau_s


def hpl_flops(n_matrix: int) -> Fraction:
    """Operation count (2/3) * N^3 of a dense LU solve, as an exact rational.

    Exceeds 2**63 already at N ~ 2.4e6, hence the arbitrary-precision result.
    """
    if n_matrix <= 0:
        raise ValueError(f"matrix order must be positive, got {n_matrix}")
    return Fraction(2 * n_matrix**3, 3)


def tts_estimate(nops: float | Fraction, kflop_rate: float) -> float:
    """Time to solution for a given operation count at a sustained FLOP rate."""
    if kflop_rate <= 0:
        raise NonPositiveRate(f"flop rate must be positive, got {kflop_rate}")
    return float(nops / kflop_rate)


def build_report(
    store: TelemetryStore,
    job: JobRecord,
    params: CorrectionParams | None = None,
    nodes_per_cabinet: int = 192,
) -> EnergyReport:
    """Full accounting report for one job; B is pro-rated by cabinet fraction."""
    params = params or CorrectionParams()
    e_n, n_nodes, tau = job_node_energy(store, job)
    share = blower_share(n_nodes / nodes_per_cabinet, params)
    eq1 = estimate_total_energy(e_n, n_nodes, tau, params)
    eq2 = estimate_total_energy_with_blowers(e_n, n_nodes, tau, share, params)
    return EnergyReport(
        apid=job.apid,
        e_n_j=e_n,
        n_nodes=n_nodes,
        tau_s=tau,
        blower_share=share,
        eq1_j=eq1,
        eq2_j=eq2,
        mean_power_w=mean_power(eq2, tau),
    )
