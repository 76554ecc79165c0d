"""Cluster power-telemetry simulation and job energy accounting."""

from .accounting import (
    CorrectionParams,
    EnergyReport,
    blower_share,
    build_report,
    cabinet_energy,
    estimate_total_energy,
    estimate_total_energy_with_blowers,
    hpl_flops,
    job_node_energy,
    mean_power,
    tts_estimate,
)
from .jobs import JobRecord, JobRegistry
from .sensors import (
    SensorDomain,
    SensorId,
    aries_sensor,
    blower_sensor,
    external_meter_sensor,
    gpu_sensor,
    node_sensor,
    parse_sensor_path,
    service_sensor,
)
from .simulator import (
    NOMINAL_PSTATE_KHZ,
    SUPPORTED_PSTATES_KHZ,
    TURBO_PSTATE_KHZ,
    BlowerModel,
    ClusterTopology,
    NodePowerModel,
    Simulator,
    WorkloadProfile,
    build_cluster,
    node_power,
)
from .telemetry import (
    JOULES_PER_KWH,
    Interval,
    PowerSample,
    TelemetryStore,
    sample_from_line,
    sample_to_line,
)
from .tuner import (
    PerfModel,
    TunePoint,
    TuneTable,
    dca_temperature,
    evaluate,
    green500_calibration,
    normalize_pstate,
    sweep,
)
from .validation import (
    ComparisonRow,
    ScenarioResult,
    SpeedupRow,
    SystemRun,
    cosmo_results_rows,
    run_scenario,
    scenario_names,
    speedup_table,
    undersample,
)

__version__ = "0.1.0"
