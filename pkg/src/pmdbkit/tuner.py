"""Energy-efficiency tuning: P-state x DGEMM split sweeps, plus helpers.

The throughput model is deliberately simple: GPU work runs at a derated GPU
peak, CPU work at a derated CPU peak scaled linearly with clock, and both run
concurrently. Two optional calibration constants extend it:

* ``host_cpu_load``   - CPU load floor that remains even when all DGEMM work
                        is on the GPU (the host still orchestrates transfers);
* ``gpu_feed_khz``    - below this CPU clock the GPU starves and its
                        throughput derates linearly.

Both default to off, and the shipped ``green500`` calibration fixture turns
them on; with it the sweep optimum lands at 1.9 GHz with a split of 1.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import BelowMinimum, EmptyGrid, InvalidSplit, NonPositiveBeta
from .simulator import (
    NOMINAL_PSTATE_KHZ,
    SUPPORTED_PSTATES_KHZ,
    NodePowerModel,
    node_power,
)

DEFAULT_SPLITS: tuple[float, ...] = tuple(i / 10 for i in range(11))

#: Inverse-temperature above which the cuprate correction factor applies.
CUPRATE_BETA = 40.0


def normalize_pstate(requested_khz: int) -> int:
    """Round a requested frequency down to the next supported P-state."""
    candidates = [khz for khz in SUPPORTED_PSTATES_KHZ if khz <= requested_khz]
    if not candidates:
        raise BelowMinimum(
            f"{requested_khz} kHz is below the slowest supported P-state "
            f"{min(SUPPORTED_PSTATES_KHZ)} kHz"
        )
    return max(candidates)


@dataclass(frozen=True)
class TunePoint:
    pstate_khz: int
    split: float
    gflops: float
    watts: float

    @property
    def gf_per_w(self) -> float:
        return self.gflops / self.watts

    def to_dict(self) -> dict:
        return {
            "pstate_khz": self.pstate_khz,
            "split": self.split,
            "gflops": self.gflops,
            "watts": self.watts,
            "gf_per_w": self.gf_per_w,
        }


@dataclass(frozen=True)
class PerfModel:
    """Node throughput/power model for DGEMM-dominated steady state.

    overlap records the assumption that CPU and GPU work run concurrently;
    a serialized mode is not modeled.
    """

    node_model: NodePowerModel = field(default_factory=NodePowerModel)
    gpu_derate: float = 0.70
    cpu_derate: float = 0.90
    host_cpu_load: float = 0.0
    gpu_feed_khz: int = 0
    overlap: bool = True

    def __post_init__(self) -> None:
        if not (0.0 < self.gpu_derate <= 1.0 and 0.0 < self.cpu_derate <= 1.0):
            raise ValueError("derates must be in (0, 1]")
        if not 0.0 <= self.host_cpu_load <= 1.0:
            raise ValueError("host_cpu_load must be in [0, 1]")
        if self.gpu_feed_khz < 0:
            raise ValueError("gpu_feed_khz must be >= 0 (0 disables the feed derate)")


def evaluate(model: PerfModel, pstate_khz: int, split: float) -> TunePoint:
    """One sweep point: throughput, node watts and their ratio at (P-state, split)."""
    if not 0.0 <= split <= 1.0:
        raise InvalidSplit(f"split must be within [0, 1], got {split}")
    nm = model.node_model
    ratio = pstate_khz / NOMINAL_PSTATE_KHZ
    feed = 1.0
    if model.gpu_feed_khz > 0:
        feed = min(1.0, pstate_khz / model.gpu_feed_khz)
    gflops = (
        split * nm.gpu_peak_gflops * model.gpu_derate * feed
        + (1.0 - split) * nm.cpu_peak_gflops * model.cpu_derate * ratio
    )
    cpu_load = max(1.0 - split, model.host_cpu_load)
    watts = node_power(nm, pstate_khz, cpu_load, split)
    return TunePoint(pstate_khz=pstate_khz, split=split, gflops=gflops, watts=watts)


@dataclass(frozen=True)
class TuneTable:
    points: tuple[TunePoint, ...]
    best: TunePoint


def sweep(
    model: PerfModel,
    pstates: tuple[int, ...] | None = None,
    splits: tuple[float, ...] | None = None,
) -> TuneTable:
    """Evaluate the full grid; ties in GF/W prefer lower frequency, then higher split."""
    pstates = SUPPORTED_PSTATES_KHZ if pstates is None else tuple(pstates)
    splits = DEFAULT_SPLITS if splits is None else tuple(splits)
    if not pstates or not splits:
        raise EmptyGrid("sweep needs at least one P-state and one split")
    points = tuple(evaluate(model, khz, split) for khz in pstates for split in splits)
    best = max(points, key=lambda p: (p.gf_per_w, -p.pstate_khz, p.split))
    return TuneTable(points=points, best=best)


def dca_temperature(beta: float) -> float:
    """Simulation temperature in kelvin for an inverse-temperature input.

    T = 11604/beta; from beta = 40 upward the cuprate correction multiplies by
    0.25 (values beyond 40 are an extrapolation and warn).
    """
    if beta <= 0:
        raise NonPositiveBeta(f"beta must be positive, got {beta}")
    t = 11604.0 / beta
    if beta >= CUPRATE_BETA:
        t *= 0.25
        if beta > CUPRATE_BETA:
            warnings.warn(
                f"cuprate correction extrapolated beyond beta={CUPRATE_BETA:g}",
                stacklevel=2,
            )
    return t


# -- calibration fixtures ---------------------------------------------------

def perf_model_from_dict(data: dict) -> PerfModel:
    node = NodePowerModel(**data.get("node_model", {}))
    return PerfModel(
        node_model=node,
        gpu_derate=data.get("gpu_derate", 0.70),
        cpu_derate=data.get("cpu_derate", 0.90),
        host_cpu_load=data.get("host_cpu_load", 0.0),
        gpu_feed_khz=data.get("gpu_feed_khz", 0),
        overlap=data.get("overlap", True),
    )


def load_calibration(path: str | Path) -> PerfModel:
    with open(path, encoding="utf-8") as fh:
        return perf_model_from_dict(json.load(fh))


def green500_calibration() -> PerfModel:
    """The shipped calibration whose sweep optimum is 1.9 GHz at split 1."""
    data = (
        resources.files("pmdbkit").joinpath("fixtures/green500_tuner.json").read_text("utf-8")
    )
    return perf_model_from_dict(json.loads(data))
