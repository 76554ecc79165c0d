"""Append-only time-series store for power samples.

Samples carry both an instantaneous power reading and the sensor's cumulative
energy counter. Per sensor, timestamps must strictly increase and the energy
counter must never move backwards. Interval queries are half-open
[start_ms, end_ms) so tiled windows partition samples without double counting.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import (
    EmptySeries,
    EnergyRegression,
    NegativeReading,
    NoSampleBefore,
    OutOfOrderSample,
    UnknownSensor,
)
from .sensors import SensorId, parse_sensor_path

MS_PER_S = 1000
JOULES_PER_KWH = 3_600_000.0


@dataclass(frozen=True)
class Interval:
    """Half-open window: start_ms inclusive, end_ms exclusive."""

    start_ms: int
    end_ms: int

    def __post_init__(self) -> None:
        if self.start_ms >= self.end_ms:
            raise ValueError(f"interval start {self.start_ms} must precede end {self.end_ms}")

    @property
    def duration_s(self) -> float:
        return (self.end_ms - self.start_ms) / MS_PER_S


@dataclass(frozen=True)
class PowerSample:
    """One reading: instantaneous watts plus the cumulative joule counter."""

    sensor: SensorId
    t_ms: int
    power_w: float
    energy_j: float

    def __post_init__(self) -> None:
        if self.power_w < 0:
            raise NegativeReading(f"power {self.power_w} W at t={self.t_ms} on {self.sensor}")
        if self.energy_j < 0:
            raise NegativeReading(f"energy {self.energy_j} J at t={self.t_ms} on {self.sensor}")


def sample_to_line(sample: PowerSample) -> str:
    """Serialize one sample as a single NDJSON line (no trailing newline)."""
    return json.dumps(
        {
            "sensor": sample.sensor.path,
            "t_ms": sample.t_ms,
            "power_w": float(sample.power_w),
            "energy_j": float(sample.energy_j),
        },
        separators=(",", ":"),
    )


def sample_from_line(line: str) -> PowerSample:
    try:
        obj = json.loads(line)
        return PowerSample(
            sensor=parse_sensor_path(obj["sensor"]),
            t_ms=int(obj["t_ms"]),
            power_w=float(obj["power_w"]),
            energy_j=float(obj["energy_j"]),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError(f"bad sample line: {line!r}") from exc


class TelemetryStore:
    """In-memory per-sensor series with interval queries and energy integration.

    One writer per sensor stream keeps appends ordered; reads never mutate.
    """

    def __init__(self) -> None:
        self._series: dict[SensorId, list[PowerSample]] = {}
        self._times: dict[SensorId, list[int]] = {}

    def __len__(self) -> int:
        return sum(len(s) for s in self._series.values())

    def sensors(self) -> list[SensorId]:
        return sorted(self._series, key=lambda s: s.path)

    def __contains__(self, sensor: SensorId) -> bool:
        return sensor in self._series

    def append_sample(self, sample: PowerSample) -> None:
        """Append one sample; t must strictly increase and energy must not regress."""
        series = self._series.get(sample.sensor)
        if series is None:
            self._series[sample.sensor] = [sample]
            self._times[sample.sensor] = [sample.t_ms]
            return
        last = series[-1]
        if sample.t_ms <= last.t_ms:
            raise OutOfOrderSample(
                f"{sample.sensor}: t={sample.t_ms} not after t={last.t_ms}"
            )
        if sample.energy_j < last.energy_j:
            raise EnergyRegression(
                f"{sample.sensor}: energy {sample.energy_j} < {last.energy_j}"
            )
        series.append(sample)
        self._times[sample.sensor].append(sample.t_ms)

    # -- queries --------------------------------------------------------

    def _resolve(self, selector: Iterable[SensorId] | None) -> list[SensorId]:
        if selector is None:
            return self.sensors()
        selected = sorted(set(selector), key=lambda s: s.path)
        for sensor in selected:
            if sensor not in self._series:
                raise UnknownSensor(f"no samples ever recorded for {sensor}")
        return selected

    def _window(self, sensor: SensorId, interval: Interval) -> tuple[int, int]:
        times = self._times[sensor]
        return bisect_left(times, interval.start_ms), bisect_left(times, interval.end_ms)

    def query_series(
        self, selector: Iterable[SensorId] | None, interval: Interval
    ) -> list[PowerSample]:
        """All samples of the selected sensors with start <= t < end, ordered by (sensor, t)."""
        out: list[PowerSample] = []
        for sensor in self._resolve(selector):
            lo, hi = self._window(sensor, interval)
            out.extend(self._series[sensor][lo:hi])
        return out

    def integrate_energy(
        self, selector: Iterable[SensorId] | None, interval: Interval
    ) -> float:
        """Left-rectangle energy over the interval, summed across sensors.

        Each in-window sample holds its power until the next sample; the last
        one extends to interval.end_ms. Every selected sensor must have at
        least one in-window sample.
        """
        terms: list[float] = []
        for sensor in self._resolve(selector):
            lo, hi = self._window(sensor, interval)
            if lo == hi:
                raise EmptySeries(f"{sensor} has no samples in [{interval.start_ms}, {interval.end_ms})")
            samples = self._series[sensor]
            for i in range(lo, hi - 1):
                terms.append(samples[i].power_w * (samples[i + 1].t_ms - samples[i].t_ms) / MS_PER_S)
            last = samples[hi - 1]
            terms.append(last.power_w * (interval.end_ms - last.t_ms) / MS_PER_S)
        return math.fsum(terms)

    def cumulative_energy_delta(self, sensor: SensorId, t0_ms: int, t1_ms: int) -> float:
        """energy(last sample <= t1) - energy(last sample <= t0); never negative."""
        if t0_ms > t1_ms:
            raise ValueError(f"t0={t0_ms} must not exceed t1={t1_ms}")
        if sensor not in self._series:
            raise UnknownSensor(f"no samples ever recorded for {sensor}")
        times = self._times[sensor]
        i0 = bisect_right(times, t0_ms) - 1
        i1 = bisect_right(times, t1_ms) - 1
        if i0 < 0:
            raise NoSampleBefore(f"{sensor} has no sample at or before t={t0_ms}")
        series = self._series[sensor]
        return series[i1].energy_j - series[i0].energy_j

    # -- NDJSON snapshots -------------------------------------------------

    def iter_lines(self) -> Iterator[str]:
        for sensor in self.sensors():
            for sample in self._series[sensor]:
                yield sample_to_line(sample)

    def dump_ndjson(self, target: str | Path | IO[str]) -> None:
        if hasattr(target, "write"):
            for line in self.iter_lines():
                target.write(line + "\n")
        else:
            with open(target, "w", encoding="utf-8") as fh:
                for line in self.iter_lines():
                    fh.write(line + "\n")

    @classmethod
    def load_ndjson(cls, source: str | Path | IO[str]) -> "TelemetryStore":
        store = cls()
        if hasattr(source, "read"):
            lines: Iterable[str] = source
        else:
            lines = open(source, encoding="utf-8")
        try:
            for line in lines:
                line = line.strip()
                if line:
                    store.append_sample(sample_from_line(line))
        finally:
            if lines is not source:
                lines.close()
        return store
