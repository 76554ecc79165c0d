import math

import pytest

from pmdbkit import PowerSample, TelemetryStore, node_sensor


def make_trace(store, sensor, powers, t0_ms=0, dt_ms=1000, energy0=0.0):
    """Append a trace with the given per-sample powers and a consistent counter."""
    energy = energy0
    for i, p in enumerate(powers):
        store.append_sample(
            PowerSample(sensor=sensor, t_ms=t0_ms + i * dt_ms, power_w=p, energy_j=energy)
        )
        energy += p * dt_ms / 1000.0
    return store


def staircase_energy(samples, start_ms, end_ms):
    """Independent per-second oracle for 1 Hz traces.

    Walks every whole second of [start_ms, end_ms) and charges the power of
    the covering in-window sample (linear scan, no pairwise arithmetic).
    """
    in_window = [s for s in samples if start_ms <= s.t_ms < end_ms]
    terms = []
    for sec_start in range(start_ms, end_ms, 1000):
        covering = None
        for s in in_window:
            if s.t_ms <= sec_start:
                covering = s
        if covering is not None:
            terms.append(covering.power_w)
    return math.fsum(terms)


@pytest.fixture
def store():
    return TelemetryStore()


@pytest.fixture
def node_a():
    return node_sensor(0, 0)
