"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; tolerances are pinned in the assertions.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from pmdbkit import (
    Interval,
    PerfModel,
    PowerSample,
    NodePowerModel,
    TelemetryStore,
    cosmo_results_rows,
    dca_temperature,
    estimate_total_energy_with_blowers,
    evaluate,
    green500_calibration,
    hpl_flops,
    node_sensor,
    run_scenario,
    speedup_table,
    sweep,
    undersample,
)
from pmdbkit.pm_counters import PmCountersSnapshot, parse_file, parse_snapshot, render_files
from pmdbkit.rur import RurRecord, emit, parse
from pmdbkit.validation import mean_sample_power

from conftest import make_trace, staircase_energy


def _ok(text):
    print(f"PASS {text}")


def test_c01_blower_correction_identity():
    value = estimate_total_energy_with_blowers(0.0, 0, 1.0, 1.0)
    assert value == pytest.approx(4440.0 / 0.95)
    assert abs(value - 4673.7) <= 0.1
    _ok(f"criterion 1: single-blower correction {value:.2f} W ~ 4673.7 W")


def test_c02_seventeen_blower_total():
    value = estimate_total_energy_with_blowers(0.0, 0, 1.0, 17.0)
    assert value == pytest.approx(17 * 4673.6842105, abs=0.01)
    assert abs(value - 79_452.0) / 79_452.0 <= 1e-4
    assert abs(value - 79_448.0) / 79_448.0 <= 1e-3
    _ok(f"criterion 2: 17-blower total {value:.1f} W vs 79452/79448 W fixtures")


def test_c03_cosmo_three_cabinet_ratio():
    t0 = time.perf_counter()
    result = run_scenario("cosmo3cab")
    elapsed = time.perf_counter() - t0
    (check,) = result.checks
    assert abs(check.value - 0.95) <= 0.0005
    assert elapsed < 5.0
    _ok(f"criterion 3: PMDB/external ratio {check.value:.5f} (in {elapsed:.2f}s)")


def test_c04_cosmo_speedup_derivations():
    rows, baseline = cosmo_results_rows()
    table = {r.label: r for r in speedup_table(rows, baseline)}
    ets_hybrid = table["hybrid XC-30"].ets_speedup
    tts_hybrid = table["hybrid XC-30"].tts_speedup
    ets_xc30 = table["XC-30"].ets_speedup
    assert abs(ets_hybrid - 4.84) <= 0.01
    assert abs(tts_hybrid - 2.39) <= 0.01
    assert abs(ets_xc30 - 2.51) <= 0.01
    _ok(
        "criterion 4: speedups ETS/member "
        f"{ets_hybrid:.3f}~4.84, TTS {tts_hybrid:.3f}~2.39, XC-30 ETS {ets_xc30:.3f}~2.51"
    )


def test_c05_green500_four_path_agreement():
    t0 = time.perf_counter()
    result = run_scenario("green500")
    elapsed = time.perf_counter() - t0
    (row,) = result.rows
    assert row.max_pairwise_rel_diff <= 0.01
    assert result.passed
    assert elapsed < 10.0
    _ok(
        f"criterion 5: four paths within {row.max_pairwise_rel_diff:.3%} <= 1% "
        f"(in {elapsed:.2f}s)"
    )


def test_c06_hpl_flop_count():
    n = 3_612_672
    # Independent big-integer oracle, plain ints only.
    oracle = Fraction(2 * n * n * n, 3)
    value = hpl_flops(n)
    assert value == oracle  # exact: the documented representation is rational
    assert abs(float(value) - 3.1436e19) / 3.1436e19 < 1e-3  # printed-value sanity
    _ok(f"criterion 6: hpl_flops({n}) = {float(value):.6e} == (2/3)N^3 exactly")


def test_c07_tuner_endpoints_and_argmax():
    unit = PerfModel(node_model=NodePowerModel(idle_w=0.0), gpu_derate=1.0, cpu_derate=1.0)
    cpu_eff = evaluate(unit, 2_600_000, 0.0).gf_per_w
    gpu_eff = evaluate(unit, 2_600_000, 1.0).gf_per_w
    assert abs(cpu_eff - 1.447) <= 0.01
    assert abs(gpu_eff - 5.827) <= 0.01
    assert sweep(PerfModel()).best.split == 1.0
    best = sweep(green500_calibration()).best
    assert best.pstate_khz == 1_900_000
    assert best.split == 1.0
    _ok(
        f"criterion 7: endpoints {cpu_eff:.3f}/{gpu_eff:.3f} GF/W; "
        "default argmax split=1.0; calibrated argmax 1.9 GHz"
    )


def test_c08_dca_temperatures_and_undersampling():
    t40 = dca_temperature(40.0)
    assert t40 == 11604.0 / 40.0 * 0.25
    assert abs(t40 - 72.5) < 0.05  # the value as displayed at 3 significant figures
    for beta in (5, 10, 15, 20, 25, 30, 35):
        assert dca_temperature(float(beta)) == 11604.0 / beta

    # 23 s synthetic decay; brute-force the point-sampled mean over offsets.
    powers = [100.0 * math.exp(-s / 6.0) + 20.0 for s in range(23)]
    series = [
        PowerSample(node_sensor(0, 0), i * 1000, p, float(i)) for i, p in enumerate(powers)
    ]
    true_mean = mean_sample_power(series)
    worst = 0.0
    for offset in range(10):
        points = undersample(series, 10.0, offset_s=float(offset))
        if points:
            worst = max(worst, abs(mean_sample_power(points) - true_mean) / true_mean)
    assert worst > 0.05
    _ok(
        f"criterion 8: T(40)={t40} K (displays as 72.5); worst 0.1 Hz sampling "
        f"error {worst:.1%} > 5%"
    )


def test_c09_round_trips_and_literal_examples():
    t0 = time.perf_counter()
    rng = random.Random(20260810)
    alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789./_-"
    for _ in range(10_000):
        record = RurRecord(
            apid=rng.randrange(1, 2**40),
            cmdname="".join(rng.choice(alphabet) for _ in range(rng.randint(1, 20))),
            energy_used_j=rng.randrange(0, 2**50),
        )
        assert parse(emit(record)) == record
    for _ in range(10_000):
        snap = PmCountersSnapshot(
            power_w=rng.randrange(0, 4000),
            energy_j=rng.randrange(0, 2**40),
            generation=rng.randrange(0, 50),
            startup=rng.randrange(0, 5),
            freshness=rng.randrange(0, 2**32),
            version=rng.randrange(0, 4),
            power_cap_w=rng.randrange(0, 500),
        )
        assert parse_snapshot(render_files(snap)) == snap

    assert parse_file("power", "43 W\n") == 43
    assert parse_file("energy", "18328219 J\n") == 18328219
    line = "...cmdname: ./cosmo energy ['energy_used', 159028]"
    assert parse(line).energy_used_j == 159028
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    _ok(f"criterion 9: 2x10^4 round trips + literal examples (in {elapsed:.2f}s)")


def test_c10_integration_oracle():
    t0 = time.perf_counter()
    rng = random.Random(1234)
    for _ in range(1000):
        n = rng.randint(2, 80)
        powers = [rng.randrange(0, 2**18) / 256.0 for _ in range(n)]
        sensor = node_sensor(0, 0)
        store = make_trace(TelemetryStore(), sensor, powers)
        end = n * 1000
        got = store.integrate_energy([sensor], Interval(0, end))
        expect = staircase_energy(store.query_series(None, Interval(0, end)), 0, end)
        assert got == expect  # exact
        cut = rng.randint(1, n - 1) * 1000
        left = store.integrate_energy([sensor], Interval(0, cut))
        right = store.integrate_energy([sensor], Interval(cut, end))
        assert left + right == got  # exact additivity on the sample grid
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0
    _ok(f"criterion 10: 10^3 brute-force integration oracles, exact (in {elapsed:.2f}s)")


def test_c11_desk_scale_declaration():
    # Absolute facility readings of the published runs are not reproducible on
    # synthetic desk-scale clusters; the published table values enter only as
    # fixture inputs for derived-column and consistency checks, and the cp2k
    # scenario is informational because its meter was faulty.
    rows, _ = cosmo_results_rows()
    assert len(rows) == 4
    result = run_scenario("cp2k")
    assert all(c.informational for c in result.checks)
    _ok(
        "criterion 11: declared not reproducible at desk scale; fixture tables load "
        "and cp2k stays informational"
    )
