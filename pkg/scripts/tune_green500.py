#!/usr/bin/env python3
"""Sweep P-state x DGEMM split and compare the default and shipped calibrations."""

from pmdbkit import PerfModel, green500_calibration, sweep


def show(label, model):
    table = sweep(model)
    print(f"== {label} ==")
    print(f"{'khz':>8} {'split':>6} {'gflops':>9} {'watts':>8} {'gf_per_w':>9}")
    for point in table.points:
        if point.split in (0.0, 0.5, 1.0):  # keep the listing readable
            print(
                f"{point.pstate_khz:>8} {point.split:>6.2f} {point.gflops:>9.1f} "
                f"{point.watts:>8.2f} {point.gf_per_w:>9.4f}"
            )
    best = table.best
    print(
        f"best: khz={best.pstate_khz} split={best.split:.2f} "
        f"gflops={best.gflops:.1f} watts={best.watts:.2f} gf_per_w={best.gf_per_w:.4f}\n"
    )


if __name__ == "__main__":
    show("default calibration", PerfModel())
    show("green500 calibration", green500_calibration())
