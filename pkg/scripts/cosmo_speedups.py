#!/usr/bin/env python3
"""Derive cross-system speedups from the shipped COSMO-2 ensemble fixture."""

from pmdbkit import cosmo_results_rows, speedup_table

if __name__ == "__main__":
    rows, baseline = cosmo_results_rows()
    header = (
        f"{'system':<14} {'members':>7} {'wall_s':>7} {'mean_kw':>8} "
        f"{'ets_kwh':>8} {'kwh/member':>10} {'tts_x':>6} {'ets_x':>6}"
    )
    print(header)
    for row in speedup_table(rows, baseline):
        print(
            f"{row.label:<14} {row.ensemble_size:>7} {row.wall_s:>7.0f} "
            f"{row.mean_kw:>8.2f} {row.ets_kwh:>8.2f} {row.ets_per_member_kwh:>10.3f} "
            f"{row.tts_speedup:>6.2f} {row.ets_speedup:>6.2f}"
        )
    print(f"\nbaseline: {baseline}")
