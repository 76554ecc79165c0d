#!/usr/bin/env python3
"""Run every validation scenario and print the comparison rows."""

import sys

from pmdbkit import run_scenario, scenario_names


def main() -> int:
    names = sys.argv[1:] or scenario_names()
    failed = False
    for name in names:
        result = run_scenario(name)
        print(f"== {result.name} ==")
        for row in result.rows:
            cells = [
                f"rur={row.rur_w:.1f} W" if row.rur_w is not None else "rur=-",
                f"job={row.pmdb_job_w:.1f} W" if row.pmdb_job_w is not None else "job=-",
                f"cab={row.pmdb_cab_w:.1f} W" if row.pmdb_cab_w is not None else "cab=-",
                f"facility={row.facility_w:.1f} W" if row.facility_w is not None else "facility=-",
            ]
            print(f"  {row.label}: {', '.join(cells)}  (max diff {row.max_pairwise_rel_diff:.3%})")
        for check in result.checks:
            tag = "INFO" if check.informational else ("PASS" if check.passed else "FAIL")
            print(f"  [{tag}] {check.label}: {check.value:.6g}")
        failed = failed or not result.passed
        print()
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
