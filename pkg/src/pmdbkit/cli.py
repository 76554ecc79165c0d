"""Command line entry point.

Subcommands: simulate, ingest, query, report, rur, pm, tune, validate.
Exit codes: 0 success, 1 domain error (message on stderr), 2 usage error.
The PMDBKIT_SEED environment variable overrides the config seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import pm_counters, rur, tuner
from .accounting import (
    CorrectionParams,
    build_report,
    cabinet_energy,
    job_node_energy,
    mean_power,
)
from .config import load_scenario
from .errors import PmdbError
from .jobs import JobRegistry
from .telemetry import JOULES_PER_KWH, Interval, TelemetryStore
from .validation import run_scenario, scenario_names


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pmdbkit",
        description="Cluster power telemetry simulator and job energy accounting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario config and write NDJSON samples")
    p.add_argument("--config", required=True, help="scenario config (.toml or .json)")
    p.add_argument("--out", help="NDJSON output path (default: stdout)")
    p.add_argument("--jobs", help="also write a job manifest for profiles carrying an apid")
    p.add_argument("--seed", type=int, help="override the config seed")

    p = sub.add_parser("ingest", help="validate an NDJSON sample file and normalize it")
    p.add_argument("--store", required=True, help="NDJSON input path")
    p.add_argument("--out", help="normalized NDJSON output path")

    p = sub.add_parser("query", help="job or cabinet energy over a sample store")
    p.add_argument("--store", required=True)
    p.add_argument("--apid", type=int, help="job query (needs --jobs)")
    p.add_argument("--jobs", help="job manifest path")
    p.add_argument("--cabinet", type=int, help="cabinet query (needs --from-ms/--to-ms)")
    p.add_argument("--from-ms", type=int, dest="from_ms")
    p.add_argument("--to-ms", type=int, dest="to_ms")
    p.add_argument("--config", help="scenario config supplying correction constants")

    p = sub.add_parser("report", help="write RUR lines for finished jobs in a store")
    p.add_argument("--store", required=True)
    p.add_argument("--jobs", required=True)
    p.add_argument("--apid", type=int, help="restrict to one apid")
    p.add_argument("--out", help="RUR file path (default: stdout)")

    p = sub.add_parser("rur", help="search a RUR file for a job's energy")
    p.add_argument("--find", type=int, required=True, metavar="APID")
    p.add_argument("--file", required=True)

    p = sub.add_parser("pm", help="render pm_counters files for a node at a point in time")
    p.add_argument("--config", required=True)
    p.add_argument("--node", required=True, help="node sensor path, e.g. node/c0/n0")
    p.add_argument("--at-ms", type=int, dest="at_ms", default=0)
    p.add_argument("--out", help="materialize the pm_counters/ directory under this path")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("tune", help="sweep P-state x DGEMM split for GFLOPS/W")
    p.add_argument("--config", help="calibration JSON (default: built-in defaults)")
    p.add_argument("--green500", action="store_true", help="use the shipped green500 calibration")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--out", help="also write machine-readable JSON here")

    p = sub.add_parser("validate", help="run an end-to-end comparison scenario")
    p.add_argument("--scenario", required=True, help=", ".join(scenario_names()))
    p.add_argument("--out", choices=("table", "json"), default="table")
    p.add_argument("--seed", type=int)

    return parser


def _seed_override(args_seed: int | None) -> int | None:
    env = os.environ.get("PMDBKIT_SEED")
    if args_seed is not None:
        return args_seed
    if env is not None:
        return int(env)
    return None


def _cmd_simulate(args) -> int:
    cfg = load_scenario(args.config)
    sim = cfg.make_simulator(seed=_seed_override(args.seed))
    store = sim.run(cfg.workload(), cfg.horizon_s)
    if args.out:
        store.dump_ndjson(args.out)
    else:
        store.dump_ndjson(sys.stdout)
    if args.jobs:
        cfg.job_registry().dump_manifest(args.jobs)
    return 0


def _cmd_ingest(args) -> int:
    store = TelemetryStore.load_ndjson(args.store)
    if args.out:
        store.dump_ndjson(args.out)
    times = [s.t_ms for s in store.query_series(None, Interval(0, 2**62))] if len(store) else []
    summary = {
        "sensors": len(store.sensors()),
        "samples": len(store),
        "t_min_ms": min(times, default=None),
        "t_max_ms": max(times, default=None),
    }
    print(json.dumps(summary, indent=2))
    return 0


def _correction_params(config_path: str | None) -> tuple[CorrectionParams, int]:
    """(params, nodes_per_cabinet) from a scenario config, or full-scale defaults."""
    if config_path:
        cfg = load_scenario(config_path)
        params = CorrectionParams(
            acdc_efficiency=cfg.acdc_efficiency,
            aries_watts_per_blade=cfg.aries_watts_per_blade,
            blower_watts=cfg.blower_model.base_w,
            blowers_total=cfg.topology.blowers,
            cabinets_total=cfg.topology.cabinets,
        )
        return params, cfg.topology.nodes_per_cabinet
    return CorrectionParams(), 192


def _cmd_query(args) -> int:
    store = TelemetryStore.load_ndjson(args.store)
    if (args.apid is None) == (args.cabinet is None):
        print("query needs exactly one of --apid or --cabinet", file=sys.stderr)
        return 2
    if args.apid is not None:
        if not args.jobs:
            print("--apid requires --jobs", file=sys.stderr)
            return 2
        registry = JobRegistry.load_manifest(args.jobs)
        params, nodes_per_cabinet = _correction_params(args.config)
        report = build_report(store, registry.lookup(args.apid), params, nodes_per_cabinet)
        print(json.dumps(report.to_dict(), indent=2))
        return 0
    if args.from_ms is None or args.to_ms is None:
        print("--cabinet requires --from-ms and --to-ms", file=sys.stderr)
        return 2
    interval = Interval(args.from_ms, args.to_ms)
    energy = cabinet_energy(store, args.cabinet, interval)
    print(
        json.dumps(
            {
                "cabinet": args.cabinet,
                "from_ms": interval.start_ms,
                "to_ms": interval.end_ms,
                "energy_j": energy,
                "energy_kwh": energy / JOULES_PER_KWH,
                "mean_power_w": mean_power(energy, interval.duration_s),
            },
            indent=2,
        )
    )
    return 0


def _cmd_report(args) -> int:
    store = TelemetryStore.load_ndjson(args.store)
    registry = JobRegistry.load_manifest(args.jobs)
    if args.apid is not None:
        jobs = [registry.lookup(args.apid)]  # open job -> JobOpen error
    else:
        jobs = [j for j in registry if j.finished]
    lines = []
    for job in jobs:
        e_n, _, _ = job_node_energy(store, job)
        lines.append(rur.emit(rur.RurRecord(job.apid, job.cmdname, round(e_n))))
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_rur(args) -> int:
    joules = rur.find_energy(args.file, args.find)
    print(f"{joules} J")
    return 0


def _cmd_pm(args) -> int:
    cfg = load_scenario(args.config)
    sim = cfg.make_simulator(seed=_seed_override(args.seed))
    sim.run(cfg.workload(), cfg.horizon_s)
    snapshot = pm_counters.poll(sim, args.node, args.at_ms)
    files = pm_counters.render_files(snapshot)
    if args.out:
        directory = pm_counters.materialize(snapshot, args.out)
        print(str(directory))
    elif args.format == "json":
        print(json.dumps({name: files[name] for name in pm_counters.FILE_NAMES}, indent=2))
    else:
        for name in pm_counters.FILE_NAMES:
            sys.stdout.write(f"{name}: {files[name]}")
    return 0


def _cmd_tune(args) -> int:
    if args.green500 and args.config:
        print("choose either --green500 or --config, not both", file=sys.stderr)
        return 2
    if args.green500:
        model = tuner.green500_calibration()
    elif args.config:
        model = tuner.load_calibration(args.config)
    else:
        model = tuner.PerfModel()
    table = tuner.sweep(model)
    payload = {
        "points": [p.to_dict() for p in table.points],
        "best": table.best.to_dict(),
    }
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(f"{'khz':>8} {'split':>6} {'gflops':>9} {'watts':>8} {'gf_per_w':>9}")
        for p in table.points:
            print(
                f"{p.pstate_khz:>8} {p.split:>6.2f} {p.gflops:>9.1f} "
                f"{p.watts:>8.2f} {p.gf_per_w:>9.4f}"
            )
        b = table.best
        print(
            f"best: khz={b.pstate_khz} split={b.split:.2f} "
            f"gflops={b.gflops:.1f} watts={b.watts:.2f} gf_per_w={b.gf_per_w:.4f}"
        )
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return 0


def _cmd_validate(args) -> int:
    result = run_scenario(args.scenario, seed=args.seed)
    if args.out == "json":
        print(json.dumps(result.to_dict(), indent=2))
    else:
        def fmt(value):
            return f"{value:>12.1f}" if value is not None else f"{'-':>12}"

        print(f"scenario: {result.name}")
        print(
            f"{'label':<24} {'rur_w':>12} {'job_w':>12} {'cab_w':>12} "
            f"{'facility_w':>12} {'max_diff':>9}"
        )
        for row in result.rows:
            print(
                f"{row.label:<24} {fmt(row.rur_w)} {fmt(row.pmdb_job_w)} "
                f"{fmt(row.pmdb_cab_w)} {fmt(row.facility_w)} "
                f"{row.max_pairwise_rel_diff:>8.3%}"
            )
        for check in result.checks:
            status = "PASS" if check.passed else "FAIL"
            if check.informational:
                status = "INFO"
            print(f"{status}: {check.label} (value={check.value:.6g})")
    return 0 if result.passed else 1


_COMMANDS = {
    "simulate": _cmd_simulate,
    "ingest": _cmd_ingest,
    "query": _cmd_query,
    "report": _cmd_report,
    "rur": _cmd_rur,
    "pm": _cmd_pm,
    "tune": _cmd_tune,
    "validate": _cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (PmdbError, ValueError, OSError) as exc:
        print(f"pmdbkit: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
