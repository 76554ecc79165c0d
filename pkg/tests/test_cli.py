import json

import pytest

from pmdbkit import (
    CorrectionParams,
    JobRegistry,
    TelemetryStore,
    build_report,
)
from pmdbkit.cli import main

DEMO_TOML = """\
seed = 42
horizon_s = 20
service_node_watts = 25.0

[topology]
cabinets = 1
nodes_per_cabinet = 16
service_nodes_per_cabinet = 4
blowers = 1

[[profiles]]
apid = 2371227
jobid = 88
cmdname = "./cosmo"
cabinet = 0
node_count = 9
start_ms = 0
end_ms = 20000
cpu_load = 0.5
gpu_load = 0.25
pstate_khz = 2600000
"""


@pytest.fixture
def demo(tmp_path):
    config = tmp_path / "demo.toml"
    config.write_text(DEMO_TOML, encoding="utf-8")
    store = tmp_path / "samples.ndjson"
    jobs = tmp_path / "jobs.json"
    rc = main(
        ["simulate", "--config", str(config), "--out", str(store), "--jobs", str(jobs)]
    )
    assert rc == 0
    return {"config": config, "store": store, "jobs": jobs, "dir": tmp_path}


def test_simulate_writes_artifacts(demo):
    store = TelemetryStore.load_ndjson(demo["store"])
    assert len(store) > 0
    registry = JobRegistry.load_manifest(demo["jobs"])
    assert registry.lookup(2371227).finished


def test_simulate_byte_stable(demo, tmp_path):
    again = tmp_path / "again.ndjson"
    assert main(["simulate", "--config", str(demo["config"]), "--out", str(again)]) == 0
    assert again.read_bytes() == demo["store"].read_bytes()


def test_seed_env_override(demo, tmp_path, monkeypatch):
    monkeypatch.setenv("PMDBKIT_SEED", "7")
    other = tmp_path / "other.ndjson"
    assert main(["simulate", "--config", str(demo["config"]), "--out", str(other)]) == 0
    assert other.read_bytes() != demo["store"].read_bytes()


def test_ingest_summary(demo, capsys, tmp_path):
    out = tmp_path / "normalized.ndjson"
    rc = main(["ingest", "--store", str(demo["store"]), "--out", str(out)])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["samples"] == len(TelemetryStore.load_ndjson(demo["store"]))
    assert summary["t_min_ms"] == 0
    assert out.read_bytes() == demo["store"].read_bytes()  # already normalized


def test_query_apid_matches_library(demo, capsys):
    rc = main(
        [
            "query",
            "--apid",
            "2371227",
            "--store",
            str(demo["store"]),
            "--jobs",
            str(demo["jobs"]),
            "--config",
            str(demo["config"]),
        ]
    )
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    store = TelemetryStore.load_ndjson(demo["store"])
    registry = JobRegistry.load_manifest(demo["jobs"])
    params = CorrectionParams(blowers_total=1, cabinets_total=1)
    report = build_report(store, registry.lookup(2371227), params, nodes_per_cabinet=16)
    assert payload == report.to_dict()
    assert payload["eq2_j"] >= payload["eq1_j"]


def test_query_cabinet(demo, capsys):
    rc = main(
        [
            "query",
            "--cabinet",
            "0",
            "--from-ms",
            "0",
            "--to-ms",
            "20000",
            "--store",
            str(demo["store"]),
        ]
    )
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["energy_j"] > 0
    assert payload["mean_power_w"] == pytest.approx(payload["energy_j"] / 20.0)


def test_query_usage_errors(demo):
    assert main(["query", "--store", str(demo["store"])]) == 2
    assert main(["query", "--apid", "1", "--store", str(demo["store"])]) == 2


def test_report_and_rur_find(demo, capsys, tmp_path):
    rur_file = tmp_path / "rur.txt"
    rc = main(
        [
            "report",
            "--store",
            str(demo["store"]),
            "--jobs",
            str(demo["jobs"]),
            "--out",
            str(rur_file),
        ]
    )
    assert rc == 0
    text = rur_file.read_text(encoding="utf-8")
    assert "cmdname: ./cosmo energy ['energy_used', " in text

    rc = main(["rur", "--find", "2371227", "--file", str(rur_file)])
    assert rc == 0
    printed = capsys.readouterr().out.strip()
    assert printed.endswith(" J")
    joules = int(printed.split()[0])
    # RUR is the store's node-level energy rounded to integer joules.
    store = TelemetryStore.load_ndjson(demo["store"])
    registry = JobRegistry.load_manifest(demo["jobs"])
    from pmdbkit import job_node_energy

    e_n, _, _ = job_node_energy(store, registry.lookup(2371227))
    assert joules == round(e_n)


def test_rur_find_missing_apid(demo, tmp_path, capsys):
    rur_file = tmp_path / "empty.txt"
    rur_file.write_text("", encoding="utf-8")
    assert main(["rur", "--find", "1", "--file", str(rur_file)]) == 1
    assert "error" in capsys.readouterr().err


def test_pm_render(demo, capsys):
    rc = main(
        ["pm", "--config", str(demo["config"]), "--node", "node/c0/n0", "--at-ms", "1500"]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "power: " in out and " W" in out
    assert "energy: " in out and " J" in out
    assert "freshness: 15" in out


def test_pm_materialize(demo, tmp_path):
    target = tmp_path / "sysfs"
    rc = main(
        [
            "pm",
            "--config",
            str(demo["config"]),
            "--node",
            "node/c0/n0",
            "--at-ms",
            "0",
            "--out",
            str(target),
        ]
    )
    assert rc == 0
    assert (target / "pm_counters" / "power").read_text().endswith(" W\n")
    assert (target / "pm_counters" / "power_cap").read_text() == "0\n"


def test_tune_table_and_json(capsys, tmp_path):
    assert main(["tune"]) == 0
    out = capsys.readouterr().out
    assert "best:" in out and "split=1.00" in out

    json_path = tmp_path / "tune.json"
    assert main(["tune", "--green500", "--format", "json", "--out", str(json_path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["best"]["pstate_khz"] == 1_900_000
    assert json.loads(json_path.read_text())["best"]["split"] == 1.0


def test_validate_scenarios(capsys):
    assert main(["validate", "--scenario", "green500"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert main(["validate", "--scenario", "green500", "--out", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["passed"] is True


def test_validate_unknown_scenario(capsys):
    assert main(["validate", "--scenario", "bogus"]) == 1
    assert "error" in capsys.readouterr().err


def test_usage_error_exit_code(capsys):
    assert main([]) == 2
    assert main(["simulate"]) == 2  # --config is required
    capsys.readouterr()


def test_missing_file_is_domain_error(capsys, tmp_path):
    assert main(["ingest", "--store", str(tmp_path / "nope.ndjson")]) == 1
    assert "error" in capsys.readouterr().err
