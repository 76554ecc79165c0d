import io

import pytest

from pmdbkit import JobRegistry, node_sensor
from pmdbkit.errors import (
    AlreadyFinished,
    DuplicateApid,
    EmptyNodeSet,
    EndBeforeStart,
    UnknownApid,
)

COSMO_NODES = frozenset(node_sensor(0, n) for n in range(9))


def registry_with_cosmo():
    registry = JobRegistry()
    registry.register_job(2371227, jobid=88, cmdname="./cosmo", nodes=COSMO_NODES, start_ms=0)
    return registry


def test_register_and_lookup():
    registry = registry_with_cosmo()
    job = registry.lookup(2371227)
    assert job.cmdname == "./cosmo"
    assert len(job.nodes) == 9
    assert not job.finished


def test_duplicate_apid():
    registry = registry_with_cosmo()
    with pytest.raises(DuplicateApid):
        registry.register_job(2371227, 1, "./other", COSMO_NODES, 0)


def test_empty_node_set():
    with pytest.raises(EmptyNodeSet):
        JobRegistry().register_job(1, 1, "./x", frozenset(), 0)


def test_finish_sets_interval():
    registry = registry_with_cosmo()
    registry.finish_job(2371227, 1_539_000)
    job = registry.lookup(2371227)
    assert job.finished
    assert job.interval.duration_s == 1539.0


def test_finish_errors():
    registry = registry_with_cosmo()
    with pytest.raises(UnknownApid):
        registry.finish_job(999, 1000)
    with pytest.raises(EndBeforeStart):
        registry.finish_job(2371227, 0)
    registry.finish_job(2371227, 1000)
    with pytest.raises(AlreadyFinished):
        registry.finish_job(2371227, 2000)


def test_lookup_unknown():
    with pytest.raises(UnknownApid):
        JobRegistry().lookup(42)


def test_lookup_is_read_only():
    registry = registry_with_cosmo()
    assert registry.lookup(2371227) == registry.lookup(2371227)


def test_jobs_may_share_nodes():
    registry = registry_with_cosmo()
    registry.register_job(2371228, 88, "./cosmo", COSMO_NODES, 500)
    assert len(registry) == 2


def test_non_node_sensors_rejected():
    from pmdbkit import gpu_sensor

    with pytest.raises(ValueError):
        JobRegistry().register_job(1, 1, "./x", frozenset({gpu_sensor(0, 0)}), 0)


def test_manifest_round_trip():
    registry = registry_with_cosmo()
    registry.register_job(3000001, 90, "./xhpl", frozenset({node_sensor(1, 0)}), 100)
    registry.finish_job(2371227, 1_539_000)
    buf = io.StringIO()
    registry.dump_manifest(buf)
    reloaded = JobRegistry.load_manifest(io.StringIO(buf.getvalue()))
    assert len(reloaded) == 2
    assert reloaded.lookup(2371227) == registry.lookup(2371227)
    assert not reloaded.lookup(3000001).finished
    buf2 = io.StringIO()
    reloaded.dump_manifest(buf2)
    assert buf.getvalue() == buf2.getvalue()
