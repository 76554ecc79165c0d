"""ALPS-style job registry: apid -> (node set, time interval).

The registry carries no numeric content of its own; energy accounting over a
job is exactly accounting over its (nodes, interval) pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Iterator

from .errors import (
    AlreadyFinished,
    DuplicateApid,
    EmptyNodeSet,
    EndBeforeStart,
    UnknownApid,
)
from .sensors import SensorDomain, SensorId, parse_sensor_path
from .telemetry import Interval


@dataclass(frozen=True)
class JobRecord:
    apid: int
    jobid: int
    cmdname: str
    nodes: frozenset[SensorId]
    start_ms: int
    end_ms: int | None = None

    def __post_init__(self) -> None:
        if not self.nodes:
            raise EmptyNodeSet(f"apid {self.apid} has no nodes")
        for n in self.nodes:
            if n.domain is not SensorDomain.NODE:
                raise ValueError(f"job nodes must be node sensors, got {n}")

    @property
    def finished(self) -> bool:
        return self.end_ms is not None

    @property
    def interval(self) -> Interval:
        if self.end_ms is None:
            raise ValueError(f"apid {self.apid} is still open")
        return Interval(self.start_ms, self.end_ms)


class JobRegistry:
    def __init__(self) -> None:
        self._jobs: dict[int, JobRecord] = {}

    def __len__(self) -> int:
        return len(self._jobs)

    def __iter__(self) -> Iterator[JobRecord]:
        return iter(sorted(self._jobs.values(), key=lambda j: j.apid))

    def register_job(
        self,
        apid: int,
        jobid: int,
        cmdname: str,
        nodes: frozenset[SensorId] | set[SensorId],
        start_ms: int,
    ) -> None:
        if apid in self._jobs:
            raise DuplicateApid(f"apid {apid} already registered")
        self._jobs[apid] = JobRecord(
            apid=apid, jobid=jobid, cmdname=cmdname, nodes=frozenset(nodes), start_ms=start_ms
        )

    def finish_job(self, apid: int, end_ms: int) -> None:
        job = self._jobs.get(apid)
        if job is None:
            raise UnknownApid(f"apid {apid} not registered")
        if job.finished:
            raise AlreadyFinished(f"apid {apid} already finished")
        if end_ms <= job.start_ms:
            raise EndBeforeStart(f"apid {apid}: end {end_ms} <= start {job.start_ms}")
        self._jobs[apid] = replace(job, end_ms=end_ms)

    def lookup(self, apid: int) -> JobRecord:
        job = self._jobs.get(apid)
        if job is None:
            raise UnknownApid(f"apid {apid} not registered")
        return job

    # -- manifest files (one JSON object per line) -------------------------

    def dump_manifest(self, target: str | Path | IO[str]) -> None:
        def write(fh: IO[str]) -> None:
            for job in self:
                fh.write(
                    json.dumps(
                        {
                            "apid": job.apid,
                            "jobid": job.jobid,
                            "cmdname": job.cmdname,
                            "nodes": sorted(n.path for n in job.nodes),
                            "start_ms": job.start_ms,
                            "end_ms": job.end_ms,
                        },
                        separators=(",", ":"),
                    )
                    + "\n"
                )

        if hasattr(target, "write"):
            write(target)
        else:
            with open(target, "w", encoding="utf-8") as fh:
                write(fh)

    @classmethod
    def load_manifest(cls, source: str | Path | IO[str]) -> "JobRegistry":
        registry = cls()
        if hasattr(source, "read"):
            text = source.read()
        else:
            text = Path(source).read_text(encoding="utf-8")
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                nodes = frozenset(parse_sensor_path(p) for p in obj["nodes"])
                registry.register_job(
                    apid=int(obj["apid"]),
                    jobid=int(obj["jobid"]),
                    cmdname=str(obj["cmdname"]),
                    nodes=nodes,
                    start_ms=int(obj["start_ms"]),
                )
                if obj.get("end_ms") is not None:
                    registry.finish_job(int(obj["apid"]), int(obj["end_ms"]))
            except (KeyError, TypeError, json.JSONDecodeError) as exc:
                raise ValueError(f"bad job manifest line: {line!r}") from exc
        return registry
