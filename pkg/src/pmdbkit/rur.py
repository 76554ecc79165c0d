"""Resource Utilization Report lines: per-application node energy totals.

A record serializes to

    apid: 2371227, cmdname: ./cosmo energy ['energy_used', 159028]

and the parser only anchors on the ``cmdname: <cmd> energy ['energy_used', <J>]``
suffix, so lines with unknown prefixes (timestamps, uids) still parse. Lookup
by apid works grep-style: match the apid token anywhere on the line, then
extract the energy field.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ApidNotFound, MalformedLine, NoEnergyField

_ENERGY_RE = re.compile(
    r"cmdname:\s*(?P<cmd>\S+)\s+energy\s*\[\s*'energy_used'\s*,\s*(?P<joules>\d+)\s*\]"
)
_APID_RE = re.compile(r"apid:\s*(\d+)")


@dataclass(frozen=True)
class RurRecord:
    apid: int | None
    cmdname: str
    energy_used_j: int

    def __post_init__(self) -> None:
        if self.energy_used_j < 0:
            raise ValueError("energy_used must be >= 0")
        if not self.cmdname or re.search(r"\s", self.cmdname):
            raise ValueError("cmdname must be a non-empty whitespace-free token")


def emit(record: RurRecord) -> str:
    """One canonical report line for the record; apid must be known."""
    if record.apid is None:
        raise ValueError("cannot emit a record without an apid")
    return (
        f"apid: {record.apid}, cmdname: {record.cmdname} "
        f"energy ['energy_used', {record.energy_used_j}]"
    )


def parse(line: str) -> RurRecord:
    """Extract (apid, cmdname, energy_used) from a report line.

    apid is None when the line's prefix does not carry an ``apid:`` field.
    """
    m = _ENERGY_RE.search(line)
    if not m:
        if "energy" not in line:
            raise NoEnergyField(f"no energy field in {line!r}")
        raise MalformedLine(f"cannot parse energy record from {line!r}")
    apid_match = _APID_RE.search(line[: m.start()])
    apid = int(apid_match.group(1)) if apid_match else None
    return RurRecord(apid=apid, cmdname=m.group("cmd"), energy_used_j=int(m.group("joules")))


def find_energy(rur_file: str | Path, apid: int) -> int:
    """energy_used of the first record in the file matching the apid."""
    token = re.compile(rf"\b{apid}\b")
    with open(rur_file, encoding="utf-8") as fh:
        for line in fh:
            if not token.search(line):
                continue
            try:
                return parse(line).energy_used_j
            except (NoEnergyField, MalformedLine):
                continue
    raise ApidNotFound(f"apid {apid} not found in {rur_file}")
