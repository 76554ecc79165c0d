import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmdbkit.errors import ApidNotFound, MalformedLine, NoEnergyField
from pmdbkit.rur import RurRecord, emit, find_energy, parse

COSMO_LINE = "...cmdname: ./cosmo energy ['energy_used', 159028]"

cmdnames = st.text(
    alphabet=st.characters(
        whitelist_categories=("Lu", "Ll", "Nd"), whitelist_characters="./_-"
    ),
    min_size=1,
    max_size=24,
)
records = st.builds(
    RurRecord,
    apid=st.integers(1, 2**40),
    cmdname=cmdnames,
    energy_used_j=st.integers(0, 2**50),
)


def test_emit_canonical_line():
    line = emit(RurRecord(2371227, "./cosmo", 159028))
    assert line == "apid: 2371227, cmdname: ./cosmo energy ['energy_used', 159028]"
    assert "cmdname: ./cosmo energy ['energy_used', 159028]" in line


def test_emit_zero_energy():
    assert "['energy_used', 0]" in emit(RurRecord(1, "./a", 0))


def test_emit_requires_apid():
    with pytest.raises(ValueError):
        emit(RurRecord(None, "./a", 1))


def test_parse_example_line():
    record = parse(COSMO_LINE)
    assert record.energy_used_j == 159028
    assert record.cmdname == "./cosmo"
    assert record.apid is None  # prefix carries no apid field


def test_parse_errors():
    with pytest.raises(NoEnergyField):
        parse("apid: 1, cmdname: ./cosmo cputime ['secs', 12]")
    with pytest.raises(MalformedLine):
        parse("apid: 1, cmdname: ./cosmo energy ['energy_used', twelve]")
    with pytest.raises(MalformedLine):
        parse("energy ['energy_used', 5]")  # no cmdname anchor


@given(records)
@settings(max_examples=200)
def test_round_trip(record):
    assert parse(emit(record)) == record


@given(records, st.integers(0, 2**31))
@settings(max_examples=100)
def test_whitespace_perturbation(record, seed):
    line = emit(record)
    rng = random.Random(seed)
    # Widen whitespace at token boundaries; the parse must not change.
    for token in (" energy ", ", cmdname: ", "', "):
        if token in line and rng.random() < 0.8:
            line = line.replace(token, token.replace(" ", " " * rng.randint(1, 3)))
    assert parse(line) == record


def test_find_energy_in_file(tmp_path):
    path = tmp_path / "rur.txt"
    lines = [
        "uid: 1000, apid: 12371227, cmdname: ./other energy ['energy_used', 777]",
        "uid: 1000, apid: 2371227, cmdname: ./cosmo energy ['energy_used', 159028]",
        "uid: 1000, apid: 2371227, cmdname: ./cosmo cputime ['secs', 10]",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    assert find_energy(path, 2371227) == 159028
    assert find_energy(path, 12371227) == 777  # word-boundary match, not substring
    with pytest.raises(ApidNotFound):
        find_energy(path, 555)


def test_find_energy_skips_non_energy_lines(tmp_path):
    path = tmp_path / "rur.txt"
    path.write_text(
        "apid: 99, cmdname: ./job taskstats ['utime', 4]\n"
        "apid: 99, cmdname: ./job energy ['energy_used', 42]\n",
        encoding="utf-8",
    )
    assert find_energy(path, 99) == 42


def test_record_validation():
    with pytest.raises(ValueError):
        RurRecord(1, "bad cmd", 1)
    with pytest.raises(ValueError):
        RurRecord(1, "", 1)
    with pytest.raises(ValueError):
        RurRecord(1, "./a", -1)
