import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import TABLE_1
from metafib.bfile import BFile, serialize_bfile
from metafib.cli import run
from metafib import Conway, generate

DATA = Path(__file__).parent / "data"
TABLE1_ARGS = ["conway", "-k", "2", "-a", "0", "-b", "1", "--ics", "1,1"]


def test_gen_bfile_table1():
    code, out, _ = run(["gen", *TABLE1_ARGS, "-n", "22", "--format", "bfile"])
    lines = out.splitlines()
    assert code == 0 and len(lines) == 22
    assert [int(l.split()[1]) for l in lines] == TABLE_1
    assert lines[-1] == "22 14"


def test_gen_csv_conolly():
    code, out, _ = run(["gen", "conolly", "-s", "0", "--ics", "1,1,1", "-n", "9", "--format", "csv"])
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["n", "C(n)"] and len(rows) == 10 and rows[-1] == ["9", "4"]


def test_gen_json_and_table():
    code, out, _ = run(["gen", *TABLE1_ARGS, "-n", "5", "--format", "json"])
    doc = json.loads(out)
    assert code == 0 and doc["terms"] == TABLE_1[:5] and doc["status"] == "complete"
    code, out, _ = run(["gen", *TABLE1_ARGS, "-n", "5"])
    assert code == 0 and out.splitlines()[-1].split() == ["5", "3"]


def test_gen_general_terms():
    code, out, _ = run(["gen", "general", "--terms", "0:1,1:2", "--ics", "1,2", "-n", "6", "--format", "json"])
    assert code == 0 and len(json.loads(out)["terms"]) == 6


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "conway", "-k", "0", "-a", "0", "-b", "1", "--ics", "1,1", "-n", "5"],
        ["gen", "conway", "-k", "1", "-a", "0", "-b", "1", "--ics", "1,1"],
        ["gen", "conway", "-k", "1", "-a", "0", "-b", "3", "--ics", "1", "-n", "5"],
        ["gen", "conway", "-k", "1", "-a", "0", "-b", "1", "--ics", "1,x", "-n", "5"],
        ["gen", "spiral"],
        ["bogus"],
        [],
        ["trace", *TABLE1_ARGS, "--at", "2"],
        ["validate", "general", "--terms", "0:1", "--ics", "1"],
        ["check", "growth", *TABLE1_ARGS, "-n", "22"],
    ],
)
def test_usage_errors(argv):
    code, _, err = run(argv)
    assert code == 1 and err


def test_halted_exit_code():
    code, out, err = run(["gen", "conway", "-k", "1", "-a", "5", "-b", "1", "--ics", "1", "-n", "10"])
    assert code == 2 and "halted: term 2 undefined" in err and "interval empty" in err
    assert out.splitlines()[-1].split() == ["1", "1"]


def test_validate_examples():
    assert run(["validate", *TABLE1_ARGS])[0] == 0
    code, out, _ = run(["validate", "conway", "-k", "2", "-a", "0", "-b", "1", "--ics", "2,2", "--json"])
    failed = [h["name"] for h in json.loads(out)["hypotheses"] if not h["satisfied"]]
    assert code == 3 and "I.c A(1)=1" in failed
    code, out, _ = run(["validate", "conolly", "-s", "2", "--ics", "1,2,3"])
    assert code == 3 and "II" in out
    assert run(["validate", "conolly", "-s", "0", "--ics", "ones:3"])[0] == 0


def test_check_en():
    code, out, _ = run(["check", "en", "-k", "2", "-n", "22"])
    assert code == 0
    for e, prev in ((3, 2), (5, 3), (8, 5), (13, 8), (21, 13)):
        assert f"E_n={e:<10} A(E_n)={prev:<10} ok" in out


def test_check_noconsec_table1():
    code, out, _ = run(["check", "noconsec", *TABLE1_ARGS, "-n", "22"])
    assert code == 3 and "4" in out


def test_check_slow_and_split():
    assert run(["check", "slow", *TABLE1_ARGS, "-n", "22"])[0] == 0
    code, out, _ = run(["check", "split", "conolly", "-s", "0", "--ics", "1,1,1", "-n", "5000",
                        "--window", "1000,5000"])
    assert code == 0 and "ok" in out
    assert run(["check", "components", "conolly", "-s", "1", "--ics", "ones:4", "-n", "2000"])[0] == 0


def test_check_growth():
    code, out, _ = run(["check", "growth", *TABLE1_ARGS, "-n", "22", "--checkpoints", "1,11,22"])
    assert code == 0 and out.splitlines()[:3] == ["1 1", "11 7", "22 14"]


def test_check_bfile_a004001(tmp_path):
    code, out, _ = run(["check", "match", "conway", "-k", "1", "-a", "0", "-b", "1", "--ics", "1,1",
                        "--bfile", str(DATA / "A004001_head.txt")])
    assert code == 0 and "[1, 32]" in out
    # head from the reference file, tail generated, checked as one file
    terms = generate(Conway(1, 0, 1), [1, 1], 1000).values()
    path = tmp_path / "b004001.txt"
    path.write_text(serialize_bfile(BFile.from_terms(terms, header=["A004001"])))
    assert run(["check", "slow", "--bfile", str(path), "-n", "1000"])[0] == 0


def test_check_slow_bfile_violation(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1 1\n2 3\n3 4\n")
    code, out, _ = run(["check", "slow", "--bfile", str(path)])
    assert code == 3


def test_check_match_mismatch(tmp_path):
    path = tmp_path / "b.txt"
    path.write_text(serialize_bfile(BFile.from_terms([1, 1, 2, 3, 4])))
    code, out, _ = run(["check", "match", *TABLE1_ARGS, "--bfile", str(path)])
    assert code == 3 and "n=5" in out


def test_survey_outputs_are_deterministic(tmp_path):
    argv = ["survey", "conway", "-k", "1..2", "-a", "0..1", "-b", "1..2", "--ics", "ones:+0..+1",
            "-n", "500", "--no-timestamp"]
    for tag in ("x", "y"):
        code, _, _ = run([*argv, "--out", str(tmp_path / f"{tag}.json"), "--csv", str(tmp_path / f"{tag}.csv")])
        assert code == 0
    assert (tmp_path / "x.json").read_bytes() == (tmp_path / "y.json").read_bytes()
    assert (tmp_path / "x.csv").read_bytes() == (tmp_path / "y.csv").read_bytes()
    doc = json.loads((tmp_path / "x.json").read_text())
    assert doc["metadata"]["generated_at"] is None and len(doc["records"]) == 16


def test_survey_timestamp_present():
    code, out, _ = run(["survey", "conolly", "-s", "0", "-n", "100"])
    doc = json.loads(out)
    assert code == 0 and doc["metadata"]["generated_at"]
    assert doc["records"][0]["outcome"]["kind"] == "SlowToHorizon"


def test_survey_conolly_long_enough_ics():
    # all-ones needs length >= s + 3 for the recursion to start
    code, out, _ = run(["survey", "conolly", "-s", "0..4", "--ics", "ones:7..8", "-n", "20000",
                        "--no-timestamp"])
    assert code == 0
    assert {r["outcome"]["kind"] for r in json.loads(out)["records"]} == {"SlowToHorizon"}


def test_survey_conolly_short_ics_halt():
    code, out, _ = run(["survey", "conolly", "-s", "4", "--ics", "ones:3", "-n", "100", "--no-timestamp"])
    (rec,) = json.loads(out)["records"]
    assert code == 0 and rec["outcome"]["kind"] == "HaltedAt" and rec["outcome"]["n"] == 4


def test_ratio():
    code, out, _ = run(["ratio", "conolly", "-s", "0", "--ics", "1,1,1", "-n", "100000", "--ref", "half",
                        "--json"])
    doc = json.loads(out)
    assert code == 0 and doc["deviation"] < 1e-3
    code, out, _ = run(["ratio", *TABLE1_ARGS, "-n", "1000", "--ref", "phi"])
    assert code == 0 and "descriptive" in out


def test_trace():
    code, out, _ = run(["trace", *TABLE1_ARGS, "--at", "3"])
    assert code == 0 and out.startswith("A(3) = A(2) + A(1) = 1 + 1 = 2")
    code, out, _ = run(["trace", *TABLE1_ARGS, "--at", "3", "--json"])
    doc = json.loads(out)
    assert doc["composition_chains"][0] == [[1, 2, 1], [2, 1, 1]]
    assert doc["summand_arguments"] == [[2, 1], [1, 1]]


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"family": "conway", "k": 2, "a": 0, "b": 1, "ics": [1, 1],
                               "horizon": 5, "format": "bfile"}))
    code, out, _ = run(["gen", "--config", str(cfg)])
    assert code == 0 and len(out.splitlines()) == 5
    code, out, _ = run(["gen", "conway", "--config", str(cfg), "-n", "22"])
    assert code == 0 and out.splitlines()[-1] == "22 14"
    cfg.write_text(json.dumps({"family": "conway", "colour": 1}))
    assert run(["gen", "--config", str(cfg)])[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "metafib", "gen", *TABLE1_ARGS, "-n", "3",
                           "--format", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "n,A(n)\n1,1\n2,1\n3,2\n"
