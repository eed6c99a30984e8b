import csv
import io
import json

import jsonschema
import pytest

from blockid import cli
from blockid.identities import IdentityReport
from blockid.series import TruncatedSeries

from test_acceptance import EVEN_TABLE


def call(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out)
    return code, out.getvalue()


def call_json(schema, *argv):
    code, text = call(*argv, "--json")
    assert code == 0
    doc = json.loads(text)
    jsonschema.validate(doc, cli.load_schema(schema))
    return doc


def test_verify_main_json():
    doc = call_json("identity_report", "verify", "main", "--order", "10", "--zwindow", "6")
    assert doc["equal"] is True and doc["order"] == 10


def test_verify_text_reports_equal():
    code, text = call("verify", "two-exclusion", "--order", "6", "--zwindow", "3")
    assert code == 0 and "equal" in text


def test_verify_exit_one_on_mismatch(monkeypatch):
    def broken(identity, order=None, z_window=None):
        rep = IdentityReport(identity, 1, None)
        rep.compare("lhs vs rhs", TruncatedSeries.from_q_coeffs([1, 1]), TruncatedSeries.from_q_coeffs([1, 2]))
        return rep

    monkeypatch.setattr(cli, "run_identity", broken)
    code, text = call("verify", "main")
    assert code == 1 and "NOT equal" in text and "q^1" in text


@pytest.mark.parametrize("argv", [
    ("verify", "nope"),
    ("verify", "main", "--order", "-1"),
    ("enumerate", "--n", "-2"),
    ("biject", "psi"),
    ("biject", "phi", "--gfp", "1 1 1;0 0 0"),
    ("simulate", "--window", "8"),
    ("simulate", "--q", "abc", "--jumps", "10"),
    ("sequence", "nonexistent"),
    (),
])
def test_usage_errors_exit_two(argv, capsys):
    code, _ = call(*argv)
    assert code == 2
    assert "usage" in capsys.readouterr().err


def test_sequence_csv_matches_table():
    code, text = call("sequence", "s_even", "--order", "8", "--csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    got = {}
    for r in rows:
        got.setdefault(int(r["n"]), {})[int(r["m"])] = int(r["coeff"])
    assert got == EVEN_TABLE


def test_sequence_json_and_plain():
    doc = call_json("series_terms", "sequence", "s_k", "--k", "3", "--order", "8")
    assert [t["coeff"] for t in doc["terms"]] == [1, 1, 3, 6, 11, 18, 31, 49, 78]
    code, text = call("sequence", "asep-even", "--order", "6")
    assert text.split() == ["1", "0", "1", "0", "2", "0", "3"]


def test_biject_psi():
    code, text = call("biject", "psi", "--omega", "3,0,1,2,2,0,1,1,0,1,0", "--class", "even")
    assert code == 0 and text.startswith("(3 1 1 0 ; 5 2 2 1)")
    doc = call_json("biject", "biject", "psi", "--omega", "3,0,1,2,2,0,1,1,0,1,0")
    assert doc["output"]["weight"] == 19 and doc["output"]["distinct"] == 4


def test_biject_inverse_and_others():
    code, text = call("biject", "psi-inverse", "--gfp", "3 1 1 0 ; 5 2 2 1")
    assert code == 0 and text.startswith("3,0,1,2,2,0,1 ")
    call_json("biject", "biject", "phi", "--gfp", "4 2 2;2 2 0", "--ell", "2")
    code, text = call("biject", "frobenius", "--partition", "8,8,7,3,2,1,1")
    assert text.startswith("(7 6 4 ; 6 3 1)")
    code, text = call("biject", "wright", "--k", "1", "--gfp", "7 6 4;6 3 1", "--shift", "4")
    assert code == 0 and "weight=40" in text


def test_enumerate_json():
    doc = call_json("gfp_list", "enumerate", "--n", "5", "--offset", "0")
    assert sum(1 for g in doc if g["distinct"] == 2) == 12
    assert call("enumerate", "--n", "5")[1] == call("enumerate", "--n", "5")[1]


def test_expand_csv():
    code, text = call("expand", "k2", "--order", "4", "--zwindow", "1")
    assert code == 0 and text.splitlines()[0] == "z,n,m,coeff"


def test_simulate_json_is_deterministic():
    argv = ("simulate", "--model", "asep", "--window", "4", "--jumps", "20000", "--seed", "3")
    doc = call_json("simulation", *argv)
    assert doc["conserved"] == [0] and doc["jumps"] == 20000
    assert call_json("simulation", *argv) == doc
    for row in doc["occupation"]:
        assert abs(row["fraction"] - row["exact"]) < 0.1
