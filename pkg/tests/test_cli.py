import io
import json

import pytest

from integralis.cli import parse_vars, run


def call(*argv):
    buf = io.StringIO()
    code, doc = run(list(argv) + ["--json"], stdout=buf)
    assert json.loads(buf.getvalue()) == json.loads(json.dumps(doc, sort_keys=True, default=str))
    return code, doc


def test_frobenius_and_defect():
    code, doc = call("frobenius", "ex1_23")
    assert code == 0 and doc["schemaVersion"] == 1
    assert doc["result"]["solvable"] is False
    assert doc["result"]["brackets"]["[L1,L2]"] == "(-x1 + 3)*d/dx2"
    assert call("defect", "ex1_23")[1]["result"]["defect"] == 1


def test_find_then_verify_round_trip():
    code, doc = call("find", "fi", "ex1_23", "--s", "2", "--k", "1")
    assert code == 0
    (w,) = doc["result"]["witnesses"]
    assert w["candidate"] == "x1*exp(-t1 - 3*t2)"
    code, ver = call("verify", "fi", "ex1_23", "--expr", w["candidate"])
    assert ver["result"]["certificate"]["verdict"] is True


def test_not_found_is_success():
    code, doc = call("find", "fi", "ex1_8", "--k", "1")
    assert code == 0 and doc["result"]["witnesses"] == [] and doc["result"]["stage"] == "wronskian-failed"


def test_verify_partial_integral_reports_cofactors():
    code, doc = call("verify", "pi", "ex3_10", "--expr", "x1+x2")
    assert doc["result"]["certificate"]["cofactors"] == ["x2 + x3", "x3 + x4"]


def test_counts_and_independence():
    assert call("fi-count", "ex1_14", "--s", "0")[1]["result"]["count"] == 1
    assert call("dim-basis", "ex3_13")[1]["result"]["dimension"] == 2
    assert call("independence", "ex3_13", "--expr", "x2/x1", "x3/x1")[1]["result"]["rank"] == 2
    assert call("independence", "--expr", "x1", "2*x1")[1]["result"]["rank"] == 1
    assert call("jacobian", "ex3_23")[1]["result"]["jacobian"] is True
    assert call("complete", "ex1_8")[1]["result"]["complete"] is False


def test_flow_check_command():
    code, doc = call(
        "flow-check", "ex1_14", "--expr", "x1*x2-x3", "--dir", "1,1", "--start", "t1=0,t2=0,x1=1/2,x2=1/3,x3=1/5"
    )
    assert code == 0 and doc["result"]["passed"] and doc["result"]["maxDeviation"] <= 1e-6


def test_deterministic_json():
    a, b = io.StringIO(), io.StringIO()
    run(["find", "pi", "ex3_13", "--k", "1", "--json", "--seed", "3"], stdout=a)
    run(["find", "pi", "ex3_13", "--k", "1", "--json", "--seed", "3"], stdout=b)
    assert a.getvalue() == b.getvalue()


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        [],
        ["find", "fi", "nosuch"],
        ["verify", "fi", "ex1_8", "--expr", "x1+"],
        ["find", "fi", "ex1_8", "--k", "seven"],
        ["fi-count", "ex1_14"],
        ["flow-check", "ex1_14", "--expr", "x3", "--dir", "1", "--start", "t1=0"],
    ],
)
def test_usage_errors_exit_1(argv):
    assert call(*argv)[0] == 1


def test_unsupported_requests_exit_2():
    code, doc = call("frobenius", "ex1_8")
    assert code == 2 and doc["status"] == "unsupported"
    assert call("verify", "pi", "ex3_10", "--expr", "exp(x1) + x2")[0] == 2


def test_text_output(capsys):
    code, _ = run(["dim-basis", "ex3_25"])
    assert code == 0
    assert "integral basis dimension: 2" in capsys.readouterr().out


def test_parse_vars():
    assert parse_vars("x1..x3,y1") == ["x1", "x2", "x3", "y1"]
    assert parse_vars("x1..x2, t") == ["x1", "x2", "t"]
