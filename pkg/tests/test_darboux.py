import pytest

from integralis.darboux import darboux_search, split_operator
from integralis.expr import parse
from integralis.sysfile import load_fixture, loads
from integralis.system import SystemError_

LINEAR = """
[variables]
independent = ["t"]
dependent = ["x1", "x2", "x3"]
[system]
kind = "td"
[matrix]
rows = [["x1"], ["x2"], ["x3"]]
"""


def test_linear_system_degree_one():
    r = darboux_search(loads(LINEAR), w_degree=1)
    assert not r.partial
    assert {w.candidate for w in r} >= {parse("x1"), parse("x2"), parse("x3")}
    assert all(w.verdict for w in r)


def test_sphere_family():
    r = darboux_search(load_fixture("ex3_23"), w_degree=2)
    found = {w.candidate for w in r}
    assert parse("x1^2 + x2^2") in found
    assert not r.partial


def test_painleve_system_degree_two_has_no_witness():
    r = darboux_search(load_fixture("ps"), w_degree=2)
    assert not r.found and not r.partial
    assert r.allowed_vars == tuple(f"x{i}" for i in range(1, 7)) + tuple(f"y{i}" for i in range(1, 7))


def test_argument_validation():
    with pytest.raises(ValueError):
        darboux_search(load_fixture("ex3_23"), w_degree=0)
    with pytest.raises(SystemError_):
        darboux_search(load_fixture("ex3_23"), allowed_vars=["z9"])


def test_split_operator_separates_time_functions():
    comps = split_operator({"x1": parse("x1/t + t*x2")}, ["t"], None)
    assert set(comps) == {"t", "1/t"}
    assert str(comps["1/t"]["x1"]) == "x1" and str(comps["t"]["x1"]) == "x2"
    declared = split_operator({"x1": parse("x1/t + t*x2")}, ["t"], {"t": ["1/t", "t"]})
    assert declared == comps
