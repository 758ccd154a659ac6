from fractions import Fraction

import pytest

from integralis.sysfile import FIXTURES, SystemFileError, dumps, load, load_fixture, loads
from integralis.system import PdeSystem, TdSystem

TD = """
[metadata]
name = "tiny"
[variables]
independent = ["t1"]
dependent = ["x1", "x2"]
[system]
kind = "td"
[parameters]
a = "1/3"
[matrix]
rows = [["a*x1"], ["x1 + x2"]]
"""


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_round_trip(name):
    model = load_fixture(name)
    again = loads(dumps(model))
    assert again.same_system(model)
    assert again.name == model.name


def test_fixture_kinds():
    assert isinstance(load_fixture("ex1_8").system, PdeSystem)
    assert isinstance(load_fixture("ex1_23").system, TdSystem)
    ps = load_fixture("ps").system
    assert (ps.n, ps.m) == (12, 1)


def test_parameters_are_substituted():
    model = loads(TD)
    assert model.parameters == {"a": Fraction(1, 3)}
    assert model.system.X[0][0].render() == "1/3*x1"
    raw = loads(TD, substitute_parameters=False)
    assert "a" in raw.system.X[0][0].free_symbols


def test_painleve_parameters_are_rational():
    for name in ("ps", "ps_case2"):
        params = load_fixture(name).parameters
        assert len(params) == 15 and all(isinstance(v, Fraction) for v in params.values())
    assert load_fixture("ps_case2").parameters["alpha5"] == 0


@pytest.mark.parametrize(
    "text,message",
    [
        (TD.replace('["x1 + x2"]', '["x1", "x2"]'), "dimension"),
        (TD.replace("x1 + x2", "x1 + zz"), "unknown symbol"),
        (TD.replace('a = "1/3"', 'a = "x1"'), "rational constant"),
        (TD.replace("x1 + x2", "x1 +"), "matrix"),
    ],
)
def test_malformed_files(text, message):
    with pytest.raises(SystemFileError, match=message):
        loads(text)


def test_load_from_path(tmp_path):
    p = tmp_path / "tiny.toml"
    p.write_text(TD, encoding="utf-8")
    assert load(p).same_system(loads(TD))
