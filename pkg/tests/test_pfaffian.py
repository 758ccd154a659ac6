import pytest

from integralis.expr import parse
from integralis.pfaffian import (
    PfaffForm,
    UnsupportedAntiderivative,
    exp_of_integral,
    find_exp_multiplier,
    general_integral,
    integrate,
    is_closed,
    potential,
)


def test_closed_form_potential():
    f = PfaffForm(["x1", "x2"], ["2*x1*x2", "x1^2"])
    closed, _ = is_closed(f)
    assert closed
    assert potential(f) == parse("x1^2*x2")


def test_non_closed_form_reports_defect():
    closed, defects = is_closed(PfaffForm(["x1", "x2"], ["x2", "-x1"]))
    assert not closed
    assert any(not d.is_zero() for d in defects.values())


def test_rational_antiderivative_and_log_rejection():
    assert integrate("x1^2", "x1") == parse("1/3*x1^3")
    assert integrate("1/x1^2", "x1") == parse("-1/x1")
    with pytest.raises(UnsupportedAntiderivative):
        integrate("1/x1", "x1")


def test_exp_of_integral_gives_rational_multiplier():
    assert exp_of_integral(PfaffForm(["x1"], ["-1/x1"])) == parse("1/x1")


def test_exponential_integrating_multiplier():
    f = PfaffForm(["t1", "x1"], ["-x1", "1"])
    assert find_exp_multiplier(f) is not None
    res = general_integral(f)
    assert res.kind == "exp-multiplier"
    assert res.potential == parse("x1*exp(-t1)")
