from fractions import Fraction

import pytest

from integralis.expr import parse
from integralis.sysfile import load_fixture
from integralis.verify import (
    FlowCheckRefused,
    SamplingError,
    UnsupportedCandidate,
    certify_first_integral,
    certify_last_multiplier,
    certify_partial_integral,
    cylinder_profile,
    flow_check,
    functional_independence,
    lm_implies_pi,
    numeric_spotcheck,
)


def fx(name):
    return load_fixture(name).system


def test_first_integral_certificates():
    assert certify_first_integral(fx("ex1_8"), "x1^2 + x2^2").verdict
    bad = certify_first_integral(fx("ex1_8"), "x1")
    assert not bad.verdict and any(not r.is_zero() for r in bad.residuals)
    assert certify_first_integral(fx("ex1_23"), "x1*exp(-t1 - 3*t2)").verdict


def test_last_multiplier_certificates():
    assert certify_last_multiplier(fx("ex2_8"), "1/x1").verdict
    assert certify_last_multiplier(fx("ex2_8"), "5/x1").verdict
    assert not certify_last_multiplier(fx("ex2_8"), "x1").verdict
    with pytest.raises(ValueError):
        certify_last_multiplier(fx("ex2_8"), "0")


def test_partial_integral_cofactors():
    cert = certify_partial_integral(fx("ex3_10"), "x1 + x2")
    assert cert.verdict
    assert cert.cofactors == [parse("x2 + x3"), parse("x3 + x4")]
    assert not certify_partial_integral(fx("ex3_10"), "x3").verdict
    with pytest.raises(UnsupportedCandidate):
        certify_partial_integral(fx("ex3_10"), "7")


def test_last_multiplier_manifolds():
    rep = lm_implies_pi(fx("ex2_8"), "1/x1")
    assert not rep.skipped
    assert [c.candidate for c in rep.manifolds] == [parse("x1")]


def test_cylinder_profile():
    assert cylinder_profile(fx("ex1_23"), parse("x1*exp(-t1-3*t2)")) == (2, 1)
    assert cylinder_profile(fx("ex1_8"), parse("x1^2 + x2^2")) == (0, 2)


def test_functional_independence():
    rank, cert = functional_independence(["x1", "x2", "x1 + x2"])
    assert rank == 2 and cert.rows == [0, 1]
    rank, _ = functional_independence(["x2/x1", "x3/x1"])
    assert rank == 2
    rank, _ = functional_independence(["x1*exp(x2)", "x1^2*exp(2*x2)"])
    assert rank == 1


def test_numeric_spotcheck():
    assert numeric_spotcheck("x1^2 - x1*x1")
    assert not numeric_spotcheck("x1 - 1/3")
    with pytest.raises(ValueError):
        numeric_spotcheck("x1", trials=0)
    with pytest.raises(SamplingError):
        numeric_spotcheck("(-x1^2 - 1)^(1/2)")  # no real point in the domain


def test_flow_check_conserves_first_integral():
    start = {"t1": 0, "t2": 0, "x1": Fraction(1, 2), "x2": Fraction(1, 3), "x3": Fraction(1, 5)}
    rep = flow_check(fx("ex1_14"), "x1*x2 - x3", [1, 1], start)
    assert rep.passed and rep.steps == 1000 and rep.max_deviation <= 1e-6


def test_flow_check_refuses_unsolvable_system():
    with pytest.raises(FlowCheckRefused):
        flow_check(fx("ex1_23"), "x1", [1, 0], {"t1": 0, "t2": 0, "x1": 1, "x2": 1})
