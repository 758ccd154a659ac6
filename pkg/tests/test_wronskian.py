from integralis.expr import parse
from integralis.sysfile import load_fixture
from integralis.wronskian import (
    necessary_fi_pde,
    necessary_fi_td,
    necessary_lm_pde,
    pi_residuals,
    vanishes_on,
    wronskian,
)


def test_wronskian_of_monomials():
    assert wronskian(["1", "x1", "x1^2"], "x1") == parse("2")
    assert wronskian(["x1", "2*x1"], "x1").is_zero()
    assert wronskian(["x2"], "x1") == parse("x2")


def test_wronskian_in_extended_class():
    w = wronskian(["exp(x1)", "x1*exp(x1)"], "x1")
    assert w == parse("exp(2*x1)")


def test_first_integral_tests_on_pde_system():
    S = load_fixture("ex1_8").system
    bad = necessary_fi_pde(S, 1)
    assert bad.passed is False and bad.failing
    assert necessary_fi_pde(S, 2).passed


def test_first_integral_tests_on_td_system():
    S = load_fixture("ex1_23").system
    assert necessary_fi_td(S, 2, 1).passed
    assert not necessary_fi_td(S, 2, 0).passed
    assert not necessary_fi_td(S, 1, 1).passed


def test_last_multiplier_tests():
    S = load_fixture("ex2_8").system
    assert not necessary_lm_pde(S, 0).passed
    assert necessary_lm_pde(S, 1).passed


def test_partial_integral_residuals():
    v = pi_residuals(load_fixture("ex3_10").system, 0, 2)
    assert v.passed is None
    assert v.identically_zero and all(v.identically_zero)


def test_vanishes_on():
    assert vanishes_on(parse("x1^2 + x1*x2"), parse("x1 + x2"))
    assert not vanishes_on(parse("x1"), parse("x1 + x2"))
