import pytest

from integralis.expr import parse
from integralis.funcsys import (
    build_fi_pde,
    build_fi_td,
    build_lm_pde,
    build_pi,
    independent_family,
    restrict,
    solve,
    t_basis_decompose,
)
from integralis.sysfile import load_fixture


def test_first_integral_functional_system():
    S = load_fixture("ex1_8").system
    F = build_fi_pde(S, 2)
    assert F.form_vars == ("x1", "x2") and F.nform == 2
    sol = solve(F)
    assert sol.consistent
    assert [[e.render() for e in v] for v in sol.nullspace_basis] == [["x1", "x2"]]
    assert len(restrict(sol).nullspace_basis) == 1


def test_td_functional_system_has_exponential_solution_form():
    S = load_fixture("ex1_23").system
    F = build_fi_td(S, 2, 1)
    fam = restrict(solve(F))
    assert len(fam.nullspace_basis) == 1


def test_last_multiplier_system_is_inhomogeneous():
    S = load_fixture("ex2_8").system
    sol = solve(build_lm_pde(S, 1))
    assert sol.consistent and sol.particular is not None


def test_partial_integral_system():
    S = load_fixture("ex3_13").system
    fam = restrict(solve(build_pi(S, 0, 1)), polynomial_form=True)
    assert fam.nullspace_basis


def test_t_basis_decomposition():
    coeffs = t_basis_decompose(parse("3*t^2 + x1/t"), "t", ["t^2", "t", "1", "1/t"])
    assert coeffs == [parse("3"), parse("0"), parse("0"), parse("x1")]
    with pytest.raises(ValueError):
        t_basis_decompose(parse("1/(t + 1)"), "t", ["1", "t"])


def test_independent_family_certificate():
    rank, cert = independent_family([[parse("1"), parse("0")], [parse("2"), parse("0")]])
    assert rank == 1 and cert.minor == parse("1")
    rank, cert = independent_family([[parse("x1"), parse("0")], [parse("0"), parse("x2")]])
    assert rank == 2 and not cert.minor.is_zero()
