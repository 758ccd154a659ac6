"""Property suites: 200 random cases each, at most 3 dependent variables, degree <= 2."""

import math
import random

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from _strategies import (
    XS,
    extended_expressions,
    operators,
    pde_spaces,
    polynomials,
    rational_functions,
    solvable_td_systems,
    td_systems,
)
from integralis.expr import EvaluationSingularity
from integralis.pfaffian import PfaffForm, is_closed, potential
from integralis.system import LinearOperator, PdeSystem, VariableSpace, is_frobenius_solvable, poisson_bracket
from integralis.verify import certify_first_integral, numeric_spotcheck, random_point
from integralis.wronskian import wronskian

CASES = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])


def _sum(a: LinearOperator, b: LinearOperator) -> LinearOperator:
    return LinearOperator(a.space, {v: a.coefficient(v) + b.coefficient(v) for v in a.space.all})


@CASES
@given(st.data())
def test_bracket_antisymmetry(data):
    space = data.draw(pde_spaces())
    A, B = data.draw(operators(space)), data.draw(operators(space))
    assert _sum(poisson_bracket(A, B), poisson_bracket(B, A)).is_zero()


@CASES
@given(st.data())
def test_bracket_jacobi_identity(data):
    space = data.draw(pde_spaces())
    A, B, C = (data.draw(operators(space)) for _ in range(3))
    total = _sum(
        _sum(poisson_bracket(A, poisson_bracket(B, C)), poisson_bracket(B, poisson_bracket(C, A))),
        poisson_bracket(C, poisson_bracket(A, B)),
    )
    assert total.is_zero()


@CASES
@given(td_systems())
def test_frobenius_identities_agree_with_brackets(S):
    rep = is_frobenius_solvable(S)  # raises if the two routes disagree
    assert rep.solvable == rep.bracket_solvable
    assert rep.solvable == all(r.is_zero() for r in rep.residuals.values())


@CASES
@given(solvable_td_systems())
def test_time_only_systems_are_completely_solvable(S):
    rep = is_frobenius_solvable(S)
    assert rep.solvable and rep.bracket_solvable


@CASES
@given(st.data())
def test_wronskian_alternates(data):
    q = data.draw(st.integers(2, 3))
    funcs = [data.draw(polynomials(XS[:2])) for _ in range(q)]
    i, j = data.draw(st.sampled_from([(a, b) for a in range(q) for b in range(a + 1, q)]))
    swapped = list(funcs)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    assert (wronskian(funcs, "x1") + wronskian(swapped, "x1")).is_zero()
    if q == 2:
        doubled = [funcs[0], funcs[0]]
        assert wronskian(doubled, "x1").is_zero()


@CASES
@given(st.data())
def test_potential_round_trip(data):
    variables = XS[: data.draw(st.integers(1, 3))]
    F = data.draw(polynomials(variables))
    mu = data.draw(polynomials(variables, nonzero=True))
    form = PfaffForm(variables, [F.diff(v) / mu for v in variables])
    exact = form.scaled(mu)
    closed, _ = is_closed(exact)
    assert closed
    P = potential(exact)
    for v, c in zip(variables, form.coefficients):
        assert (P.diff(v) - mu * c).is_zero()
    assert (P - F).is_constant()


@CASES
@given(st.data())
def test_certified_residuals_vanish_numerically(data):
    n = data.draw(st.integers(2, 3))
    space = VariableSpace((), XS[:n])
    F = data.draw(polynomials(XS[:2]))
    g = data.draw(polynomials(space.all))
    # Hamiltonian-type operator g*(F_x2 d/dx1 - F_x1 d/dx2) annihilates F
    L = LinearOperator(space, {"x1": g * F.diff("x2"), "x2": -(g * F.diff("x1"))})
    S = PdeSystem(space, (L,))
    cert = certify_first_integral(S, F)
    assert cert.verdict
    assert numeric_spotcheck(L.apply(F), trials=5, tolerance=1e-9, seed=data.draw(st.integers(0, 2**16)))
    # independent floating-point evaluation of the chain rule
    rng = random.Random(data.draw(st.integers(0, 2**16)))
    p = {k: float(v) for k, v in random_point(space.all, rng).items()}
    val = sum(L.coefficient(v).evaluate_float(p) * F.diff(v).evaluate_float(p) for v in space.all)
    scale = 1.0 + sum(abs(L.coefficient(v).evaluate_float(p) * F.diff(v).evaluate_float(p)) for v in space.all)
    assert abs(val) <= 1e-9 * scale


@CASES
@given(st.data())
def test_mixed_partials_commute(data):
    e = data.draw(st.one_of(rational_functions(XS[:3]), extended_expressions(XS[:3])))
    a, b = data.draw(st.sampled_from([("x1", "x2"), ("x1", "x3"), ("x2", "x3")]))
    assert (e.diff(a).diff(b) - e.diff(b).diff(a)).is_zero()


@CASES
@given(extended_expressions(XS[:2]))
def test_render_parse_round_trip(e):
    from integralis.expr import parse

    assert parse(e.render()) == e
    pt = {"x1": 0.37, "x2": -1.21}
    try:
        a, b = e.evaluate_float(pt), parse(e.render()).evaluate_float(pt)
    except (EvaluationSingularity, ZeroDivisionError, ValueError):
        return
    if math.isfinite(a):
        assert math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)
