import pytest

from integralis.expr import parse
from integralis.sysfile import load_fixture
from integralis.system import (
    LinearOperator,
    PdeSystem,
    SystemError_,
    TdSystem,
    VariableSpace,
    autonomous_fi_count,
    closure_and_defect,
    divergence,
    induced_operators,
    integral_basis_dimension,
    is_complete,
    is_frobenius_solvable,
    is_jacobian,
    operators_of,
    poisson_bracket,
)


def fx(name):
    return load_fixture(name).system


def test_bracket_of_coordinate_fields():
    sp = VariableSpace((), ("x1", "x2"))
    A = LinearOperator(sp, {"x1": parse("1")})
    B = LinearOperator(sp, {"x2": parse("x1")})
    br = poisson_bracket(A, B)
    assert br.coefficient("x2") == parse("1") and br.coefficient("x1").is_zero()


def test_frobenius_and_bracket_for_noncommuting_td_system():
    rep = is_frobenius_solvable(fx("ex1_23"))
    assert not rep.solvable and not rep.bracket_solvable
    (br,) = rep.brackets.values()
    assert br.coefficient("x2") == parse("3 - x1")
    assert all(br.coefficient(v).is_zero() for v in ("t1", "t2", "x1"))


def test_solvable_systems():
    assert is_frobenius_solvable(fx("ex3_23")).solvable
    assert is_frobenius_solvable(fx("ex1_14")).solvable


def test_induced_operators_have_unit_time_part():
    ops = induced_operators(fx("ex1_23"))
    assert ops[0].coefficient("t1") == parse("1") and ops[0].coefficient("t2").is_zero()
    assert ops[1].coefficient("x1") == parse("3*x1")


def test_completeness_and_jacobian():
    assert not is_complete(fx("ex1_8")).complete
    assert is_complete(fx("ex3_23")).complete and is_jacobian(fx("ex3_23"))
    assert not is_jacobian(fx("ex1_23"))


def test_defects_and_basis_dimensions():
    rep = closure_and_defect(fx("ex1_23"))
    assert rep.defect == 1 and rep.closed
    assert closure_and_defect(fx("ex3_13")).defect == 1
    assert integral_basis_dimension(fx("ex3_13")) == 2
    assert integral_basis_dimension(fx("ex3_25")) == 2
    assert integral_basis_dimension(fx("ex1_14")) == 3
    assert integral_basis_dimension(fx("ex1_8")) == 1


def test_negative_closure_bound_rejected():
    with pytest.raises(SystemError_):
        closure_and_defect(fx("ex1_23"), max_new_ops=-1)


def test_divergences():
    assert [divergence(L) for L in operators_of(fx("ex2_8"))] == [parse("x2"), parse("x3")]


def test_autonomous_fi_count():
    assert autonomous_fi_count(fx("ex1_14"), 0) == 1
    with pytest.raises(SystemError_):
        autonomous_fi_count(fx("ex1_23"), 0)
    with pytest.raises(SystemError_):
        autonomous_fi_count(fx("ex1_14"), 5)


def test_invalid_systems():
    sp = VariableSpace((), ("x1",))
    with pytest.raises(SystemError_):
        PdeSystem(sp, ())
    with pytest.raises(SystemError_):
        VariableSpace(("x1",), ("x1",))
    with pytest.raises(SystemError_):
        TdSystem(VariableSpace(("t1",), ("x1", "x2")), ((parse("1"),),))
    with pytest.raises(SystemError_):
        LinearOperator(sp, {"y": parse("1")})
