"""Hypothesis strategies shared by the property suites: small systems, n <= 3, degree <= 2."""

from fractions import Fraction
from itertools import combinations_with_replacement

from hypothesis import strategies as st

from integralis.expr import Expression, parse
from integralis.system import LinearOperator, PdeSystem, TdSystem, VariableSpace

XS = ("x1", "x2", "x3")
TS = ("t1", "t2")


def monomials(variables, degree=2):
    out = ["1"]
    for d in range(1, degree + 1):
        out.extend("*".join(c) for c in combinations_with_replacement(variables, d))
    return out


@st.composite
def polynomials(draw, variables=XS, degree=2, max_terms=4, nonzero=False):
    monos = monomials(variables, degree)
    terms = draw(
        st.lists(
            st.tuples(st.integers(-3, 3).filter(bool), st.sampled_from(monos)),
            min_size=1 if nonzero else 0,
            max_size=max_terms,
        )
    )
    text = " + ".join(f"({c})*{m}" for c, m in terms) or "0"
    e = parse(text)
    if nonzero and e.is_zero():
        e = parse(monos[-1])
    return e


@st.composite
def operators(draw, space):
    coeffs = {v: draw(polynomials(space.all)) for v in space.all}
    return LinearOperator(space, coeffs)


@st.composite
def pde_spaces(draw):
    n = draw(st.integers(1, 3))
    return VariableSpace((), XS[:n])


@st.composite
def td_systems(draw):
    n = draw(st.integers(2, 3))
    m = draw(st.integers(1, 2))
    space = VariableSpace(TS[:m], XS[:n])
    X = tuple(tuple(draw(polynomials(space.all, max_terms=3)) for _ in range(m)) for _ in range(n))
    return TdSystem(space, X)


@st.composite
def solvable_td_systems(draw):
    """``dx_i = dG_i(t)``: always completely solvable."""
    n = draw(st.integers(1, 3))
    m = draw(st.integers(1, 2))
    n = max(n, m)
    space = VariableSpace(TS[:m], XS[:n])
    G = [draw(polynomials(TS[:m])) for _ in range(n)]
    X = tuple(tuple(g.diff(t) for t in TS[:m]) for g in G)
    return TdSystem(space, X)


@st.composite
def rational_functions(draw, variables=XS):
    num = draw(polynomials(variables))
    den = draw(polynomials(variables, nonzero=True))
    return num / den


@st.composite
def extended_expressions(draw, variables=XS):
    """Rational functions times an optional exp(polynomial) and an optional square root."""
    e = draw(rational_functions(variables))
    if draw(st.booleans()):
        e = e * Expression.exp_of(draw(polynomials(variables, degree=2, max_terms=2)).as_polynomial())
    if draw(st.booleans()):
        base = draw(polynomials(variables, degree=1, nonzero=True))
        if not base.is_constant():
            e = e * Expression.radical(base.as_rational_function(), Fraction(1, 2))
    return e
