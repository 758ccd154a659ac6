"""Mechanical checks of the elimination identities for the Painleve system.

The Painleve system couples the six Painleve equations as a first-order
total differential system in ``t`` with phase variables ``x1..x6`` (the
solutions) and ``y1..y6`` (their derivatives).  Looking for an autonomous
partial integral ``w(x, y)`` leads to a functional system in unknowns
``phi1..phi12`` whose right-hand side is expanded over the t-functions

    t^2, t, 1, 1/t, 1/t^2, 1/(t-1), 1/(t-1)^2, 1/(t-x6).

This module verifies, by exact substitution, every step of the elimination
argument that can be checked mechanically: the t-basis expansion, the
closed-form solutions of the reduced systems, and the nonexistence of
solutions of the final shapes for polynomial ``h`` up to a degree bound.
It does not (and cannot) replace the case analysis of the argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

import sympy

from .expr import Expression, RationalFunction
from .funcsys import t_basis_decompose
from .linalg import q_solve
from .sysfile import load_fixture

__all__ = ["PainleveCheck", "PainleveReport", "painleve_identities_check", "T_BASIS", "painleve_rhs"]

T_BASIS = ("t^2", "t", "1", "1/t", "1/t^2", "1/(t - 1)", "1/(t - 1)^2", "1/(t - x6)")

_t = sympy.Symbol("t")
_x = sympy.symbols("x1:7")
_y = sympy.symbols("y1:7")
_P = dict(
    zip(
        "alpha2 alpha3 beta3 gamma3 delta3 alpha4 beta4 alpha5 beta5 gamma5 delta5 alpha6 beta6 gamma6 delta6".split(),
        sympy.symbols("alpha2 alpha3 beta3 gamma3 delta3 alpha4 beta4 alpha5 beta5 gamma5 delta5 alpha6 beta6 gamma6 delta6"),
    )
)


@dataclass
class PainleveCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class PainleveReport:
    checks: list[PainleveCheck] = field(default_factory=list)
    degree_bound: int = 3

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.checks.append(PainleveCheck(name, bool(passed), detail))


def painleve_rhs(params: dict | None = None) -> list:
    """``d^2 x_i / dt^2`` of the six Painleve equations with ``y_i = dx_i/dt`` (sympy)."""
    p = dict(_P)
    if params:
        p.update({k: sympy.Rational(v.numerator, v.denominator) if isinstance(v, Fraction) else v for k, v in params.items()})
    t = _t
    x1, x2, x3, x4, x5, x6 = _x
    y1, y2, y3, y4, y5, y6 = _y
    half = sympy.Rational(1, 2)
    return [
        6 * x1**2 + t,
        2 * x2**3 + t * x2 + p["alpha2"],
        y3**2 / x3 - y3 / t + (p["alpha3"] * x3**2 + p["beta3"]) / t + p["gamma3"] * x3**3 + p["delta3"] / x3,
        y4**2 / (2 * x4) + sympy.Rational(3, 2) * x4**3 + 4 * t * x4**2 + 2 * (t**2 - p["alpha4"]) * x4 + p["beta4"] / x4,
        (3 * x5 - 1) / (2 * x5 * (x5 - 1)) * y5**2
        - y5 / t
        + (x5 - 1) ** 2 / t**2 * (p["alpha5"] * x5 + p["beta5"] / x5)
        + p["gamma5"] * x5 / t
        + p["delta5"] * x5 * (x5 + 1) / (x5 - 1),
        half * (1 / x6 + 1 / (x6 - 1) + 1 / (x6 - t)) * y6**2
        - (1 / t + 1 / (t - 1) + 1 / (x6 - t)) * y6
        + x6 * (x6 - 1) * (x6 - t) / (t**2 * (t - 1) ** 2)
        * (
            p["alpha6"]
            + p["beta6"] * t / x6**2
            + p["gamma6"] * (t - 1) / (x6 - 1) ** 2
            + p["delta6"] * t * (t - 1) / (x6 - t) ** 2
        ),
    ]


def _expected_rows(p: dict) -> dict:
    """Coefficient of ``phi_xi`` for every basis function, written out by hand."""
    x1, x2, x3, x4, x5, x6 = _x
    y1, y2, y3, y4, y5, y6 = _y
    half = sympy.Rational(1, 2)
    rows = {b: [0] * 12 for b in T_BASIS}
    rows["1/(t - x6)"][11] = -half * y6**2 + y6 - p["delta6"]
    rows["1/(t - 1)^2"][11] = (x6 - 1) ** 2 * (p["alpha6"] * x6 + p["beta6"] / x6)
    rows["1/(t - 1)"][11] = (
        -y6 + p["alpha6"] * x6 * (x6 - 1) * (1 - 2 * x6) - p["beta6"] * (x6 - 1) + p["gamma6"] * x6 + p["delta6"] * x6
    )
    rows["1/t^2"][10] = (x5 - 1) ** 2 * (p["alpha5"] * x5 + p["beta5"] / x5)
    rows["1/t^2"][11] = x6**2 * (p["alpha6"] * (x6 - 1) - p["gamma6"] / (x6 - 1))
    rows["1/t"][8] = -y3 + p["alpha3"] * x3**2 + p["beta3"]
    rows["1/t"][10] = -y5 + p["gamma5"] * x5
    rows["1/t"][11] = (
        -y6 + p["alpha6"] * x6 * (x6 - 1) * (2 * x6 - 1) + p["beta6"] * (x6 - 1) - p["gamma6"] * x6 - p["delta6"] * (x6 - 1)
    )
    one = rows["1"]
    for i in range(6):
        one[i] = _y[i]
    one[6] = 6 * x1**2
    one[7] = 2 * x2**3 + p["alpha2"]
    one[8] = y3**2 / x3 + p["gamma3"] * x3**3 + p["delta3"] / x3
    one[9] = half * y4**2 / x4 + sympy.Rational(3, 2) * x4**3 - 2 * p["alpha4"] * x4 + p["beta4"] / x4
    one[10] = half * (3 * x5 - 1) / (x5 * (x5 - 1)) * y5**2 + p["delta5"] * x5 * (x5 + 1) / (x5 - 1)
    one[11] = half * (1 / x6 + 1 / (x6 - 1)) * y6**2
    rows["t"][6] = 1
    rows["t"][7] = x2
    rows["t"][9] = 4 * x4**2
    rows["t^2"][9] = 2 * x4
    return rows


def _zero(e) -> bool:
    return sympy.cancel(sympy.together(e)) == 0


def _check_fixture(report: PainleveReport, name: str):
    model = load_fixture(name, substitute_parameters=False)
    S = model.system
    params = model.parameters
    report.add(
        f"{name}: parameters are rational",
        all(isinstance(v, Fraction) for v in params.values()) and len(params) == 15,
        ", ".join(f"{k}={v}" for k, v in sorted(params.items())),
    )
    rhs = painleve_rhs()
    ok = True
    for i in range(6):
        row = S.X[6 + i][0].as_rational_function().to_sympy()
        ok = ok and _zero(row - rhs[i]) and S.X[i][0] == Expression.symbol(f"y{i + 1}")
    report.add(f"{name}: rows are the six Painleve equations", ok, "symbolic parameters")
    return model


def _check_t_basis(report: PainleveReport, model):
    """Expand the fixture's coefficient column over the t-basis and compare with the hand-written rows."""
    S = model.system
    subs = {_P[k]: sympy.Rational(v.numerator, v.denominator) for k, v in model.parameters.items()}
    expected = _expected_rows({k: s.subs(subs) for k, s in _P.items()})
    loaded = load_fixture(model.name)
    got = {b: [Expression()] * 12 for b in T_BASIS}
    for xi in range(12):
        coeffs = t_basis_decompose(loaded.system.X[xi][0], "t", T_BASIS)
        for b, c in zip(T_BASIS, coeffs):
            got[b][xi] = c
    bad = []
    for b in T_BASIS:
        for xi in range(12):
            exp_e = Expression.from_rf(RationalFunction.from_sympy(sympy.sympify(expected[b][xi])))
            if not (got[b][xi] - exp_e).is_zero():
                bad.append(f"{b}: phi{xi + 1}")
    report.add("t-basis expansion reproduces the reduced functional system", not bad, "; ".join(bad) or "8 basis functions x 12 unknowns")
    return S


def _solution_checks(report: PainleveReport):
    p = _P
    x1, x2, x3, x4, x5, x6 = _x
    y1, y2, y3, y4, y5, y6 = _y
    z = sympy.symbols("z1:7")
    U0, U1, U2, Um1, Um2, W1, g = sympy.symbols("U0 U1 U2 U_m1 U_m2 W_m1 g")
    S = sum(yi * zi for yi, zi in zip(_y, z))
    D = -6 * x1**2 * x2 + 2 * x2**3 + p["alpha2"]

    # elimination of phi10, phi12, phi11 from single-unknown rows
    phi10 = sympy.Rational(1, 2) / x4 * U2
    report.add("phi10 = U2/(2 x4) solves 2 x4 phi10 = U2", _zero(2 * x4 * phi10 - U2))
    c12 = -sympy.Rational(1, 2) * y6**2 + y6 - p["delta6"]
    report.add("phi12 = W/(-y6^2/2 + y6 - delta6) solves its row", _zero(c12 * (W1 / c12) - W1))
    c11 = (x5 - 1) ** 2 * (p["alpha5"] * x5 + p["beta5"] / x5)
    report.add("phi11 = U_-2/((x5-1)^2 (alpha5 x5 + beta5/x5)) solves its row", _zero(c11 * (Um2 / c11) - Um2))

    # (first case) the reduced two-equation system and its closed-form solution
    phi7 = (-x2 * U0 + (2 * x2**3 + p["alpha2"]) * U1 + x2 * S) / D
    phi8 = (U0 - 6 * x1**2 * U1 - S) / D
    e1 = S + 6 * x1**2 * phi7 + (2 * x2**3 + p["alpha2"]) * phi8 - U0
    e2 = phi7 + x2 * phi8 - U1
    report.add("closed-form phi7, phi8 solve the reduced two-equation system", _zero(e1) and _zero(e2))
    zero_u = {U0: 0, U1: 0}
    report.add(
        "with U0 = U1 = 0 the reduced system stays consistent",
        _zero(e1.subs(zero_u)) and _zero(e2.subs(zero_u)),
    )

    # (second case, alpha5 = beta5 = 0) the four-equation system and its solution
    A3 = -y3 + p["alpha3"] * x3**2 + p["beta3"]
    A5 = -y5 + p["gamma5"] * x5
    B3 = y3**2 / x3 + p["gamma3"] * x3**3 + p["delta3"] / x3
    B5 = sympy.Rational(1, 2) * (3 * x5 - 1) / (x5 * (x5 - 1)) * y5**2 + p["delta5"] * x5 * (x5 + 1) / (x5 - 1)
    phi9 = (Um1 - A5 * g) / A3
    phi11 = g
    phi8b = -(S + 6 * x1**2 * U1 + B3 * phi9 + B5 * g - U0) / D
    phi7b = ((2 * x2**3 + p["alpha2"]) * U1 + x2 * (S + B3 * phi9 + B5 * g - U0)) / D
    case2 = {p["alpha5"]: 0, p["beta5"]: 0}
    r1 = (c11.subs(case2) * phi11 - Um2).subs(Um2, 0)
    r2 = A3 * phi9 + A5 * phi11 - Um1
    r3 = S + 6 * x1**2 * phi7b + (2 * x2**3 + p["alpha2"]) * phi8b + B3 * phi9 + B5 * phi11 - U0
    r4 = phi7b + x2 * phi8b - U1
    report.add(
        "second-case solution (phi7, phi8, phi9, phi11 = g) solves the four-equation system",
        all(_zero(r) for r in (r1, r2, r3, r4)),
        "first row requires U_-2 = 0 when alpha5 = beta5 = 0",
    )


def _monomials(vars_, degree):
    out = [sympy.Integer(1)]
    for d in range(1, degree + 1):
        for combo in combinations_with_replacement(vars_, d):
            out.append(sympy.Mul(*combo))
    return out


def _shape_inconsistent(w_fixed, h_vars, operator, degree: int) -> tuple[bool, int]:
    """Is ``operator(w_fixed + h) == 0`` unsolvable for polynomial ``h`` of degree <= bound?"""
    monos = _monomials(h_vars, degree)
    coeffs = sympy.symbols(f"c0:{len(monos)}")
    h = sum(c * m for c, m in zip(coeffs, monos))
    expr = sympy.together(operator(w_fixed + h))
    num, _den = sympy.fraction(expr)
    gens = list(_x) + list(_y)
    poly = sympy.Poly(sympy.expand(num), *gens)
    rows = []
    for c in poly.coeffs():
        lin = sympy.Poly(c, *coeffs)
        row = {}
        for mono, val in zip(lin.monoms(), lin.coeffs()):
            idx = next((i for i, e in enumerate(mono) if e), -1)
            row[idx] = Fraction(int(val.p), int(val.q))
        rows.append(row)
    part, _ = q_solve(rows, len(monos))
    return part is None, len(monos)


def _shape_checks(report: PainleveReport, case1, case2, degree: int):
    x1, x2, x3, x4, x5, x6 = _x
    y1, y2, y3, y4, y5, y6 = _y

    def params(model):
        return {k: sympy.Rational(v.numerator, v.denominator) for k, v in model.parameters.items()}

    p1 = params(case1)
    D1 = -6 * x1**2 * x2 + 2 * x2**3 + p1["alpha2"]

    def op_47(w):
        return sum(yi * sympy.diff(w, xi) for xi, yi in zip(_x, _y)) + D1 * sympy.diff(w, y2)

    bad, n = _shape_inconsistent(y2 - y1 * x2, list(_x), op_47, degree)
    report.add(
        f"w = y2 - y1 x2 + h(x) cannot satisfy the first-case equation (deg h <= {degree})",
        bad,
        f"{n} unknown coefficients, inconsistent linear system",
    )

    p2 = params(case2)
    D2 = -6 * x1**2 * x2 + 2 * x2**3 + p2["alpha2"]
    A3 = -y3 + p2["alpha3"] * x3**2 + p2["beta3"]
    A5 = -y5 + p2["gamma5"] * x5
    B3 = y3**2 / x3 + p2["gamma3"] * x3**3 + p2["delta3"] / x3
    B5 = sympy.Rational(1, 2) * (3 * x5 - 1) / (x5 * (x5 - 1)) * y5**2 + p2["delta5"] * x5 * (x5 + 1) / (x5 - 1)
    K = B5 - A5 * B3 / A3

    def op_51(w):
        return (
            sum(yi * sympy.diff(w, xi) for xi, yi in zip(_x, _y))
            + D2 * sympy.diff(w, y2)
            + K * sympy.diff(w, y5)
        )

    bad, n = _shape_inconsistent(y2 - y1 * x2, list(_x) + [y3, y5], op_51, degree)
    report.add(
        f"w = y2 - y1 x2 + h(x, y3, y5) cannot satisfy the second-case equation (deg h <= {degree})",
        bad,
        f"{n} unknown coefficients, inconsistent linear system",
    )


def painleve_identities_check(degree_bound: int = 3) -> PainleveReport:
    """Run every mechanical check; ``report.passed`` is True when all hold."""
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    report = PainleveReport(degree_bound=degree_bound)
    case1 = _check_fixture(report, "ps")
    case2 = _check_fixture(report, "ps_case2")
    _check_t_basis(report, case1)
    _solution_checks(report)
    _shape_checks(report, case1, case2, degree_bound)
    return report
