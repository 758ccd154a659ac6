"""Pfaffian 1-forms: closedness, exponential integrating multipliers, potentials.

Supported antiderivatives (iterated one variable at a time):

* rational functions whose integral is rational (Hermite reduction; any
  logarithmic part is rejected),
* ``P(v) * exp(a*v + b)`` with ``P`` polynomial in ``v``, integrated by parts,
* factors that do not involve the integration variable.

Everything else raises :class:`UnsupportedAntiderivative`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import sympy
from sympy.integrals.rationaltools import ratint_ratpart

from .expr import Expression, ExprError, Polynomial, RationalFunction
from .linalg import q_solve, rf_identity_rows

__all__ = [
    "PfaffForm",
    "IntegrationResult",
    "UnsupportedAntiderivative",
    "is_closed",
    "potential",
    "integrate",
    "find_exp_multiplier",
    "exp_of_integral",
    "general_integral",
]

_ZERO = Expression()
_ONE = Expression.const(1)


class UnsupportedAntiderivative(ExprError):
    pass


@dataclass(frozen=True)
class PfaffForm:
    """``sum_i c_i d(v_i)``."""

    variables: tuple[str, ...]
    coefficients: tuple[Expression, ...]

    def __init__(self, variables: Sequence[str], coefficients: Sequence[Union[Expression, str]]):
        if len(variables) != len(coefficients):
            raise ValueError("a Pfaffian form needs one coefficient per variable")
        object.__setattr__(self, "variables", tuple(variables))
        object.__setattr__(self, "coefficients", tuple(Expression.coerce(c) for c in coefficients))

    @classmethod
    def gradient(cls, F: Union[Expression, str], variables: Sequence[str]) -> "PfaffForm":
        F = Expression.coerce(F)
        return cls(variables, [F.diff(v) for v in variables])

    def scaled(self, mu: Expression) -> "PfaffForm":
        return PfaffForm(self.variables, [mu * c for c in self.coefficients])

    def __add__(self, other: "PfaffForm") -> "PfaffForm":
        if self.variables != other.variables:
            raise ValueError("forms over different variables")
        return PfaffForm(self.variables, [a + b for a, b in zip(self.coefficients, other.coefficients)])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def render(self) -> str:
        parts = [f"({c.render()})*d{v}" for v, c in zip(self.variables, self.coefficients) if not c.is_zero()]
        return " + ".join(parts) or "0"


@dataclass
class IntegrationResult:
    """``d(potential) = multiplier * form``."""

    multiplier: Expression
    potential: Expression
    kind: str  # "exact" | "exp-multiplier" | "exp-of-integral"
    notes: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# closedness
# ---------------------------------------------------------------------------


def is_closed(f: PfaffForm) -> tuple[bool, dict[tuple[str, str], Expression]]:
    """``d_a c_b - d_b c_a`` for every pair; closed iff all vanish."""
    res = {}
    vs, cs = f.variables, f.coefficients
    for a in range(len(vs)):
        for b in range(a + 1, len(vs)):
            res[(vs[a], vs[b])] = cs[b].diff(vs[a]) - cs[a].diff(vs[b])
    return all(r.is_zero() for r in res.values()), res


# ---------------------------------------------------------------------------
# one-variable antiderivatives
# ---------------------------------------------------------------------------


def _rational_antiderivative(rf: RationalFunction, v: str) -> RationalFunction:
    if rf.is_zero():
        return rf
    if v not in rf.free_symbols:
        return rf * RationalFunction.var(v)
    if v not in rf.den.free_symbols:
        # polynomial in v: integrate termwise
        V = sympy.Symbol(v)
        return RationalFunction.from_sympy(sympy.integrate(sympy.expand(rf.to_sympy()), V))
    V = sympy.Symbol(v)
    num = sympy.Poly(rf.num.to_sympy(), V)
    den = sympy.Poly(rf.den.to_sympy(), V)
    rat, log_part = ratint_ratpart(num, den, V)
    if sympy.simplify(log_part) != 0:
        raise UnsupportedAntiderivative(
            f"antiderivative of {rf.render()} in {v} has a logarithmic part"
        )
    out = RationalFunction.from_sympy(rat)
    if not (out.diff(v) - rf).is_zero():
        raise UnsupportedAntiderivative(f"rational integration of {rf.render()} in {v} failed to verify")
    return out


def _exp_antiderivative(coef: RationalFunction, g: Polynomial, v: str) -> RationalFunction:
    """``Q`` with ``d/dv (Q exp(g)) = coef exp(g)`` for ``g`` linear in ``v``."""
    a = g.diff(v)
    if v in a.free_symbols:
        raise UnsupportedAntiderivative(f"exponent {g.render()} is not linear in {v}")
    if v in coef.den.free_symbols:
        raise UnsupportedAntiderivative("exp term with a pole in the integration variable")
    A = RationalFunction.from_poly(a)
    inv = A.inverse()
    # integrate by parts: sum_k (-1)^k P^(k) / a^(k+1)
    total = RationalFunction.const(0)
    term = coef
    sign = 1
    power = inv
    while not term.is_zero():
        piece = term * power
        total = total + (piece if sign > 0 else -piece)
        term = term.diff(v)
        power = power * inv
        sign = -sign
    return total


def integrate(e: Union[Expression, str], v: str) -> Expression:
    """An antiderivative of ``e`` with respect to ``v`` within the supported subclass."""
    e = Expression.coerce(e)
    out = _ZERO
    for coef, rads, g in e.terms:
        if any(v in b.free_symbols for b, _ in rads):
            raise UnsupportedAntiderivative(f"radical factor depends on {v}")
        if v in g.free_symbols:
            q = _exp_antiderivative(coef, g, v)
        else:
            q = _rational_antiderivative(coef, v)
        out = out + Expression._make({(rads, g): q})
    return out


def potential(f: PfaffForm) -> Expression:
    """``F`` with ``dF = f`` by iterated integration; integration constant zero."""
    closed, _ = is_closed(f)
    if not closed:
        raise ValueError("potential requires a closed form")
    F = _ZERO
    for v, c in zip(f.variables, f.coefficients):
        rest = c - F.diff(v)
        if rest.is_zero():
            continue
        F = F + integrate(rest, v)
    for v, c in zip(f.variables, f.coefficients):
        if not (F.diff(v) - c).is_zero():
            raise UnsupportedAntiderivative("iterated integration failed to verify")
    return F


# ---------------------------------------------------------------------------
# integrating multipliers
# ---------------------------------------------------------------------------


def _monomials_upto(variables: Sequence[str], degree: int) -> list[Polynomial]:
    out = []
    layer = [Polynomial.const(1)]
    for _ in range(degree):
        nxt, seen = [], set()
        for m in layer:
            for v in variables:
                p = m * Polynomial.var(v)
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        out.extend(nxt)
        layer = nxt
    return out


def find_exp_multiplier(f: PfaffForm, degree_bound: int = 2) -> Polynomial | None:
    """Polynomial ``g`` (no constant term) making ``exp(g) f`` closed, or ``None``.

    Degrees 1, 2, ..., ``degree_bound`` are tried in turn; a closed form gives 0.
    """
    if degree_bound < 1:
        raise ValueError("degreeBound must be at least 1")
    closed, _ = is_closed(f)
    if closed:
        return Polynomial.const(0)
    if not all(c.is_rational() for c in f.coefficients):
        return None
    vs = f.variables
    cs = [c.as_rational_function() for c in f.coefficients]
    for d in range(1, degree_bound + 1):
        monos = _monomials_upto(vs, d)
        rows = []
        for a in range(len(vs)):
            for b in range(a + 1, len(vs)):
                terms = []
                for i, mono in enumerate(monos):
                    ga = RationalFunction.from_poly(mono.diff(vs[a]))
                    gb = RationalFunction.from_poly(mono.diff(vs[b]))
                    terms.append((i, ga * cs[b] - gb * cs[a]))
                terms.append((-1, cs[b].diff(vs[a]) - cs[a].diff(vs[b])))
                rows.extend(rf_identity_rows(_merge(terms)))
        part, _ = q_solve(rows, len(monos))
        if part is not None:
            g = Polynomial.const(0)
            for c, mono in zip(part, monos):
                if c:
                    g = g + mono.scale(c)
            return g
    return None


def _merge(terms):
    acc: dict[int, RationalFunction] = {}
    for i, r in terms:
        acc[i] = acc[i] + r if i in acc else r
    return list(acc.items())


def exp_of_integral(f: PfaffForm) -> Expression:
    """``exp(integral of f)`` for a closed form with rational coefficients.

    The integral is sought as ``R + sum_i r_i log p_i`` with ``R`` rational,
    ``p_i`` the irreducible denominator factors and rational residues
    ``r_i`` (found by linear algebra).  Logarithms become radical power
    factors ``p_i^r_i``; ``R`` must be a polynomial so that ``exp(R)`` stays in
    the expression class.  Absolute values are dropped.
    """
    closed, _ = is_closed(f)
    if not closed:
        raise ValueError("exp_of_integral requires a closed form")
    if f.is_zero():
        return _ONE
    if not all(c.is_rational() for c in f.coefficients):
        raise UnsupportedAntiderivative("unsupported exp-integral: coefficients must be rational")
    vs = f.variables
    cs = [c.as_rational_function() for c in f.coefficients]
    factors: list[Polynomial] = []
    for c in cs:
        if c.is_zero() or c.den.is_constant():
            continue
        _, facs = c.den.factor_list()
        for p, _k in facs:
            if p not in factors and any(v in p.free_symbols for v in vs):
                factors.append(p)
    residues = [Fraction(0)] * len(factors)
    if factors:
        rows = []
        for v, c in zip(vs, cs):
            log_part = _log_part(c, v)
            terms = [(i, RationalFunction.from_poly(p.diff(v)) / RationalFunction.from_poly(p)) for i, p in enumerate(factors)]
            terms.append((-1, -log_part))
            rows.extend(rf_identity_rows(_merge(terms)))
        part, _ = q_solve(rows, len(factors))
        if part is None:
            raise UnsupportedAntiderivative("unsupported exp-integral: logarithmic part is not a rational log-combination")
        residues = part
    rest = []
    for v, c in zip(vs, cs):
        r = c
        for res, p in zip(residues, factors):
            if res:
                r = r - (RationalFunction.from_poly(p.diff(v)) / RationalFunction.from_poly(p)).scale(res)
        rest.append(Expression.from_rf(r))
    try:
        R = potential(PfaffForm(vs, rest))
    except UnsupportedAntiderivative as exc:
        raise UnsupportedAntiderivative(f"unsupported exp-integral: {exc}") from exc
    if not R.is_polynomial():
        raise UnsupportedAntiderivative("unsupported exp-integral: rational part is not a polynomial")
    g = R.as_polynomial()
    result = Expression.exp_of(g) if not g.is_zero() else _ONE
    for res, p in zip(residues, factors):
        if res:
            result = result * Expression.radical(p, res)
    # verify d(result) = result * f
    for v, c in zip(vs, f.coefficients):
        if not (result.diff(v) - result * c).is_zero():
            raise UnsupportedAntiderivative("exp-integral failed to verify")
    return result


def _log_part(rf: RationalFunction, v: str) -> RationalFunction:
    """The integrand left after removing the Hermite rational part in ``v``."""
    if rf.is_zero() or v not in rf.den.free_symbols:
        return RationalFunction.const(0)
    V = sympy.Symbol(v)
    num = sympy.Poly(rf.num.to_sympy(), V)
    den = sympy.Poly(rf.den.to_sympy(), V)
    _, log_part = ratint_ratpart(num, den, V)
    return RationalFunction.from_sympy(log_part)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def _normalize_sign(F: Expression, mu: Expression) -> tuple[Expression, Expression]:
    terms = F.terms
    if terms and terms[0][0].num.leading_coefficient() < 0:
        return -F, -mu
    return F, mu


def general_integral(
    f: PfaffForm, degree_bound: int = 2, diagnostics: list[str] | None = None
) -> IntegrationResult | None:
    """Exact form, else ``exp(g)`` multiplier of degree <= bound; verified by differentiation."""
    diag = diagnostics if diagnostics is not None else []
    if f.is_zero():
        diag.append("zero form has no nonconstant integral")
        return None
    closed, _ = is_closed(f)
    if closed:
        mu, kind = _ONE, "exact"
    else:
        g = find_exp_multiplier(f, degree_bound) if degree_bound >= 1 else None
        if g is None:
            diag.append(f"no exp(g) multiplier with deg g <= {degree_bound}")
            return None
        mu, kind = Expression.exp_of(g), "exp-multiplier"
    form = f.scaled(mu)
    try:
        F = potential(form)
    except UnsupportedAntiderivative as exc:
        diag.append(str(exc))
        return None
    if F.is_constant():
        diag.append("potential is constant")
        return None
    for v, c in zip(form.variables, form.coefficients):
        if not (F.diff(v) - c).is_zero():
            raise RuntimeError("potential failed to verify")
    F, mu = _normalize_sign(F, mu)
    notes = ["general integral defined up to a function of it"]
    return IntegrationResult(mu, F, kind, notes)
