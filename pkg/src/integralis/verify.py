"""Exact certification of candidates, independence ranks, numeric cross-checks."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence, Union

from .expr import EvaluationSingularity, Expression, ExprError, Polynomial, RationalFunction, sort_vars
from .funcsys import IndependenceCertificate, independent_family
from .system import PdeSystem, TdSystem, divergence, is_frobenius_solvable, operators_of
from .wronskian import _laplace_det

__all__ = [
    "Certificate",
    "FlowCheckReport",
    "LmPiReport",
    "UnsupportedCandidate",
    "SamplingError",
    "FlowCheckRefused",
    "cylinder_profile",
    "certify_first_integral",
    "certify_last_multiplier",
    "certify_partial_integral",
    "lm_implies_pi",
    "functional_independence",
    "numeric_spotcheck",
    "random_point",
    "flow_check",
]

System = Union[PdeSystem, TdSystem]


class UnsupportedCandidate(ExprError):
    pass


class SamplingError(RuntimeError):
    pass


class FlowCheckRefused(ValueError):
    pass


@dataclass
class Certificate:
    kind: str  # "first-integral" | "last-multiplier" | "partial-integral"
    candidate: Expression
    residuals: list[Expression]
    verdict: bool
    cylinder_profile: tuple[int, int]
    cofactors: list[Expression] | None = None
    manifold: Expression | None = None  # polynomial whose zero set is certified (partial integrals)
    notes: list[str] = field(default_factory=list)


def cylinder_profile(S: System, e: Expression) -> tuple[int, int]:
    """``(s, k)``: highest t index and highest x index the expression depends on."""
    s = 0
    for i, t in enumerate(S.space.independent):
        if e.depends_on(t):
            s = i + 1
    k = 0
    for i, x in enumerate(S.space.dependent):
        if e.depends_on(x):
            k = i + 1
    return s, k


def _coerce(e) -> Expression:
    return Expression.coerce(e)


def certify_first_integral(S: System, F: Union[Expression, str]) -> Certificate:
    F = _coerce(F)
    res = [L.apply(F) for L in operators_of(S)]
    return Certificate("first-integral", F, res, all(r.is_zero() for r in res), cylinder_profile(S, F))


def certify_last_multiplier(S: System, mu: Union[Expression, str]) -> Certificate:
    mu = _coerce(mu)
    if mu.is_zero():
        raise ValueError("a last multiplier must be nonzero")
    res = [L.apply(mu) + mu * divergence(L) for L in operators_of(S)]
    return Certificate("last-multiplier", mu, res, all(r.is_zero() for r in res), cylinder_profile(S, mu))


def manifold_polynomial(w: Expression) -> Polynomial:
    """A polynomial with the same zero set as ``w`` (denominators, radicals and exponentials dropped)."""
    if w.is_rational():
        p = w.as_rational_function().num
    elif w.nterms() == 1:
        coef, _rads, _g = w.terms[0]
        p = coef.num
    else:
        raise UnsupportedCandidate("unsupported candidate: multi-term expression with radical or exp factors")
    if p.is_constant():
        raise UnsupportedCandidate("unsupported candidate: the candidate has no zero set")
    return p.primitive()[1]


def certify_partial_integral(S: System, w: Union[Expression, str]) -> Certificate:
    """``L_j P`` must be divisible by ``P`` after clearing denominators; cofactors ``L_j P / P``."""
    w = _coerce(w)
    P = manifold_polynomial(w)
    Pe = Expression.from_poly(P)
    residuals, cofactors = [], []
    for L in operators_of(S):
        phi = L.apply(Pe)
        if not phi.is_rational():
            raise UnsupportedCandidate("unsupported candidate: operator image is not rational")
        rf = phi.as_rational_function()
        q, r = rf.num.divmod(P)
        residuals.append(Expression.from_rf(RationalFunction(r, rf.den)))
        cofactors.append(Expression.from_rf(RationalFunction(q, rf.den)))
    verdict = all(r.is_zero() for r in residuals)
    cert = Certificate(
        "partial-integral",
        w,
        residuals,
        verdict,
        cylinder_profile(S, w),
        cofactors if verdict else None,
        Pe,
    )
    if verdict:
        # independent re-check of the cofactor identity
        for L, lam in zip(operators_of(S), cofactors):
            if not (L.apply(Pe) - lam * Pe).is_zero():
                raise RuntimeError("cofactor identity failed")
    return cert


@dataclass
class LmPiReport:
    multiplier: Certificate
    manifolds: list[Certificate]
    skipped: bool
    note: str = ""


def lm_implies_pi(S: System, mu: Union[Expression, str]) -> LmPiReport:
    """A last multiplier defines integral manifolds ``mu = 0`` and ``1/mu = 0``."""
    mu = _coerce(mu)
    cert = certify_last_multiplier(S, mu)
    if not cert.verdict:
        return LmPiReport(cert, [], True, "not a last multiplier")
    if not mu.is_rational():
        return LmPiReport(cert, [], True, "multiplier is not rational")
    rf = mu.as_rational_function()
    out = []
    for part in (rf.num, rf.den):
        if part.is_constant():
            continue
        pc = certify_partial_integral(S, Expression.from_poly(part))
        if not pc.verdict:
            raise RuntimeError(f"last multiplier manifold {part.render()} = 0 is not an integral manifold")
        out.append(pc)
    if not out:
        return LmPiReport(cert, [], True, "constant multiplier defines no manifold")
    return LmPiReport(cert, out, False)


# ---------------------------------------------------------------------------
# functional independence
# ---------------------------------------------------------------------------


def functional_independence(
    funcs: Sequence[Union[Expression, str]], variables: Sequence[str] | None = None
) -> tuple[int, IndependenceCertificate]:
    """Generic rank of the Jacobian matrix, with a nonzero minor as certificate."""
    fs = [_coerce(f) for f in funcs]
    if variables is None:
        variables = sort_vars(v for f in fs for v in f.free_symbols)
    J = [[f.diff(v) for v in variables] for f in fs]
    if not fs or not variables:
        return 0, IndependenceCertificate(0, [], [], Expression.const(1))
    if all(e.is_rational() for row in J for e in row):
        return independent_family(J)
    # extended class: greedy rows, exhaustive column choice for each minor
    chosen: list[int] = []
    cols: list[int] = []
    minor = Expression.const(1)
    for i in range(len(fs)):
        trial = chosen + [i]
        found = None
        for cs in combinations(range(len(variables)), len(trial)):
            d = _laplace_det([[J[r][c] for c in cs] for r in trial])
            if not d.is_zero():
                found = (list(cs), d)
                break
        if found:
            chosen = trial
            cols, minor = found
    return len(chosen), IndependenceCertificate(len(chosen), chosen, cols, minor)


# ---------------------------------------------------------------------------
# numeric checks
# ---------------------------------------------------------------------------


def random_point(variables: Sequence[str], rng: random.Random) -> dict[str, Fraction]:
    """Rationals in [-10, 10] with denominators at most 16."""
    out = {}
    for v in variables:
        d = rng.randint(1, 16)
        out[v] = Fraction(rng.randint(-10 * d, 10 * d), d)
    return out


def numeric_spotcheck(
    identity: Union[Expression, str],
    trials: int = 20,
    tolerance: float = 1e-12,
    seed: int = 0,
    variables: Sequence[str] | None = None,
) -> bool:
    """``|identity(p)| <= tolerance`` at random nonsingular rational points."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    e = _coerce(identity)
    vs = sort_vars(e.free_symbols) if variables is None else tuple(variables)
    rng = random.Random(seed)
    done = skips = 0
    while done < trials:
        p = random_point(vs, rng)
        try:
            val = e.evaluate(p)
        except (EvaluationSingularity, ZeroDivisionError):
            skips += 1
            if skips >= 100:
                raise SamplingError("could not sample: 100 singular points rejected")
            continue
        done += 1
        if abs(float(val)) > tolerance:
            return False
    return True


@dataclass
class FlowCheckReport:
    max_deviation: float
    steps: int
    step_size: Fraction
    path: tuple[dict[str, Fraction], tuple[Fraction, ...]]  # (t0, direction)
    start: dict[str, Fraction]
    truncated: bool = False
    tolerance: float = 1e-6

    @property
    def passed(self) -> bool:
        return not self.truncated and self.max_deviation <= self.tolerance


def flow_check(
    S: TdSystem,
    F: Union[Expression, str],
    direction: Sequence,
    start: Mapping[str, object],
    steps: int = 1000,
    h: float = 1e-3,
    tolerance: float = 1e-6,
) -> FlowCheckReport:
    """RK4 along ``t(tau) = t0 + tau*direction``; reports ``max |F - F(start)|``."""
    if not isinstance(S, TdSystem):
        raise FlowCheckRefused("flow checks apply to total differential systems")
    if not is_frobenius_solvable(S).solvable:
        raise FlowCheckRefused("system is not completely solvable; flow check refused")
    F = _coerce(F)
    ts, xs = S.space.independent, S.space.dependent
    direction = tuple(Fraction(d) if not isinstance(d, float) else Fraction(d).limit_denominator(10**12) for d in direction)
    if len(direction) != S.m:
        raise ValueError(f"direction must have {S.m} components")
    start_q = {v: Fraction(start[v]) if not isinstance(start[v], float) else Fraction(start[v]) for v in S.space.all}
    t0 = [float(start_q[t]) for t in ts]
    x = [float(start_q[v]) for v in xs]
    dvec = [float(d) for d in direction]

    def rhs(tau: float, xv: list[float]) -> list[float]:
        pt = {t: t0[i] + tau * dvec[i] for i, t in enumerate(ts)}
        pt.update({v: xv[i] for i, v in enumerate(xs)})
        out = []
        for i in range(S.n):
            acc = 0.0
            for j in range(S.m):
                if dvec[j] == 0.0 or S.X[i][j].is_zero():
                    continue
                acc += S.X[i][j].evaluate_float(pt) * dvec[j]
            out.append(acc)
        return out

    def value(tau: float, xv: list[float]) -> float:
        pt = {t: t0[i] + tau * dvec[i] for i, t in enumerate(ts)}
        pt.update({v: xv[i] for i, v in enumerate(xs)})
        return F.evaluate_float(pt)

    F0 = value(0.0, x)
    dev = 0.0
    done = 0
    truncated = False
    tau = 0.0
    for _ in range(steps):
        try:
            k1 = rhs(tau, x)
            k2 = rhs(tau + h / 2, [a + h / 2 * b for a, b in zip(x, k1)])
            k3 = rhs(tau + h / 2, [a + h / 2 * b for a, b in zip(x, k2)])
            k4 = rhs(tau + h, [a + h * b for a, b in zip(x, k3)])
            xn = [a + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4) for a, b1, b2, b3, b4 in zip(x, k1, k2, k3, k4)]
            if not all(math.isfinite(v) for v in xn):
                raise EvaluationSingularity("trajectory left the finite domain")
            tau += h
            val = value(tau, xn)
        except (EvaluationSingularity, ZeroDivisionError, OverflowError):
            truncated = True
            break
        if not math.isfinite(val):
            truncated = True
            break
        x = xn
        done += 1
        dev = max(dev, abs(val - F0))
    t_start = {t: start_q[t] for t in ts}
    return FlowCheckReport(
        dev, done, Fraction(h).limit_denominator(10**12), (t_start, direction), start_q, truncated, tolerance
    )
