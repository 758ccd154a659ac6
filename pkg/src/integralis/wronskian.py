"""Wronskian determinants and the Wronskian necessary conditions.

For a cylindrical object depending on ``t_1..t_s`` and ``x_1..x_k`` the
truncated coefficient columns of the system must be linearly dependent with
respect to every excluded variable.  Each check below builds the relevant
function sets and returns their Wronskians as residuals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .expr import Expression, Polynomial, RationalFunction
from .linalg import bareiss_det
from .system import PdeSystem, SystemError_, TdSystem, divergence, operators_of, parallel_map

__all__ = [
    "WronskianVerdict",
    "wronskian",
    "necessary_fi_pde",
    "necessary_fi_td",
    "necessary_lm_pde",
    "necessary_lm_td",
    "pi_residuals",
    "vanishes_on",
]

_ONE = Expression.const(1)


@dataclass
class WronskianVerdict:
    """Outcome of a Wronskian test.

    ``residuals`` holds ``(set index j, variable, W)`` triples, one for every
    Wronskian evaluated.  For first-integral and last-multiplier tests
    ``passed`` means every residual is identically zero.  For partial-integral
    tests the residuals only need to vanish on the unknown manifold, so
    ``passed`` is ``None`` and ``identically_zero`` flags each residual.
    """

    passed: bool | None
    residuals: list[tuple[int, str, Expression]] = field(default_factory=list)
    notes: str = ""
    identically_zero: list[bool] = field(default_factory=list)

    @property
    def failing(self) -> list[tuple[int, str, Expression]]:
        return [r for r in self.residuals if not r[2].is_zero()]


def _derivative_rows(functions: Sequence[Expression], v: str) -> list[list[Expression]]:
    q = len(functions)
    rows = [list(functions)]
    for _ in range(1, q):
        rows.append([f.diff(v) for f in rows[-1]])
    return rows


def _rational_det(rows: list[list[Expression]]) -> Expression:
    """Determinant of a rational-function matrix by Bareiss after clearing row denominators."""
    rfs = [[e.as_rational_function() for e in row] for row in rows]
    poly_rows = []
    cleared = Polynomial.const(1)
    for row in rfs:
        den = Polynomial.const(1)
        for e in row:
            if not e.is_zero() and not e.den.is_one():
                den = den * e.den.exquo(den.gcd(e.den))
        cleared = cleared * den
        poly_rows.append([(e.num * den.exquo(e.den)) if not e.is_zero() else Polynomial.const(0) for e in row])
    det = bareiss_det(poly_rows)
    return Expression.from_rf(RationalFunction(det, cleared))


def _laplace_det(rows: list[list[Expression]]) -> Expression:
    """Cofactor expansion along the first row, memoized on column subsets."""
    n = len(rows)
    memo: dict[tuple[int, tuple[int, ...]], Expression] = {}

    def det(r: int, cols: tuple[int, ...]) -> Expression:
        if r == n:
            return _ONE
        key = (r, cols)
        if key in memo:
            return memo[key]
        total = Expression()
        for idx, c in enumerate(cols):
            a = rows[r][c]
            if a.is_zero():
                continue
            minor = det(r + 1, cols[:idx] + cols[idx + 1 :])
            term = a * minor
            total = total - term if idx % 2 else total + term
        memo[key] = total
        return total

    return det(0, tuple(range(n)))


def wronskian(functions: Sequence[Union[Expression, str]], v: str) -> Expression:
    """Determinant whose row ``r`` holds the ``r``-th derivatives of the functions in ``v``."""
    funcs = [Expression.coerce(f) for f in functions]
    if not funcs:
        raise ValueError("wronskian needs at least one function")
    if len(funcs) == 1:
        return funcs[0]
    rows = _derivative_rows(funcs, v)
    if all(e.is_rational() for row in rows for e in row):
        return _rational_det(rows)
    return _laplace_det(rows)


def _check_bounds(S, s: int | None, k: int):
    if not (0 <= k <= S.n):
        raise SystemError_(f"k must satisfy 0 <= k <= n = {S.n}")
    if s is not None and not (0 <= s <= S.m):
        raise SystemError_(f"s must satisfy 0 <= s <= m = {S.m}")


def _run(jobs: list[tuple[int, str, list[Expression]]]) -> list[tuple[int, str, Expression]]:
    """Evaluate (j, variable, function set) jobs; empty sets impose no condition."""
    jobs = [job for job in jobs if job[2]]
    values = parallel_map(lambda job: wronskian(job[2], job[1]), jobs)
    return [(j, v, w) for (j, v, _), w in zip(jobs, values)]


def _verdict(residuals, notes: str) -> WronskianVerdict:
    flags = [r[2].is_zero() for r in residuals]
    return WronskianVerdict(all(flags), residuals, notes, flags)


def _pde_sets(S: PdeSystem, k: int, with_div: bool) -> list[tuple[int, str, list[Expression]]]:
    xs = S.space.dependent
    jobs = []
    for j, L in enumerate(S.operators):
        base = [L.coefficient(x) for x in xs[:k]]
        if with_div:
            base = base + [divergence(L)]
        for p in xs[k:]:
            jobs.append((j, p, base))
    return jobs


def _td_sets(S: TdSystem, s: int, k: int, with_div: bool) -> list[tuple[int, str, list[Expression]]]:
    ts, xs = S.space.independent, S.space.dependent
    ops = operators_of(S)
    jobs = []
    for j in range(S.m):
        base = [S.X[i][j] for i in range(k)]
        if j < s:
            base = [_ONE] + base
        if with_div:
            base = base + [divergence(ops[j])]
        for v in list(ts[s:]) + list(xs[k:]):
            jobs.append((j, v, base))
    return jobs


def necessary_fi_pde(S: PdeSystem, k: int) -> WronskianVerdict:
    """Wronskians of the truncated rows ``(u_j1..u_jk)`` in each ``x_p``, ``p > k``."""
    _check_bounds(S, None, k)
    res = _run(_pde_sets(S, k, False))
    return _verdict(res, f"first-integral test, k={k}")


def necessary_fi_td(S: TdSystem, s: int, k: int) -> WronskianVerdict:
    """Sets ``{1, X_1j..X_kj}`` (``j <= s``) and ``{X_1j..X_kj}`` (``j > s``) in ``t_z`` (z > s) and ``x_p`` (p > k)."""
    _check_bounds(S, s, k)
    res = _run(_td_sets(S, s, k, False))
    return _verdict(res, f"first-integral test, s={s}, k={k}")


def necessary_lm_pde(S: PdeSystem, k: int) -> WronskianVerdict:
    """As :func:`necessary_fi_pde` with the divergence appended to each set."""
    _check_bounds(S, None, k)
    res = _run(_pde_sets(S, k, True))
    return _verdict(res, f"last-multiplier test, k={k}")


def necessary_lm_td(S: TdSystem, s: int, k: int) -> WronskianVerdict:
    """As :func:`necessary_fi_td` with the x-divergence of each column appended."""
    _check_bounds(S, s, k)
    res = _run(_td_sets(S, s, k, True))
    return _verdict(res, f"last-multiplier test, s={s}, k={k}")


def pi_residuals(S: PdeSystem | TdSystem, s: int = 0, k: int = 0) -> WronskianVerdict:
    """Residuals of the partial-integral test; they need only vanish on ``w = 0``.

    For PDE systems ``s`` is ignored.
    """
    if isinstance(S, PdeSystem):
        _check_bounds(S, None, k)
        res = _run(_pde_sets(S, k, False))
        note = f"partial-integral residuals, k={k}"
    else:
        _check_bounds(S, s, k)
        res = _run(_td_sets(S, s, k, False))
        note = f"partial-integral residuals, s={s}, k={k}"
    flags = [r[2].is_zero() for r in res]
    return WronskianVerdict(None, res, note, flags)


def vanishes_on(residual: Expression, w: Expression) -> bool:
    """True when the rational residual vanishes on the zero set of the polynomial ``w``.

    Every irreducible factor of ``w`` must divide the residual's numerator.
    """
    if residual.is_zero():
        return True
    if not residual.is_rational() or not w.is_rational():
        raise ValueError("vanishes_on needs rational residuals and candidates")
    num = residual.as_rational_function().num
    wnum = w.as_rational_function().num
    if wnum.is_constant():
        return False
    _, factors = wnum.factor_list()
    return all(f.divides(num) for f, _ in factors)
