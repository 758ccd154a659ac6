"""Exact linear algebra used throughout the engine.

Two coefficient domains appear:

* the rational-function field in all system variables (functional systems,
  span membership, generic ranks) -- handled here with Gaussian elimination
  on :class:`RationalFunction` entries, pivoting on the first structurally
  nonzero entry in column order;
* the rationals (undetermined-coefficient systems) -- delegated to sympy's
  sparse ``DomainMatrix`` over ``QQ``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.sdm import SDM

from .expr import Polynomial, RationalFunction, _frac, _q

__all__ = [
    "RFMatrixEchelon",
    "rf_echelon",
    "rf_rank",
    "rf_solve",
    "rf_nullspace",
    "bareiss_det",
    "q_solve",
    "q_nullspace",
    "LinearForm",
    "rf_identity_rows",
]

_RF0 = RationalFunction.const(0)
_RF1 = RationalFunction.const(1)


@dataclass
class RFMatrixEchelon:
    """Reduced row echelon form of a matrix over the rational-function field."""

    rows: list[list[RationalFunction]]
    pivots: list[int]
    ncols: int
    # for augmented systems: rhs column after reduction, and the inconsistent rows (if any)
    rhs: list[RationalFunction] | None = None
    inconsistent: bool = False


def _clear_row(row: list[RationalFunction]) -> list[RationalFunction]:
    """Scale a row by a polynomial so that every entry becomes polynomial."""
    den = None
    for e in row:
        if e.is_zero() or e.den.is_one():
            continue
        if den is None:
            den = e.den
        else:
            g = den.gcd(e.den)
            den = den * e.den.exquo(g)
    if den is None:
        return row
    scale = RationalFunction.from_poly(den)
    return [e * scale if not e.is_zero() else e for e in row]


def rf_echelon(
    matrix: Sequence[Sequence[RationalFunction]],
    ncols: int,
    rhs: Sequence[RationalFunction] | None = None,
) -> RFMatrixEchelon:
    """Gauss-Jordan elimination; pivots are the first nonzero entry in column order."""
    rows = [list(r) for r in matrix]
    b = None if rhs is None else list(rhs)
    if b is not None:
        rows = [r + [bi] for r, bi in zip(rows, b)]
        width = ncols + 1
    else:
        width = ncols
    rows = [_clear_row(r) for r in rows]
    pivots: list[int] = []
    prow = 0
    nrows = len(rows)
    for col in range(ncols):
        sel = None
        for i in range(prow, nrows):
            if not rows[i][col].is_zero():
                sel = i
                break
        if sel is None:
            continue
        rows[prow], rows[sel] = rows[sel], rows[prow]
        inv = rows[prow][col].inverse()
        rows[prow] = [e * inv if not e.is_zero() else e for e in rows[prow]]
        rows[prow][col] = _RF1
        prow_vals = rows[prow]
        for i in range(nrows):
            if i == prow:
                continue
            f = rows[i][col]
            if f.is_zero():
                continue
            rows[i] = [
                (e - f * p) if not p.is_zero() else e for e, p in zip(rows[i], prow_vals)
            ]
            rows[i][col] = _RF0
        pivots.append(col)
        prow += 1
        if prow == nrows:
            break
    inconsistent = False
    red_rhs = None
    if b is not None:
        red_rhs = [r[ncols] for r in rows]
        for r in rows[prow:]:
            if not r[ncols].is_zero():
                inconsistent = True
        rows = [r[:ncols] for r in rows]
    return RFMatrixEchelon(rows[:prow] if b is None else rows, pivots, width if b is None else ncols, red_rhs, inconsistent)


def rf_rank(matrix: Sequence[Sequence[RationalFunction]]) -> int:
    if not matrix:
        return 0
    return len(rf_echelon(matrix, len(matrix[0])).pivots)


def rf_nullspace(matrix: Sequence[Sequence[RationalFunction]], ncols: int) -> list[list[RationalFunction]]:
    """Basis of the right nullspace; one vector per free column with that entry 1."""
    ech = rf_echelon(matrix, ncols)
    return _nullspace_from_echelon(ech, ncols)


def _nullspace_from_echelon(ech: RFMatrixEchelon, ncols: int) -> list[list[RationalFunction]]:
    piv = ech.pivots
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for f in free:
        v = [_RF0] * ncols
        v[f] = _RF1
        for r, pc in enumerate(piv):
            e = ech.rows[r][f]
            if not e.is_zero():
                v[pc] = -e
        basis.append(v)
    return basis


def rf_solve(
    matrix: Sequence[Sequence[RationalFunction]],
    rhs: Sequence[RationalFunction],
    ncols: int,
) -> tuple[list[RationalFunction] | None, list[list[RationalFunction]]]:
    """Solve ``A v = b``: returns ``(particular or None, nullspace basis)``."""
    if not matrix:
        return [_RF0] * ncols, [[(_RF1 if i == j else _RF0) for i in range(ncols)] for j in range(ncols)]
    ech = rf_echelon(matrix, ncols, rhs)
    null = _nullspace_from_echelon(ech, ncols)
    if ech.inconsistent:
        return None, null
    part = [_RF0] * ncols
    for r, pc in enumerate(ech.pivots):
        part[pc] = ech.rhs[r]
    return part, null


def bareiss_det(matrix: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Fraction-free (Bareiss) determinant of a square polynomial matrix."""
    n = len(matrix)
    if n == 0:
        return Polynomial.const(1)
    M = [list(r) for r in matrix]
    sign = 1
    prev = Polynomial.const(1)
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if swap is None:
                return Polynomial.const(0)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                val = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                M[i][j] = val.exquo(prev) if not prev.is_one() else val
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return -det if sign < 0 else det


# ---------------------------------------------------------------------------
# rational systems written as sparse linear forms
# ---------------------------------------------------------------------------


class LinearForm(dict):
    """Sparse linear form ``{unknown_index: Fraction}`` with a constant under key -1."""

    def add_term(self, idx: int, c: Fraction):
        if c == 0:
            return
        v = self.get(idx, Fraction(0)) + c
        if v == 0:
            self.pop(idx, None)
        else:
            self[idx] = v


def _sdm_rows(rows: Sequence[Mapping[int, Fraction]], ncols: int, with_const: bool):
    data = {}
    for i, r in enumerate(rows):
        d = {}
        for j, c in r.items():
            if c == 0:
                continue
            col = ncols if j == -1 else j
            if j == -1 and not with_const:
                continue
            d[col] = _q(c)
        if d:
            data[i] = d
    return data


def q_solve(
    rows: Sequence[Mapping[int, Fraction]], ncols: int
) -> tuple[list[Fraction] | None, list[list[Fraction]]]:
    """Solve the rational system ``sum_j r[j] u_j + r[-1] = 0`` for every row ``r``.

    Returns ``(particular, nullspace basis)``; particular is ``None`` when the
    system is inconsistent.  Free unknowns are zero in the particular solution.
    """
    data = _sdm_rows(rows, ncols, True)
    nrows = max(len(rows), 1)
    M = DomainMatrix.from_rep(SDM(data, (nrows, ncols + 1), QQ))
    R, pivots = M.rref()
    rep = R.rep.to_sdm() if hasattr(R.rep, "to_sdm") else R.rep
    rdict = dict(rep)
    pivots = list(pivots)
    if ncols in pivots:
        # 0 = nonzero constant
        piv_q = [p for p in pivots if p != ncols]
        null = _q_null(rdict, piv_q, ncols)
        return None, null
    null = _q_null(rdict, pivots, ncols)
    part = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        row = rdict.get(r, {})
        c = row.get(ncols)
        if c is not None:
            part[pc] = -_frac(c)
    return part, null


def _q_null(rdict, pivots, ncols) -> list[list[Fraction]]:
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            row = rdict.get(r, {})
            e = row.get(f)
            if e is not None:
                v[pc] = -_frac(e)
        basis.append(v)
    return basis


def q_nullspace(rows: Sequence[Mapping[int, Fraction]], ncols: int) -> list[list[Fraction]]:
    _, null = q_solve([{k: v for k, v in r.items() if k != -1} for r in rows], ncols)
    return null


def rf_identity_rows(terms: Sequence[tuple[int, RationalFunction]]) -> list[LinearForm]:
    """Rational rows forcing ``sum_i a_i R_i == 0`` identically, for unknown rationals ``a_i``.

    ``terms`` pairs an unknown index (``-1`` for the constant part) with a
    rational function.  Denominators are cleared jointly and monomial
    coefficients matched, one row per monomial.
    """
    live = [(i, r) for i, r in terms if not r.is_zero()]
    if not live:
        return []
    den = Polynomial.const(1)
    for _, r in live:
        if not r.den.is_one():
            den = den * r.den.exquo(den.gcd(r.den))
    rows: dict[tuple, LinearForm] = {}
    for i, r in live:
        p = r.num * den.exquo(r.den) if not r.den.is_one() else r.num * den
        for mono, c in p.monomial_coefficients().items():
            rows.setdefault(mono, LinearForm()).add_term(i, c)
    return [row for row in rows.values() if row]
