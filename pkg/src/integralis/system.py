"""PDE systems, total differential systems, and their operator calculus.

A PDE system is a list of first-order operators ``L_j = sum_i u_ji d/dx_i``.
A total differential system ``dx = X(t, x) dt`` induces the operators
``D_j = d/dt_j + sum_i X_ij d/dx_i``.  This module computes Poisson brackets,
divergences, the Frobenius (complete solvability) test in both its residual
and bracket forms, completeness and Jacobian tests, the bracket-closure
defect, and integral-basis dimension counts.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TypeVar

from .expr import Expression, RationalFunction, UnsupportedOperation
from .linalg import rf_echelon, rf_rank, rf_solve

__all__ = [
    "VariableSpace",
    "LinearOperator",
    "PdeSystem",
    "TdSystem",
    "DefectReport",
    "FrobeniusReport",
    "CompletenessReport",
    "induced_operators",
    "apply",
    "poisson_bracket",
    "divergence",
    "is_frobenius_solvable",
    "is_complete",
    "is_jacobian",
    "closure_and_defect",
    "integral_basis_dimension",
    "autonomous_fi_count",
    "operators_of",
    "parallel_map",
    "SystemError_",
]

T = TypeVar("T")
R = TypeVar("R")


class SystemError_(ValueError):
    """Raised for invalid system definitions or violated preconditions."""


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("INTEGRALIS_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Order-preserving map capped by ``INTEGRALIS_THREADS`` (default 1)."""
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class VariableSpace:
    independent: tuple[str, ...]
    dependent: tuple[str, ...]

    def __post_init__(self):
        names = self.independent + self.dependent
        if len(set(names)) != len(names):
            raise SystemError_("variable names must be pairwise distinct")

    @property
    def all(self) -> tuple[str, ...]:
        return self.independent + self.dependent

    @property
    def m(self) -> int:
        return len(self.independent)

    @property
    def n(self) -> int:
        return len(self.dependent)


_ZERO = Expression()
_ONE = Expression.const(1)


@dataclass(frozen=True)
class LinearOperator:
    """First-order operator ``sum_v c_v d/dv`` (plus ``d/dt_theta`` if ``unit_time_index``)."""

    space: VariableSpace
    coefficients: dict[str, Expression]
    unit_time_index: int | None = None

    def __post_init__(self):
        for v in self.coefficients:
            if v not in self.space.all:
                raise SystemError_(f"operator coefficient for unknown variable {v!r}")

    def coefficient(self, v: str) -> Expression:
        c = self.coefficients.get(v, _ZERO)
        if self.unit_time_index is not None and self.space.independent[self.unit_time_index] == v:
            c = c + _ONE
        return c

    def vector(self, variables: Sequence[str] | None = None) -> list[Expression]:
        variables = self.space.all if variables is None else variables
        return [self.coefficient(v) for v in variables]

    def apply(self, e: Expression) -> Expression:
        total = Expression()
        syms = e.free_symbols
        for v in self.space.all:
            if v not in syms:
                continue
            c = self.coefficient(v)
            if c.is_zero():
                continue
            total = total + c * e.diff(v)
        return total

    def is_zero(self) -> bool:
        return all(self.coefficient(v).is_zero() for v in self.space.all)

    def render(self) -> str:
        parts = []
        for v in self.space.all:
            c = self.coefficient(v)
            if c.is_zero():
                continue
            parts.append(f"({c.render()})*d/d{v}")
        return " + ".join(parts) if parts else "0"

    def __eq__(self, other):
        if not isinstance(other, LinearOperator):
            return NotImplemented
        return self.space == other.space and all(
            self.coefficient(v) == other.coefficient(v) for v in self.space.all
        )

    def __hash__(self):
        return hash(tuple(self.coefficient(v) for v in self.space.all))


@dataclass(frozen=True)
class PdeSystem:
    space: VariableSpace
    operators: tuple[LinearOperator, ...]
    name: str = ""

    def __post_init__(self):
        if self.space.independent:
            raise SystemError_("a PDE system has no independent variables")
        if not (1 <= len(self.operators) <= self.space.n):
            raise SystemError_("need 1 <= m <= n operators")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def m(self) -> int:
        return len(self.operators)

    def u(self, j: int, i: int) -> Expression:
        return self.operators[j].coefficient(self.space.dependent[i])


@dataclass(frozen=True)
class TdSystem:
    space: VariableSpace
    X: tuple[tuple[Expression, ...], ...]  # n rows, m columns
    name: str = ""

    def __post_init__(self):
        if len(self.X) != self.space.n or any(len(r) != self.space.m for r in self.X):
            raise SystemError_(
                f"matrix must be {self.space.n}x{self.space.m} to match the declared variables"
            )
        if self.space.m > self.space.n:
            raise SystemError_("a total differential system needs m <= n")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def m(self) -> int:
        return self.space.m

    def column(self, j: int) -> list[Expression]:
        return [row[j] for row in self.X]


@dataclass
class DefectReport:
    defect: int
    added_operators: list[LinearOperator]
    closed: bool
    iteration_bound: int
    rank: int = 0


@dataclass
class FrobeniusReport:
    solvable: bool
    residuals: dict[tuple[int, int, int], Expression]  # (i, j, zeta) -> residual of the Frobenius identity
    brackets: dict[tuple[int, int], LinearOperator]
    bracket_solvable: bool


@dataclass
class CompletenessReport:
    complete: bool
    witness: dict[tuple[int, int], list[RationalFunction] | None]
    brackets: dict[tuple[int, int], LinearOperator] = field(default_factory=dict)


def induced_operators(S: TdSystem) -> list[LinearOperator]:
    ops = []
    for j in range(S.m):
        coeffs = {x: S.X[i][j] for i, x in enumerate(S.space.dependent) if not S.X[i][j].is_zero()}
        ops.append(LinearOperator(S.space, coeffs, unit_time_index=j))
    return ops


def operators_of(S: PdeSystem | TdSystem) -> list[LinearOperator]:
    return list(S.operators) if isinstance(S, PdeSystem) else induced_operators(S)


def apply(L: LinearOperator, e: Expression) -> Expression:
    return L.apply(e)


def poisson_bracket(A: LinearOperator, B: LinearOperator) -> LinearOperator:
    if A.space != B.space:
        raise SystemError_("operators act on different spaces")
    coeffs = {}
    for v in A.space.all:
        c = A.apply(B.coefficient(v)) - B.apply(A.coefficient(v))
        if not c.is_zero():
            coeffs[v] = c
    return LinearOperator(A.space, coeffs)


def divergence(L: LinearOperator) -> Expression:
    """Divergence over the dependent (x) variables only."""
    total = Expression()
    for v in L.space.dependent:
        total = total + L.coefficient(v).diff(v)
    return total


def _rf(e: Expression) -> RationalFunction:
    if not e.is_rational():
        raise UnsupportedOperation("operator coefficients must be rational functions for this test")
    return e.as_rational_function()


def is_frobenius_solvable(S: TdSystem) -> FrobeniusReport:
    """Complete solvability via the coefficient identities and via brackets.

    The two routes are computed independently and must agree.
    """
    X = S.X
    xs = S.space.dependent
    ts = S.space.independent
    pairs = [(j, z) for j in range(S.m) for z in range(j + 1, S.m)]

    def residual(jz):
        j, z = jz
        out = {}
        for i in range(S.n):
            lhs = X[i][z].diff(ts[j])
            rhs = X[i][j].diff(ts[z])
            for xi in range(S.n):
                lhs = lhs + X[xi][j] * X[i][z].diff(xs[xi])
                rhs = rhs + X[xi][z] * X[i][j].diff(xs[xi])
            out[(i, j, z)] = lhs - rhs
        return out

    residuals: dict[tuple[int, int, int], Expression] = {}
    for part in parallel_map(residual, pairs):
        residuals.update(part)
    ops = induced_operators(S)
    brackets = dict(zip(pairs, parallel_map(lambda jz: poisson_bracket(ops[jz[0]], ops[jz[1]]), pairs)))
    solvable = all(r.is_zero() for r in residuals.values())
    bracket_solvable = all(b.is_zero() for b in brackets.values())
    if solvable != bracket_solvable:
        raise RuntimeError("Frobenius residual and bracket tests disagree")
    return FrobeniusReport(solvable, residuals, brackets, bracket_solvable)


def _as_pde_ops(S) -> list[LinearOperator]:
    return operators_of(S)


def is_complete(S: PdeSystem | TdSystem) -> CompletenessReport:
    """Each bracket must lie in the span of the operators over the function field.

    For a total differential system the induced operators are used.
    """
    ops = _as_pde_ops(S)
    space = ops[0].space
    m = len(ops)
    cols = [[_rf(L.coefficient(v)) for L in ops] for v in space.all]  # rows = variables
    witness = {}
    brackets = {}
    complete = True
    for j in range(m):
        for z in range(j + 1, m):
            br = poisson_bracket(ops[j], ops[z])
            brackets[(j, z)] = br
            rhs = [_rf(br.coefficient(v)) for v in space.all]
            part, _ = rf_solve(cols, rhs, m)
            witness[(j, z)] = part
            if part is None:
                complete = False
    return CompletenessReport(complete, witness, brackets)


def is_jacobian(S: PdeSystem | TdSystem) -> bool:
    ops = _as_pde_ops(S)
    return all(
        poisson_bracket(ops[j], ops[z]).is_zero() for j in range(len(ops)) for z in range(j + 1, len(ops))
    )


def _op_rows(ops: Sequence[LinearOperator]) -> list[list[RationalFunction]]:
    space = ops[0].space
    return [[_rf(L.coefficient(v)) for v in space.all] for L in ops]


def closure_and_defect(S: PdeSystem | TdSystem, max_new_ops: int | None = None) -> DefectReport:
    """Append generically independent brackets until the span closes.

    Pairs are visited in lexicographic index order; pairs involving newly
    appended operators are queued behind the existing ones (breadth-first).
    """
    ops = _as_pde_ops(S)
    space = ops[0].space
    total = len(space.all)
    bound = total if max_new_ops is None else max_new_ops
    if bound < 0:
        raise SystemError_("maxNewOps must be non-negative")
    rows = _op_rows(ops)
    rank = rf_rank(rows)
    queue = [(i, j) for i in range(len(ops)) for j in range(i + 1, len(ops))]
    added: list[LinearOperator] = []
    qi = 0
    while qi < len(queue):
        if rank == total:
            break
        i, j = queue[qi]
        qi += 1
        br = poisson_bracket(ops[i], ops[j])
        if br.is_zero():
            continue
        cand = rows + [[_rf(br.coefficient(v)) for v in space.all]]
        r2 = rf_rank(cand)
        if r2 > rank:
            if len(added) >= bound:
                return DefectReport(len(added), added, False, bound, rank)
            added.append(br)
            ops.append(br)
            rows = cand
            rank = r2
            new = len(ops) - 1
            queue.extend((k, new) for k in range(new))
    return DefectReport(len(added), added, True, bound, rank)


def integral_basis_dimension(S: PdeSystem | TdSystem, max_new_ops: int | None = None) -> int:
    """``n - m - delta`` for PDE systems, ``n - delta`` for total differential systems."""
    rep = closure_and_defect(S, max_new_ops)
    if not rep.closed:
        raise SystemError_("bracket closure did not terminate within the bound")
    if isinstance(S, PdeSystem):
        return S.n - S.m - rep.defect
    return S.n - rep.defect


def autonomous_fi_count(S: TdSystem, s: int) -> int:
    """Number of functionally independent s-nonautonomous first integrals.

    Equals ``n - rank`` of the matrix with the first ``s`` columns removed,
    provided the entries do not involve ``t_{s+1}, ..., t_m`` and the system
    is completely solvable.
    """
    if not (0 <= s <= S.m):
        raise SystemError_("s must satisfy 0 <= s <= m")
    banned = S.space.independent[s:]
    for i, row in enumerate(S.X):
        for j, e in enumerate(row):
            bad = [t for t in banned if t in e.free_symbols and e.depends_on(t)]
            if bad:
                raise SystemError_(
                    f"entry X[{i + 1},{j + 1}] = {e.render()} depends on {bad[0]}; "
                    f"the system is not {s}-nonautonomous"
                )
    if not is_frobenius_solvable(S).solvable:
        raise SystemError_("system is not completely solvable")
    sub = [[_rf(S.X[i][j]) for j in range(s, S.m)] for i in range(S.n)]
    r = rf_rank(sub) if S.m > s else 0
    return S.n - r
