"""Linear functional systems for cylindrical integrals, multipliers and partial integrals.

The unknowns are the components of the would-be gradient: ``psi_1..psi_s``
(coefficients of ``dt_1..dt_s``) followed by ``phi_1..phi_k`` (coefficients
of ``dx_1..dx_k``).  Partial-integral systems add unknown rational constants
``c`` that expand the right-hand sides ``H_j`` over a residual basis.

Systems are solved pointwise over the rational-function field in all
variables; :func:`restrict` then looks for combinations of the solutions that
depend on the allowed variables only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations_with_replacement
from math import gcd
from typing import Sequence, Union

from .expr import Expression, Polynomial, RationalFunction, UnsupportedOperation, sort_vars
from .linalg import LinearForm, q_solve, rf_echelon, rf_identity_rows, rf_solve
from .system import PdeSystem, SystemError_, TdSystem, divergence, operators_of

__all__ = [
    "FunctionalSystem",
    "SolutionFamily",
    "IndependenceCertificate",
    "InconsistentSystem",
    "FI_PDE_ORDER",
    "FI_TD_THETA_ORDER",
    "FI_TD_NU_ORDER",
    "LM_PDE_ORDER",
    "LM_TD_THETA_ORDER",
    "LM_TD_NU_ORDER",
    "build_fi_pde",
    "build_fi_td",
    "build_lm_pde",
    "build_lm_td",
    "build_pi",
    "default_residual_basis",
    "solve",
    "restrict",
    "independent_family",
    "t_basis_decompose",
]

# Highest derivative order of the extra rows, as a function of k.
FI_PDE_ORDER = lambda k: k - 1  # noqa: E731
FI_TD_THETA_ORDER = lambda k: k  # noqa: E731
FI_TD_NU_ORDER = lambda k: k - 1  # noqa: E731
# For PDE last multipliers the x_p-derivative rows run up to order k: with
# k = 1 the single row d/dx_p of the truncated equation is what pins the
# multiplier down.
LM_PDE_ORDER = lambda k: k  # noqa: E731
LM_TD_THETA_ORDER = lambda k: k + 1  # noqa: E731
LM_TD_NU_ORDER = lambda k: k  # noqa: E731

_ZERO = Expression()
_ONE = Expression.const(1)
_RF0 = RationalFunction.const(0)


class InconsistentSystem(ValueError):
    pass


@dataclass
class FunctionalSystem:
    """Equations ``row . u = rhs`` in the unknowns ``u``.

    ``form_vars`` are the coordinates the first ``len(form_vars)`` unknowns
    multiply in the Pfaffian form; the remaining unknowns (partial-integral
    systems only) are the constants expanding ``H_j``.
    """

    kind: str  # "fi" | "lm" | "pi"
    s: int
    k: int
    unknowns: tuple[str, ...]
    form_vars: tuple[str, ...]
    equations: list[tuple[list[Expression], Expression]]
    allowed_vars: tuple[str, ...]
    all_vars: tuple[str, ...]
    labels: list[str] = field(default_factory=list)
    residual_basis: tuple[Expression, ...] = ()
    # (equation index j, basis element) for each constant unknown
    constant_meaning: tuple[tuple[int, int], ...] = ()

    @property
    def ncols(self) -> int:
        return len(self.unknowns)

    @property
    def nform(self) -> int:
        return len(self.form_vars)

    @property
    def constant_indices(self) -> range:
        return range(self.nform, self.ncols)

    @property
    def homogeneous(self) -> bool:
        return all(rhs.is_zero() for _, rhs in self.equations)

    def render(self) -> list[str]:
        out = []
        for row, rhs in self.equations:
            parts = []
            for name, c in zip(self.unknowns, row):
                if not c.is_zero():
                    parts.append(f"({c.render()})*{name}")
            out.append(f"{' + '.join(parts) or '0'} = {rhs.render()}")
        return out

    def residual(self, vector: Sequence[Expression], weight: int = 1) -> list[Expression]:
        """``row . v - weight * rhs`` for every equation."""
        res = []
        for row, rhs in self.equations:
            total = _ZERO
            for c, v in zip(row, vector):
                if not c.is_zero() and not v.is_zero():
                    total = total + c * v
            if weight:
                total = total - rhs
            res.append(total)
        return res


@dataclass
class SolutionFamily:
    """Solutions of a functional system.

    ``particular`` is ``None`` for an inconsistent inhomogeneous system.
    ``free_columns[i]`` is the unknown that is set to 1 in basis vector ``i``.
    """

    system: FunctionalSystem
    particular: list[Expression] | None
    nullspace_basis: list[list[Expression]]
    restricted: list[bool]
    consistent: bool = True
    free_columns: list[int] = field(default_factory=list)
    particular_restricted: bool = False

    @property
    def vectors(self) -> list[list[Expression]]:
        return list(self.nullspace_basis)

    def form_part(self, vector: Sequence[Expression]) -> list[Expression]:
        return list(vector[: self.system.nform])

    def constants_part(self, vector: Sequence[Expression]) -> list[Expression]:
        return list(vector[self.system.nform :])


@dataclass
class IndependenceCertificate:
    rank: int
    rows: list[int]
    cols: list[int]
    minor: Expression


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _check(S, s, k):
    if not (0 <= k <= S.n):
        raise SystemError_(f"k must satisfy 0 <= k <= n = {S.n}")
    if s is not None and not (0 <= s <= S.m):
        raise SystemError_(f"s must satisfy 0 <= s <= m = {S.m}")


def _nth(e: Expression, v: str, order: int) -> Expression:
    for _ in range(order):
        if e.is_zero():
            break
        e = e.diff(v)
    return e


def _unknown_names(s: int, k: int) -> tuple[str, ...]:
    return tuple(f"psi{i + 1}" for i in range(s)) + tuple(f"phi{i + 1}" for i in range(k))


def _pde_rows(S: PdeSystem, k: int, order: int, rhs_of) -> tuple[list, list]:
    xs = S.space.dependent
    eqs, labels = [], []
    for j, L in enumerate(S.operators):
        base = [L.coefficient(x) for x in xs[:k]]
        rhs = rhs_of(j, L)
        eqs.append((base, rhs))
        labels.append(f"op{j + 1}")
        for p in xs[k:]:
            for xi in range(1, order + 1):
                eqs.append(([_nth(c, p, xi) for c in base], _nth(rhs, p, xi)))
                labels.append(f"op{j + 1} d^{xi}/d{p}^{xi}")
    return eqs, labels


def build_fi_pde(S: PdeSystem, k: int, order: int | None = None) -> FunctionalSystem:
    """Rows ``u_j1 phi_1 + .. + u_jk phi_k = 0`` plus their ``x_p``-derivative rows."""
    _check(S, None, k)
    order = FI_PDE_ORDER(k) if order is None else order
    eqs, labels = _pde_rows(S, k, order, lambda j, L: _ZERO)
    xs = S.space.dependent
    return FunctionalSystem("fi", 0, k, _unknown_names(0, k), xs[:k], eqs, xs[:k], xs, labels)


def build_lm_pde(S: PdeSystem, k: int, order: int | None = None) -> FunctionalSystem:
    """As :func:`build_fi_pde` with right-hand sides ``-div L_j`` and their derivatives."""
    _check(S, None, k)
    order = LM_PDE_ORDER(k) if order is None else order
    eqs, labels = _pde_rows(S, k, order, lambda j, L: -divergence(L))
    xs = S.space.dependent
    return FunctionalSystem("lm", 0, k, _unknown_names(0, k), xs[:k], eqs, xs[:k], xs, labels)


def _td_rows(S: TdSystem, s: int, k: int, theta_order: int, nu_order: int, rhs_of):
    ts, xs = S.space.independent, S.space.dependent
    eqs, labels = [], []
    for j in range(S.m):
        trunc = [S.X[i][j] for i in range(k)]
        if j < s:
            base = [(_ONE if z == j else _ZERO) for z in range(s)] + trunc
            order = theta_order
        else:
            base = [_ZERO] * s + trunc
            order = nu_order
        rhs = rhs_of(j)
        eqs.append((base, rhs))
        labels.append(f"col{j + 1}")
        deriv_base = [_ZERO] * s + trunc
        for v in list(ts[s:]) + list(xs[k:]):
            for xi in range(1, order + 1):
                eqs.append(([_nth(c, v, xi) for c in deriv_base], _nth(rhs, v, xi)))
                labels.append(f"col{j + 1} d^{xi}/d{v}^{xi}")
    return eqs, labels


def build_fi_td(
    S: TdSystem, s: int, k: int, theta_order: int | None = None, nu_order: int | None = None
) -> FunctionalSystem:
    """Rows ``psi_j + X^j phi = 0`` (j <= s), ``X^j phi = 0`` (j > s) and derivative rows."""
    _check(S, s, k)
    to = FI_TD_THETA_ORDER(k) if theta_order is None else theta_order
    no = FI_TD_NU_ORDER(k) if nu_order is None else nu_order
    eqs, labels = _td_rows(S, s, k, to, no, lambda j: _ZERO)
    fv = S.space.independent[:s] + S.space.dependent[:k]
    return FunctionalSystem("fi", s, k, _unknown_names(s, k), fv, eqs, fv, S.space.all, labels)


def build_lm_td(
    S: TdSystem, s: int, k: int, theta_order: int | None = None, nu_order: int | None = None
) -> FunctionalSystem:
    """As :func:`build_fi_td` with right-hand sides ``-div_x X^j`` and their derivatives."""
    _check(S, s, k)
    to = LM_TD_THETA_ORDER(k) if theta_order is None else theta_order
    no = LM_TD_NU_ORDER(k) if nu_order is None else nu_order
    ops = operators_of(S)
    eqs, labels = _td_rows(S, s, k, to, no, lambda j: -divergence(ops[j]))
    fv = S.space.independent[:s] + S.space.dependent[:k]
    return FunctionalSystem("lm", s, k, _unknown_names(s, k), fv, eqs, fv, S.space.all, labels)


def default_residual_basis(S: PdeSystem | TdSystem, products: bool = True) -> list[Expression]:
    """The distinct nonzero coefficient entries of the system and their pairwise products.

    Entries equal up to a rational factor are kept once.
    """
    if isinstance(S, PdeSystem):
        entries = [L.coefficient(x) for L in S.operators for x in S.space.dependent]
    else:
        entries = [e for row in S.X for e in row]
    base: list[Expression] = []
    seen: set = set()

    def push(e: Expression):
        if e.is_zero() or not e.is_rational():
            return
        rf = e.as_rational_function()
        _, prim = rf.num.primitive()
        key = (prim, rf.den)
        if key in seen:
            return
        seen.add(key)
        base.append(Expression.from_rf(RationalFunction(prim, rf.den)))

    for e in entries:
        push(e)
    if products:
        first = list(base)
        for a, b in combinations_with_replacement(range(len(first)), 2):
            push(first[a] * first[b])
    return base


def build_pi(
    S: PdeSystem | TdSystem,
    s: int,
    k: int,
    residual_basis: Sequence[Union[Expression, str]] | None = None,
) -> FunctionalSystem:
    """Partial-integral system: FI-shaped rows with ``H_j = sum_b c_jb b``.

    The constants ``c_jb`` are extra unknowns, so the system stays linear.
    ``residual_basis=None`` selects :func:`default_residual_basis`; an empty
    basis gives back the first-integral system.
    """
    if residual_basis is None:
        basis = default_residual_basis(S)
    else:
        basis = [Expression.coerce(b) for b in residual_basis]
    if isinstance(S, PdeSystem):
        fi = build_fi_pde(S, k)
        s = 0
    else:
        fi = build_fi_td(S, s, k)
    m = S.m
    consts = [(j, b) for j in range(m) for b in range(len(basis))]
    names = fi.unknowns + tuple(f"c{j + 1}_{b + 1}" for j, b in consts)
    # Re-derive rows with the H_j columns appended: every row derives from one
    # operator/column j and is a derivative of some order in one variable.
    eqs = []
    for (row, _), label in zip(fi.equations, fi.labels):
        j, var, order = _parse_label(label)
        extra = []
        for jj, b in consts:
            extra.append(-_nth(basis[b], var, order) if jj == j else _ZERO)
        eqs.append((list(row) + extra, _ZERO))
    return FunctionalSystem(
        "pi", s, k, names, fi.form_vars, eqs, fi.allowed_vars, fi.all_vars, list(fi.labels), tuple(basis), tuple(consts)
    )


def _parse_label(label: str) -> tuple[int, str | None, int]:
    head, _, deriv = label.partition(" ")
    j = int(head.lstrip("opcl")) - 1
    if not deriv:
        return j, None, 0
    # "d^{xi}/d{v}^{xi}"
    num, _, rest = deriv[2:].partition("/d")
    var, _, _ = rest.rpartition("^")
    return j, var, int(num)


# ---------------------------------------------------------------------------
# solving
# ---------------------------------------------------------------------------


def _rf(e: Expression) -> RationalFunction:
    if not e.is_rational():
        raise UnsupportedOperation("functional systems need rational-function coefficients")
    return e.as_rational_function()


def _primitive_vector(v: list[RationalFunction]) -> list[RationalFunction]:
    """Scale a vector by a rational function so its entries are coprime integer polynomials."""
    nz = [e for e in v if not e.is_zero()]
    if not nz:
        return v
    den = Polynomial.const(1)
    for e in nz:
        den = den * e.den.exquo(den.gcd(e.den))
    nums = [e.num * den.exquo(e.den) if not e.is_zero() else Polynomial.const(0) for e in v]
    g = None
    for p in nums:
        if p.is_zero():
            continue
        g = p if g is None else g.gcd(p)
    nums = [p.exquo(g) if not p.is_zero() else p for p in nums]
    first = next(p for p in nums if not p.is_zero())
    c, _ = first.primitive()
    # make the integer content 1 across the whole vector
    contents = [p.primitive()[0] for p in nums if not p.is_zero()]
    numg = reduce(gcd, (abs(f.numerator) for f in contents))
    deng = reduce(lambda a, b: a * b // gcd(a, b), (f.denominator for f in contents))
    scale = Fraction(deng, numg) * (1 if c > 0 else -1)
    return [RationalFunction.from_poly(p.scale(scale)) for p in nums]


def solve(F: FunctionalSystem, strict: bool = False) -> SolutionFamily:
    """Gaussian elimination over the rational-function field; every vector is re-verified."""
    n = F.ncols
    rows = [[_rf(c) for c in row] for row, _ in F.equations]
    rhs = [_rf(r) for _, r in F.equations]
    if n == 0:
        consistent = all(r.is_zero() for r in rhs)
        if strict and not consistent:
            raise InconsistentSystem(_inconsistent_message(F))
        return SolutionFamily(F, [] if consistent else None, [], [], consistent)
    if not rows:
        part, null = [_RF0] * n, [[(RationalFunction.const(1) if i == j else _RF0) for i in range(n)] for j in range(n)]
        free = list(range(n))
    else:
        part, null = rf_solve(rows, rhs, n)
        ech = rf_echelon(rows, n)
        piv = set(ech.pivots)
        free = [c for c in range(n) if c not in piv]
    if part is None:
        if strict:
            raise InconsistentSystem(_inconsistent_message(F))
    if F.kind == "fi":
        null = [_primitive_vector(v) for v in null]
    particular = None if part is None else [Expression.from_rf(e) for e in part]
    basis = [[Expression.from_rf(e) for e in v] for v in null]
    # re-verification by substitution
    if particular is not None and not all(r.is_zero() for r in F.residual(particular, 1)):
        raise RuntimeError("particular solution failed re-substitution")
    for v in basis:
        if not all(r.is_zero() for r in F.residual(v, 0)):
            raise RuntimeError("nullspace vector failed re-substitution")
    fam = SolutionFamily(F, particular, basis, [], part is not None, free)
    fam.restricted = [_is_restricted(F, v) for v in basis]
    if particular is not None:
        fam.particular_restricted = _is_restricted(F, particular)
    return fam


def _inconsistent_message(F: FunctionalSystem) -> str:
    what = {"lm": "last multiplier", "pi": "partial integral"}.get(F.kind, "first integral")
    return f"no {what} of this shape: the functional system is inconsistent"


def _forbidden(F: FunctionalSystem, allowed: Sequence[str]) -> list[str]:
    allowed = set(allowed)
    return [v for v in F.all_vars if v not in allowed]


def _is_restricted(F: FunctionalSystem, v: Sequence[Expression], allowed: Sequence[str] | None = None) -> bool:
    allowed = F.allowed_vars if allowed is None else allowed
    bad = _forbidden(F, allowed)
    for i, e in enumerate(v):
        if e.is_zero():
            continue
        if i >= F.nform:
            if not e.is_constant():
                return False
        elif any(e.depends_on(x) for x in bad):
            return False
    return True


def _monomials(variables: Sequence[str], degree: int) -> list[Polynomial]:
    monos = [Polynomial.const(1)]
    layer = [Polynomial.const(1)]
    for _ in range(degree):
        nxt = []
        seen = set()
        for m in layer:
            for v in variables:
                p = m * Polynomial.var(v)
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        monos.extend(nxt)
        layer = nxt
    return monos


def restrict(
    sol: SolutionFamily,
    allowed_vars: Sequence[str] | None = None,
    combiner_degree: int = 0,
    require_closed: bool = False,
    polynomial_form: bool = False,
) -> SolutionFamily:
    """Solutions depending on the allowed variables only (constants constant).

    Searches combinations ``particular + sum_i a_i v_i`` of the family where
    each ``a_i`` is a rational constant, or -- with ``combiner_degree > 0`` and
    ``v_i`` pivoted on a form coordinate -- a polynomial of that degree in the
    allowed variables.  The conditions "forbidden partials vanish" (and, with
    ``require_closed``, closedness of the form part) are linear in the
    unknown coefficients and solved exactly.  ``polynomial_form`` further
    asks the form part to be polynomial (a linear condition: the remainder
    modulo the common denominator must vanish).
    """
    F = sol.system
    allowed = tuple(F.allowed_vars if allowed_vars is None else allowed_vars)
    bad = _forbidden(F, allowed)
    if not sol.consistent:
        return SolutionFamily(F, None, [], [], False, [])
    nform = F.nform
    # unknown coefficient columns: (basis index, monomial); highest degrees first
    cols: list[tuple[int, Polynomial]] = []
    for i, _v in enumerate(sol.nullspace_basis):
        fc = sol.free_columns[i] if i < len(sol.free_columns) else None
        if combiner_degree > 0 and fc is not None and fc < nform:
            monos = _monomials(allowed, combiner_degree)
        else:
            monos = [Polynomial.const(1)]
        for m in monos:
            cols.append((i, m))
    cols.sort(key=lambda c: -c[1].total_degree())
    affine = sol.particular is not None and not all(e.is_zero() for e in sol.particular)
    basis_rf = [[_rf(e) for e in v] for v in sol.nullspace_basis]
    part_rf = [_rf(e) for e in sol.particular] if affine else None
    ncols = len(cols)

    def entry_terms(idx: int, op) -> list[tuple[int, RationalFunction]]:
        """Terms of ``op(component idx of the combination)``; ``op`` acts on RF."""
        terms = []
        for c, (i, mono) in enumerate(cols):
            e = basis_rf[i][idx]
            if e.is_zero():
                continue
            terms.append((c, op(e * RationalFunction.from_poly(mono))))
        if part_rf is not None and not part_rf[idx].is_zero():
            terms.append((-1, op(part_rf[idx])))
        return terms

    conds: list[LinearForm] = []
    for idx in range(F.ncols):
        vars_ = bad if idx < nform else F.all_vars
        for v in vars_:
            conds.extend(rf_identity_rows(entry_terms(idx, lambda r, v=v: r.diff(v))))
    if require_closed:
        fv = F.form_vars
        for a in range(nform):
            for b in range(a + 1, nform):
                ta = entry_terms(b, lambda r, v=fv[a]: r.diff(v))
                tb = [(c, -r) for c, r in entry_terms(a, lambda r, v=fv[b]: r.diff(v))]
                conds.extend(rf_identity_rows(ta + tb))
    if polynomial_form:
        for idx in range(nform):
            conds.extend(_polynomial_conditions(entry_terms(idx, lambda r: r)))
    if not ncols and not affine:
        return SolutionFamily(F, sol.particular, [], [], sol.consistent, [])
    part_coeffs, null = q_solve(conds, ncols)

    def assemble(coeffs: Sequence[Fraction], with_part: bool) -> list[Expression]:
        vec = [_RF0] * F.ncols
        for c, (i, mono) in enumerate(cols):
            a = coeffs[c]
            if a == 0:
                continue
            scale = RationalFunction.from_poly(mono.scale(a))
            for idx in range(F.ncols):
                e = basis_rf[i][idx]
                if not e.is_zero():
                    vec[idx] = vec[idx] + e * scale
        if with_part and part_rf is not None:
            vec = [a + b for a, b in zip(vec, part_rf)]
        return [Expression.from_rf(e) for e in vec]

    particular = None
    if affine:
        if part_coeffs is None:
            return SolutionFamily(F, None, [], [], True, [], False)
        particular = assemble(part_coeffs, True)
    elif sol.particular is not None:
        particular = list(sol.particular)
    vectors = [assemble(v, False) for v in null]
    if F.kind == "fi" and not require_closed:
        vectors = [[Expression.from_rf(e) for e in _primitive_vector([_rf(x) for x in v])] for v in vectors]
    vectors = _q_independent(vectors)
    vectors.sort(key=_vector_complexity)
    for v in vectors:
        if not all(r.is_zero() for r in F.residual(v, 0)):
            raise RuntimeError("restricted vector failed re-substitution")
        if not _is_restricted(F, v, allowed):
            raise RuntimeError("restricted vector still depends on forbidden variables")
    out = SolutionFamily(F, particular, vectors, [True] * len(vectors), True, [])
    out.particular_restricted = particular is not None
    return out


def _polynomial_conditions(terms: list[tuple[int, RationalFunction]]) -> list[LinearForm]:
    """Rows forcing ``sum_i a_i R_i`` to be a polynomial."""
    live = [(i, r) for i, r in terms if not r.is_zero()]
    den = Polynomial.const(1)
    for _, r in live:
        if not r.den.is_one():
            den = den * r.den.exquo(den.gcd(r.den))
    if den.is_constant():
        return []
    rems = []
    for i, r in live:
        p = r.num * den.exquo(r.den)
        _, rem = p.divmod(den)
        rems.append((i, RationalFunction.from_poly(rem)))
    return rf_identity_rows(rems)


def _q_independent(vectors: list[list[Expression]]) -> list[list[Expression]]:
    """Greedy subset of the vectors that is linearly independent over the rationals."""
    kept: list[list[RationalFunction]] = []
    out = []
    for v in sorted(vectors, key=_vector_complexity):
        rf = [_rf(e) for e in v]
        if all(e.is_zero() for e in rf):
            continue
        conds: list[LinearForm] = []
        for idx in range(len(rf)):
            terms = [(c, w[idx]) for c, w in enumerate(kept)] + [(-1, -rf[idx])]
            conds.extend(rf_identity_rows(terms))
        part, _ = q_solve(conds, len(kept))
        if part is None:
            kept.append(rf)
            out.append(v)
    return out


def _vector_complexity(v: Sequence[Expression]):
    degs = []
    size = 0
    for e in v:
        if e.is_zero():
            continue
        rf = e.as_rational_function()
        degs.append(max(rf.num.total_degree(), rf.den.total_degree()))
        size += rf.num.nterms() + rf.den.nterms()
    return (max(degs, default=0), size, [e.render() for e in v])


def independent_family(
    sol_or_vectors: Union[SolutionFamily, Sequence[Sequence[Expression]]],
) -> tuple[int, IndependenceCertificate]:
    """Generic rank of the stacked solution vectors with a nonzero-minor certificate."""
    from .wronskian import _rational_det

    if isinstance(sol_or_vectors, SolutionFamily):
        vecs = [v for v, r in zip(sol_or_vectors.nullspace_basis, sol_or_vectors.restricted) if r]
    else:
        vecs = [list(v) for v in sol_or_vectors]
    if not vecs:
        return 0, IndependenceCertificate(0, [], [], _ONE)
    rows = [[_rf(e) for e in v] for v in vecs]
    width = len(rows[0])
    chosen: list[int] = []
    for i, r in enumerate(rows):
        trial = [rows[c] for c in chosen] + [r]
        if len(rf_echelon(trial, width).pivots) == len(trial):
            chosen.append(i)
    sub = [rows[c] for c in chosen]
    cols = rf_echelon(sub, width).pivots
    minor = _rational_det([[Expression.from_rf(sub[a][b]) for b in cols] for a in range(len(sub))])
    if minor.is_zero():
        raise RuntimeError("independence certificate minor vanished")
    return len(chosen), IndependenceCertificate(len(chosen), chosen, list(cols), minor)


# ---------------------------------------------------------------------------
# decomposition over a declared basis of t-functions
# ---------------------------------------------------------------------------


def t_basis_decompose(
    e: Union[Expression, str], t: str, basis: Sequence[Union[Expression, str]]
) -> list[Expression]:
    """Coefficients ``a_b`` free of ``t`` with ``e = sum_b a_b * basis_b``.

    The basis entries are rational functions in ``t`` (possibly involving
    other variables, e.g. ``1/(t - x6)``).  The coefficients are found by
    undetermined coefficients after clearing the common denominator and
    matching powers of ``t``; a ``ValueError`` is raised when ``e`` is not in
    the span.
    """
    import sympy

    e = Expression.coerce(e)
    bas = [Expression.coerce(b) for b in basis]
    T = sympy.Symbol(t)
    target = sympy.together(_rf(e).to_sympy())
    unknowns = sympy.symbols(f"a0:{len(bas)}")
    combo = sum(a * _rf(b).to_sympy() for a, b in zip(unknowns, bas))
    num, den = sympy.fraction(sympy.together(combo - target))
    poly = sympy.Poly(sympy.expand(num), T)
    eqs = poly.coeffs()
    sol = sympy.solve(eqs, unknowns, dict=True)
    if not sol:
        raise ValueError(f"{e.render()} is not in the span of the declared t-basis")
    sol = sol[0]
    out = []
    for a in unknowns:
        val = sympy.simplify(sol.get(a, sympy.Integer(0)).subs({u: 0 for u in unknowns}))
        if T in val.free_symbols:
            raise ValueError("t-basis coefficients must be free of t")
        out.append(_from_sympy(val))
    # verify
    total = _ZERO
    for a, b in zip(out, bas):
        total = total + a * b
    if not (total - e).is_zero():
        raise ValueError(f"{e.render()} is not in the span of the declared t-basis")
    return out


def _from_sympy(val) -> Expression:
    return Expression.from_rf(RationalFunction.from_sympy(val))
