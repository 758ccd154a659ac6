"""Bounded-degree search for polynomial partial integrals (Darboux polynomials).

A candidate ``w`` is a rational-coefficient polynomial of degree at most
``w_degree`` in the allowed variables.  Each operator is first split into
*components*: its coefficients are expanded over functions of the variables
``w`` cannot depend on (partial fractions in ``t``, or a caller-declared
basis, and monomials in absent dependent variables).  ``w`` is searched so
that every component maps it into the ideal ``(w)`` after clearing
denominators; survivors are then certified exactly on the full system.

The candidate space is a linear subspace ``W`` that only shrinks:

* **kernel stage** -- if nonnegative weights make the component strictly
  weight-decreasing, its cofactor must vanish and ``W`` is replaced by the
  kernel of the component (linear algebra);
* **eigen stage** -- if positive weights make it weight-nonincreasing, the
  cofactor is a constant and ``W`` splits into rational eigenspaces;
* **elimination stage** -- once ``dim W <= 12`` the remaining conditions are
  decided exactly: for each possible leading monomial, ``w`` is normalized
  to be monic, the components' images are divided by ``w`` symbolically and
  the remainder coefficients are handed to a Groebner basis.  A basis equal
  to ``[1]`` rules out every complex-coefficient ``w`` of that shape.

Larger unresolved spaces fall back to an alternating heuristic and flag the
search as partial; nothing is ever claimed about them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Mapping, Sequence, Union

import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from .expr import Expression, Polynomial, RationalFunction, sort_vars
from .sysfile import SystemModel
from .system import PdeSystem, SystemError_, TdSystem, operators_of
from .verify import Certificate, UnsupportedCandidate, certify_partial_integral

__all__ = ["DarbouxResult", "Component", "darboux_search", "split_operator", "EXHAUSTIVE_DIM"]

#: largest candidate-space dimension decided by the elimination stage
EXHAUSTIVE_DIM = 12
MAX_ROUNDS = 25

System = Union[PdeSystem, TdSystem]


@dataclass
class DarbouxResult:
    """Certified witnesses plus an honest account of what was searched."""

    witnesses: list[Certificate]
    partial: bool
    w_degree: int
    allowed_vars: tuple[str, ...]
    components: int = 0
    branches: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.witnesses)

    def __len__(self):
        return len(self.witnesses)

    @property
    def found(self) -> bool:
        return bool(self.witnesses)


@dataclass
class Component:
    """Operator piece ``sum_v p_v d/dv`` with polynomial coefficients (denominators cleared).

    ``label`` names the basis function (or monomial) it multiplies.
    """

    label: str
    coeffs: dict  # variable name -> PolyElement
    den: object = None  # cleared common denominator (PolyElement)

    def apply(self, w, ring: PolyRing):
        out = ring.zero
        for v, p in self.coeffs.items():
            d = _diff(w, v, ring)
            if d:
                out += p * d
        return out


def _diff(p, v: str, ring: PolyRing):
    i = _index(ring, v)
    return p.diff(ring.gens[i])


def _index(ring: PolyRing, v: str) -> int:
    for i, s in enumerate(ring.symbols):
        if s.name == v:
            return i
    raise KeyError(v)


# ---------------------------------------------------------------------------
# splitting operators into components
# ---------------------------------------------------------------------------


def _split_in(expr, z):
    """``{basis key: coefficient}`` with ``expr = sum key * coefficient`` and coefficients free of ``z``."""
    out: dict = {}
    expr = sympy.together(expr)
    if z not in expr.free_symbols:
        return {sympy.Integer(1): expr}
    for term in sympy.Add.make_args(sympy.apart(expr, z)):
        num, den = sympy.fraction(sympy.together(term))
        dpoly = sympy.Poly(den, z)
        lc = dpoly.LC()
        dz = sympy.expand(dpoly.as_expr() / lc) if dpoly.degree() > 0 else sympy.Integer(1)
        scale = lc if dpoly.degree() > 0 else den
        npoly = sympy.Poly(num, z)
        for (i,), c in zip(npoly.monoms(), npoly.coeffs()):
            key = z**i / dz
            out[key] = out.get(key, 0) + c / scale
    return {k: sympy.cancel(v) for k, v in out.items() if sympy.cancel(v) != 0}


def split_operator(
    coefficients: Mapping[str, Expression],
    absent: Sequence[str],
    basis: Mapping[str, Sequence[Expression]] | None = None,
) -> dict:
    """Expand coefficients over functions of the ``absent`` variables.

    Returns ``{label: {variable: coefficient expression}}`` with coefficients
    free of the absent variables.  ``basis`` optionally declares, per absent
    variable, the functions to expand over (undetermined coefficients);
    otherwise partial fractions are used.
    """
    from .funcsys import t_basis_decompose

    parts: dict = {(): {v: c.as_rational_function().to_sympy() for v, c in coefficients.items() if not c.is_zero()}}
    for z in absent:
        zs = sympy.Symbol(z)
        nxt: dict = {}
        for key, coeffs in parts.items():
            for v, c in coeffs.items():
                if zs not in c.free_symbols:
                    pieces = {sympy.Integer(1): c}
                elif basis and z in basis:
                    e = Expression.from_rf(RationalFunction.from_sympy(c))
                    vals = t_basis_decompose(e, z, basis[z])
                    pieces = {}
                    for b, a in zip(basis[z], vals):
                        if not a.is_zero():
                            pieces[Expression.coerce(b).as_rational_function().to_sympy()] = a.as_rational_function().to_sympy()
                else:
                    pieces = _split_in(c, zs)
                for bk, bc in pieces.items():
                    nk = key + ((z, bk),) if bk != 1 else key
                    nxt.setdefault(nk, {})
                    nxt[nk][v] = nxt[nk].get(v, 0) + bc
        parts = nxt
    out = {}
    for key, coeffs in parts.items():
        label = "*".join(str(b) for _, b in key) or "1"
        clean = {v: sympy.cancel(c) for v, c in coeffs.items() if sympy.cancel(c) != 0}
        if clean:
            out[label] = clean
    return out


def _cleared(coeffs: Mapping[str, object], ring: PolyRing) -> dict:
    """Multiply by the common denominator; keep coefficients of ring variables only."""
    names = {s.name for s in ring.symbols}
    nums, dens = {}, []
    for v, c in coeffs.items():
        if v not in names:
            continue
        n, d = sympy.fraction(sympy.together(c))
        nums[v] = ring.from_expr(sympy.expand(n)) if n != 0 else ring.zero
        dens.append(ring.from_expr(sympy.expand(d)))
    if not nums:
        return {}, ring.one
    lcm = ring.one
    for d in dens:
        lcm = lcm.lcm(d)
    out = {}
    for (v, n), d in zip(nums.items(), dens):
        p = n * lcm.exquo(d)
        if p:
            out[v] = p
    return out, lcm


def _reduced(label: str, coeffs: dict, den) -> "Component":
    """Cancel the common factor of the coefficients and the denominator."""
    g = den
    for p in coeffs.values():
        g = g.gcd(p)
        if g.is_ground:
            break
    if not g.is_ground:
        coeffs = {v: p.exquo(g) for v, p in coeffs.items()}
        den = den.exquo(g)
    return Component(label, coeffs, den)


# ---------------------------------------------------------------------------
# subspaces of polynomials
# ---------------------------------------------------------------------------


class Space:
    """Subspace of ``ring`` with a reduced echelon basis (distinct monic leading monomials)."""

    def __init__(self, ring: PolyRing, polys: Sequence):
        self.ring = ring
        self.basis = _rref(ring, polys)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def support(self) -> set[str]:
        out: set[str] = set()
        for b in self.basis:
            for mono in b.keys():
                for s, e in zip(self.ring.symbols, mono):
                    if e:
                        out.add(s.name)
        return out

    def nonconstant(self) -> list:
        return [b for b in self.basis if not b.is_ground]

    def combos(self, vectors: Sequence[Sequence]) -> "Space":
        polys = []
        for vec in vectors:
            p = self.ring.zero
            for c, b in zip(vec, self.basis):
                if c:
                    p += b * self.ring.domain.convert(c)
            polys.append(p)
        return Space(self.ring, polys)


def _coefficient_matrix(ring: PolyRing, polys: Sequence) -> tuple[DomainMatrix, list]:
    monos = sorted({m for p in polys for m in p.keys()}, key=grlex, reverse=True)
    index = {m: i for i, m in enumerate(monos)}
    rows = {}
    for r, p in enumerate(polys):
        row = {index[m]: c for m, c in p.items() if c}
        if row:
            rows[r] = row
    return _dm(rows, len(polys), len(monos)), monos


def _dm(rows: dict, nrows: int, ncols: int) -> DomainMatrix:
    from sympy.polys.matrices.sdm import SDM

    return DomainMatrix.from_rep(SDM(rows, (nrows, ncols), QQ))


def _rref(ring: PolyRing, polys: Sequence) -> list:
    polys = [p for p in polys if p]
    if not polys:
        return []
    M, monos = _coefficient_matrix(ring, polys)
    R, pivots = M.rref()
    sdm = R.rep.to_sdm()
    out = []
    for r in range(len(pivots)):
        row = sdm.get(r, {})
        out.append(ring.from_dict({monos[c]: v for c, v in row.items()}))
    return out


def _nullspace(columns: Sequence, ring: PolyRing) -> list[list]:
    """Rational vectors ``c`` with ``sum_i c_i columns_i == 0``."""
    n = len(columns)
    if n == 0:
        return []
    monos = sorted({m for p in columns for m in p.keys()}, key=grlex, reverse=True)
    if not monos:
        return [[QQ(1) if i == j else QQ(0) for i in range(n)] for j in range(n)]
    index = {m: i for i, m in enumerate(monos)}
    rows: dict = {}
    for j, p in enumerate(columns):
        for m, c in p.items():
            if c:
                rows.setdefault(index[m], {})[j] = c
    M = _dm(rows, len(monos), n)
    null = M.nullspace()
    sdm = null.rep.to_sdm()
    out = []
    for r in range(null.shape[0]):
        row = sdm.get(r, {})
        out.append([row.get(j, QQ(0)) for j in range(n)])
    return out


def _kernel(space: Space, comp: Component) -> Space:
    images = [comp.apply(b, space.ring) for b in space.basis]
    return space.combos(_nullspace(images, space.ring))


def _invariant_part(space: Space, comp: Component) -> Space:
    """Largest subspace ``U`` of ``space`` with ``comp(U) <= U``."""
    cur = space
    while True:
        if cur.dim == 0:
            return cur
        images = [comp.apply(b, cur.ring) for b in cur.basis]
        cols = images + [-b for b in cur.basis]
        null = _nullspace(cols, cur.ring)
        nxt = cur.combos([v[: cur.dim] for v in null])
        if nxt.dim == cur.dim:
            return cur
        cur = nxt


def _eigenspaces(space: Space, comp: Component) -> list[tuple[Fraction, Space]]:
    """Rational eigenvalues and eigenspaces of ``comp`` on its invariant part of ``space``."""
    U = _invariant_part(space, comp)
    if U.dim == 0:
        return []
    ring = U.ring
    # coordinates of comp(b_i) in the basis of U
    images = [comp.apply(b, ring) for b in U.basis]
    cols = []
    for img in images:
        null = _nullspace([img] + [-b for b in U.basis], ring)
        vec = next(v for v in null if v[0] != 0)
        cols.append([c / vec[0] for c in vec[1:]])
    n = U.dim
    A = DomainMatrix([[cols[j][i] for j in range(n)] for i in range(n)], (n, n), QQ)
    cp = A.charpoly()
    lam = sympy.Symbol("lam")
    poly = sympy.Poly([QQ.to_sympy(c) for c in cp], lam)
    roots = sorted({r for r in sympy.roots(poly, filter="Q").keys()}, key=lambda r: sympy.Rational(r))
    out = []
    for r in roots:
        rq = QQ.from_sympy(r)
        B = A - DomainMatrix.eye(n, QQ) * rq
        null = B.nullspace()
        sdm = null.rep.to_sdm()
        vecs = [[sdm.get(i, {}).get(j, QQ(0)) for j in range(n)] for i in range(null.shape[0])]
        E = U.combos(vecs)
        if E.dim:
            out.append((Fraction(int(r.p), int(r.q)), E))
    return out


# ---------------------------------------------------------------------------
# weight arguments
# ---------------------------------------------------------------------------


def _term_rows(comp: Component, support: set[str], ring: PolyRing):
    names = [s.name for s in ring.symbols]
    rows = []
    for v, p in comp.coeffs.items():
        if v not in support:
            continue
        for mono in p.keys():
            rows.append((mono, names.index(v)))
    return rows


def _check_weights(rows, wts: Sequence[Fraction], strict: bool) -> bool:
    for mono, vi in rows:
        val = sum(Fraction(e) * wts[i] for i, e in enumerate(mono) if e) - wts[vi]
        if strict and val >= 0:
            return False
        if not strict and val > 0:
            return False
    return True


def _weights(comp: Component, support: set[str], ring: PolyRing, strict: bool) -> list[Fraction] | None:
    """Weights proving the kernel (strict) or eigen (nonincreasing) argument, verified exactly."""
    rows = _term_rows(comp, support, ring)
    n = len(ring.symbols)
    if not rows:
        return [Fraction(1)] * n
    names = [s.name for s in ring.symbols]
    # cheap candidates first
    if strict:
        active = {names[vi] for _, vi in rows}
        cand = [Fraction(1) if names[i] in active else Fraction(0) for i in range(n)]
        if _check_weights(rows, cand, True):
            return cand
    else:
        cand = [Fraction(1)] * n
        if _check_weights(rows, cand, False):
            return cand
    from scipy.optimize import linprog

    A, b = [], []
    for mono, vi in rows:
        row = [float(e) for e in mono] + [-1.0]
        row[vi] -= 1.0
        A.append(row)
        b.append(0.0)
    c = [0.0] * n + [1.0]
    bounds = [(0.0, 1.0) if strict else (1.0, 8.0)] * n + [(None, None)]
    res = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    if not res.success:
        return None
    slack = res.x[-1]
    if (strict and slack >= -1e-9) or (not strict and slack > 1e-9):
        return None
    for den in (1, 2, 3, 4, 6, 12, 60, 1000):
        wts = [Fraction(x).limit_denominator(den) for x in res.x[:n]]
        if _check_weights(rows, wts, strict):
            return wts
    return None


# ---------------------------------------------------------------------------
# exact elimination on small spaces
# ---------------------------------------------------------------------------


def _eliminate(space: Space, comps: Sequence[Component]) -> tuple[list, list[str], bool]:
    """All rational ``w`` in ``space`` (nonconstant) with ``w | comp(w)``; exact up to the stated notes.

    Returns ``(polys, notes, complete)``.
    """
    ring = space.ring
    basis = space.basis
    found, notes = [], []
    complete = True
    for i, lead in enumerate(basis):
        if lead.is_ground:
            continue
        rest = basis[i + 1 :]
        if not rest:
            if all(not (c.apply(lead, ring).rem(lead)) for c in comps):
                found.append(lead)
            continue
        syms = sympy.symbols(f"a1:{len(rest) + 1}")
        D = QQ[syms]
        Ra = PolyRing(ring.symbols, D, ring.order)
        conv = lambda p: Ra.from_dict({m: D.convert(c) for m, c in p.items()})  # noqa: E731
        w = conv(lead)
        for a, b in zip(D.gens, rest):
            w += conv(b) * Ra(a)
        eqs = []
        for comp in comps:
            img = Ra.zero
            for v, p in comp.coeffs.items():
                d = w.diff(Ra.gens[_index(Ra, v)])
                if d:
                    img += conv(p) * d
            r = img.rem(w)
            eqs.extend(D.to_sympy(c) for c in r.coeffs())
        eqs = [e for e in eqs if e != 0]
        if not eqs:
            found.append(lead)
            found.extend(b for b in rest if not b.is_ground)
            continue
        G = sympy.groebner(eqs, *syms, order="grevlex", domain="QQ")
        if list(G.exprs) == [1]:
            continue
        sols = sympy.solve(list(G.exprs), syms, dict=True)
        for sol in sols:
            free = [a for a in syms if a not in sol]
            for assign in [dict.fromkeys(free, 0)] + [{**dict.fromkeys(free, 0), f: 1} for f in free]:
                vals = [sympy.nsimplify(sympy.sympify(sol.get(a, a)).subs(assign)) for a in syms]
                if not all(v.is_rational for v in vals):
                    notes.append("skipped a solution with irrational coefficients")
                    continue
                p = lead
                for v, b in zip(vals, rest):
                    if v:
                        p += b * QQ.from_sympy(v)
                if all(not (c.apply(p, ring).rem(p)) for c in comps):
                    found.append(p)
        if not sols:
            notes.append("elimination ideal has no rational solutions")
    return found, notes, complete


def _quotient(a, b):
    if not a:
        return a
    q, _ = a.div([b])
    return q[0]


def _alternate(space: Space, comps: Sequence[Component], rng: random.Random) -> list:
    """Alternating linear solves: fix cofactors, solve for w, recompute cofactors."""
    ring = space.ring
    found = []
    starts = [[ring.zero for _ in comps]]
    for g in ring.gens:
        starts.append([_quotient(c.apply(g, ring), g) for c in comps])
    for lam in starts:
        cur = space
        for _ in range(MAX_ROUNDS):
            W = cur
            for c, L in zip(comps, lam):
                images = [c.apply(b, ring) - L * b for b in W.basis]
                W = W.combos(_nullspace(images, ring))
                if W.dim == 0:
                    break
            cands = W.nonconstant()
            if cands:
                found.extend(cands)
                break
            # re-seed the cofactors from a random element of the current space
            if cur.nonconstant() == []:
                break
            w = ring.zero
            for b in cur.basis:
                w += b * QQ(rng.randint(-3, 3))
            if not w or w.is_ground:
                break
            lam = [_quotient(c.apply(w, ring), w) for c in comps]
    return found


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def _monomials(ring: PolyRing, degree: int) -> list:
    out = [ring.one]
    for d in range(1, degree + 1):
        for combo in combinations_with_replacement(ring.gens, d):
            p = ring.one
            for g in combo:
                p *= g
            out.append(p)
    return out


def _split_by_absent(comp: Component, support: set[str], ring: PolyRing) -> list[Component] | None:
    """Split by monomials in ring variables missing from the candidate space."""
    names = [s.name for s in ring.symbols]
    active = {v: p for v, p in comp.coeffs.items() if v in support}
    absent = [i for i, n in enumerate(names) if n not in support]
    used = {i for p in active.values() for m in p.keys() for i, e in enumerate(m) if e and i in absent}
    if not used:
        return None
    pieces: dict = {}
    for v, p in active.items():
        for m, c in p.items():
            key = tuple(m[i] if i in used else 0 for i in range(len(names)))
            rest = tuple(0 if i in used else e for i, e in enumerate(m))
            pieces.setdefault(key, {}).setdefault(v, ring.zero)
            pieces[key][v] += ring.from_dict({rest: c})
    out = []
    for key, coeffs in sorted(pieces.items(), key=lambda kv: grlex(kv[0])):
        label = comp.label + "|" + "*".join(f"{names[i]}^{e}" for i, e in enumerate(key) if e)
        out.append(_reduced(label, {v: p for v, p in coeffs.items() if p}, comp.den))
    return out


def _linear_stages(space: Space, pending: list[Component], ring: PolyRing):
    """Kernel stages and splits to a fixed point, then at most one eigen split.

    Returns ``(space, unresolved components, eigen)`` where ``eigen`` is
    ``None`` or ``(label, [(eigenvalue, eigenspace)], remaining components)``.
    """
    changed = True
    while changed:
        changed = False
        if not space.nonconstant():
            return space, [], None
        nxt = []
        for comp in pending:
            support = space.support()
            if not any(v in support for v in comp.coeffs):
                continue
            pieces = _split_by_absent(comp, support, ring)
            if pieces is not None:
                nxt.extend(pieces)
                changed = True
                continue
            if _weights(comp, support, ring, strict=True) is not None:
                new = _kernel(space, comp)
                changed = changed or new.dim != space.dim
                space = new
                continue
            nxt.append(comp)
        pending = nxt
    support = space.support()
    for idx, comp in enumerate(pending):
        if _weights(comp, support, ring, strict=False) is not None:
            rest = pending[:idx] + pending[idx + 1 :]
            return space, pending, (comp.label, _eigenspaces(space, comp), rest)
    return space, pending, None


def darboux_search(
    S: Union[System, SystemModel],
    w_degree: int = 2,
    cofactor_degree: int | None = None,
    allowed_vars: Sequence[str] | None = None,
    t_basis: Union[Sequence, Mapping[str, Sequence], None] = None,
    seed: int = 0,
) -> DarbouxResult:
    """Polynomial partial integrals of degree ``<= w_degree`` in ``allowed_vars``.

    ``allowed_vars`` defaults to the dependent variables (autonomous search).
    ``t_basis`` declares the functions of the independent variable used to
    split the operators (a sequence applies to the first independent
    variable); partial fractions are used otherwise.  ``cofactor_degree``
    optionally rejects witnesses whose cofactors are polynomials of higher
    degree.  Every witness is certified by cofactor division on the full
    system; completeness is claimed only for branches the elimination stage
    closed, and ``partial`` reports whether any branch fell back to the
    heuristic.
    """
    if isinstance(S, SystemModel):
        S = S.system
    if w_degree < 1:
        raise ValueError("wDegree must be at least 1")
    allowed = sort_vars(S.space.dependent if allowed_vars is None else allowed_vars)
    unknown = [v for v in allowed if v not in S.space.all]
    if unknown:
        raise SystemError_(f"unknown variables: {', '.join(unknown)}")
    if t_basis is not None and not isinstance(t_basis, Mapping):
        if not S.space.independent:
            raise SystemError_("a t-basis needs an independent variable")
        t_basis = {S.space.independent[0]: list(t_basis)}
    rng = random.Random(seed)
    ring = PolyRing([sympy.Symbol(v) for v in allowed], QQ, grlex)
    absent = [v for v in S.space.all if v not in allowed]
    notes: list[str] = []
    comps: list[Component] = []
    for j, L in enumerate(operators_of(S)):
        coeffs = {v: L.coefficient(v) for v in S.space.all}
        bad = [v for v, c in coeffs.items() if v in allowed and not c.is_rational()]
        if bad:
            raise UnsupportedCandidate("unsupported system: non-rational coefficients")
        for label, parts in split_operator(coeffs, absent, t_basis).items():
            cl, den = _cleared(parts, ring)
            if cl:
                comps.append(_reduced(f"op{j + 1}[{label}]", cl, den))
    start = Space(ring, _monomials(ring, w_degree))
    result = DarbouxResult([], False, w_degree, allowed, len(comps), [], notes)
    work = [(start, list(comps))]
    raw: list = []
    while work:
        space, pending = work.pop()
        info = {"dimension": space.dim}
        space, pending, eig = _linear_stages(space, pending, ring)
        if eig is not None:
            label, branches, rest = eig
            for _lam, E in branches:
                work.append((E, list(rest)))
            info["resolution"] = f"eigen split on {label} into {len(branches)} branch(es)"
            result.branches.append(info)
            continue
        info["dimension"] = space.dim
        if not space.nonconstant():
            info["resolution"] = "constants only"
        elif not pending:
            info["resolution"] = "linear stages"
            raw.extend(space.nonconstant())
        elif space.dim <= EXHAUSTIVE_DIM:
            polys, enotes, _ = _eliminate(space, pending)
            notes.extend(enotes)
            info["resolution"] = f"elimination over {len(pending)} component(s)"
            raw.extend(polys)
        else:
            info["resolution"] = f"heuristic over {len(pending)} component(s)"
            info["pending"] = [c.label for c in pending]
            info["support"] = sorted(space.support())
            result.partial = True
            raw.extend(_alternate(space, pending, rng))
        result.branches.append(info)
    result.witnesses = _certify(S, raw, cofactor_degree, notes)
    if result.partial:
        notes.append("some candidate spaces were too large for exact elimination: search is partial")
    return result


def _to_expression(p, ring: PolyRing) -> Expression:
    names = [s.name for s in ring.symbols]
    terms = {}
    for mono, c in p.items():
        key = tuple((names[i], e) for i, e in enumerate(mono) if e)
        terms[key] = Fraction(int(QQ.numer(c)), int(QQ.denom(c)))
    return Expression.from_poly(Polynomial.from_terms(terms))


def _certify(S: System, raw: Sequence, cofactor_degree: int | None, notes: list[str]) -> list[Certificate]:
    certs: list[Certificate] = []
    seen: set = set()
    ring = raw[0].ring if raw else None
    for p in raw:
        e = _to_expression(p, ring)
        P = e.as_polynomial()
        _, prim = P.primitive()
        if prim.leading_coefficient() < 0:
            prim = -prim
        if prim in seen:
            continue
        seen.add(prim)
        cert = certify_partial_integral(S, Expression.from_poly(prim))
        if not cert.verdict:
            notes.append(f"candidate {prim.render()} failed certification on the full system")
            continue
        if cofactor_degree is not None and any(
            c.is_polynomial() and c.as_polynomial().total_degree() > cofactor_degree for c in cert.cofactors
        ):
            continue
        certs.append(cert)
    certs.sort(key=lambda c: (c.manifold.as_polynomial().total_degree(), c.manifold.render()))
    # drop reducible witnesses whose factors are all witnesses already
    keys = {c.manifold.as_polynomial().primitive()[1] for c in certs}
    out = []
    for c in certs:
        P = c.manifold.as_polynomial()
        _, factors = P.factor_list()
        if len(factors) > 1 or (factors and factors[0][1] > 1):
            prims = []
            for f, _m in factors:
                fp = f.primitive()[1]
                prims.append(fp if fp.leading_coefficient() > 0 else -fp)
            if all(f in keys for f in prims):
                continue
        out.append(c)
    return out
