"""End-to-end searches for first integrals, last multipliers and partial integrals.

Every pipeline runs the same stages -- Wronskian necessary test, functional
system, Pfaffian integration, exact certification -- and reports the stage it
stopped at.  No witness leaves a pipeline without a passing certificate.

The Darboux search and the Painleve identity checks live in
:mod:`integralis.darboux` and are re-exported here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .expr import Expression
from .funcsys import (
    build_fi_pde,
    build_fi_td,
    build_lm_pde,
    build_lm_td,
    build_pi,
    restrict,
    solve,
)
from .pfaffian import PfaffForm, UnsupportedAntiderivative, exp_of_integral, general_integral
from .sysfile import SystemModel
from .system import PdeSystem, SystemError_, TdSystem, parallel_map
from .verify import (
    Certificate,
    UnsupportedCandidate,
    certify_first_integral,
    certify_last_multiplier,
    certify_partial_integral,
    functional_independence,
)
from .wronskian import (
    necessary_fi_pde,
    necessary_fi_td,
    necessary_lm_pde,
    necessary_lm_td,
    pi_residuals,
)

__all__ = [
    "SearchRequest",
    "SearchOutcome",
    "STAGES",
    "find",
    "find_first_integrals",
    "find_last_multipliers",
    "find_partial_integrals",
    "darboux_search",
    "DarbouxResult",
    "painleve_identities_check",
]

System = Union[PdeSystem, TdSystem]

#: pipeline stages, from earliest failure to success
STAGES = ("wronskian-failed", "funcsys-empty", "pfaffian-failed", "verified")
SCAN = "scan"


@dataclass
class SearchRequest:
    """What to look for.

    ``s`` and ``k`` are integers or ``"scan"`` (``None`` also means scan).
    ``degree_bound`` is the polynomial degree of the combiners tried when the
    plain restricted solution set is empty; ``multiplier_bound`` bounds the
    degree of ``g`` in ``exp(g)`` integrating multipliers.
    """

    system: Union[System, SystemModel]
    target: str  # "fi" | "lm" | "pi"
    s: Union[int, str, None] = 0
    k: Union[int, str, None] = SCAN
    degree_bound: int = 1
    multiplier_bound: int = 2

    def __post_init__(self):
        if isinstance(self.system, SystemModel):
            self.system = self.system.system
        self.target = self.target.lower()
        if self.target not in ("fi", "lm", "pi"):
            raise ValueError(f"unknown target {self.target!r}; expected fi, lm or pi")
        S = self.system
        if self.s is None:
            self.s = SCAN
        if self.k is None:
            self.k = SCAN
        if isinstance(S, PdeSystem) and self.s == SCAN:
            self.s = 0
        if isinstance(self.s, int) and not (0 <= self.s <= S.m):
            raise SystemError_(f"s must satisfy 0 <= s <= m = {S.m}")
        if isinstance(self.k, int) and not (0 <= self.k <= S.n):
            raise SystemError_(f"k must satisfy 0 <= k <= n = {S.n}")
        if self.degree_bound < 0 or self.multiplier_bound < 0:
            raise ValueError("degree bounds must be nonnegative")

    @property
    def scanning(self) -> bool:
        return self.s == SCAN or self.k == SCAN


@dataclass
class SearchOutcome:
    witnesses: list[Certificate]
    stage: str
    diagnostics: dict = field(default_factory=dict)
    independence_rank: int = 0
    cells: list[tuple[int, int, str]] = field(default_factory=list)

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        if self.independence_rank > len(self.witnesses):
            raise ValueError("independence rank exceeds the number of witnesses")
        if any(not w.verdict for w in self.witnesses):
            raise RuntimeError("a witness without a passing certificate reached a search outcome")


# ---------------------------------------------------------------------------
# single cells
# ---------------------------------------------------------------------------


def _residual_strings(verdict) -> list[dict]:
    return [{"set": j + 1, "variable": v, "wronskian": w.render()} for j, v, w in verdict.failing]


def _fi_cell(S: System, s: int, k: int, req: SearchRequest) -> SearchOutcome:
    diag: dict = {"s": s, "k": k}
    if isinstance(S, PdeSystem):
        verdict = necessary_fi_pde(S, k)
    else:
        verdict = necessary_fi_td(S, s, k)
    if not verdict.passed:
        diag["wronskian"] = _residual_strings(verdict)
        return SearchOutcome([], "wronskian-failed", diag)
    F = build_fi_pde(S, k) if isinstance(S, PdeSystem) else build_fi_td(S, s, k)
    sol = solve(F)
    fam = restrict(sol)
    vectors = list(fam.nullspace_basis)
    if not vectors:
        for d in range(1, req.degree_bound + 1):
            vectors = list(restrict(sol, combiner_degree=d, require_closed=True).nullspace_basis)
            if vectors:
                diag["combiner_degree"] = d
                break
    diag["funcsys"] = {"equations": len(F.equations), "unknowns": F.ncols, "restricted": len(vectors)}
    if not vectors:
        return SearchOutcome([], "funcsys-empty", diag)
    witnesses: list[Certificate] = []
    notes: list[str] = []
    for vec in vectors:
        form = PfaffForm(F.form_vars, vec[: F.nform])
        res = general_integral(form, req.multiplier_bound, notes)
        if res is None:
            continue
        cert = certify_first_integral(S, res.potential)
        if cert.verdict:
            cert.notes.append(f"integrating multiplier {res.multiplier.render()} ({res.kind})")
            witnesses.append(cert)
        else:
            notes.append(f"candidate {res.potential.render()} failed certification")
    diag["pfaffian"] = notes
    if not witnesses:
        return SearchOutcome([], "pfaffian-failed", diag)
    witnesses, rank = _independent_subset(witnesses)
    return SearchOutcome(witnesses, "verified", diag, rank)


def _lm_cell(S: System, s: int, k: int, req: SearchRequest) -> SearchOutcome:
    diag: dict = {"s": s, "k": k}
    if isinstance(S, PdeSystem):
        verdict = necessary_lm_pde(S, k)
    else:
        verdict = necessary_lm_td(S, s, k)
    if not verdict.passed:
        diag["wronskian"] = _residual_strings(verdict)
        return SearchOutcome([], "wronskian-failed", diag)
    F = build_lm_pde(S, k) if isinstance(S, PdeSystem) else build_lm_td(S, s, k)
    sol = solve(F)
    diag["funcsys"] = {"equations": len(F.equations), "unknowns": F.ncols, "consistent": sol.consistent}
    if not sol.consistent:
        return SearchOutcome([], "funcsys-empty", diag)
    fam = restrict(sol, require_closed=True)
    if fam.particular is None:
        return SearchOutcome([], "funcsys-empty", diag)
    form = PfaffForm(F.form_vars, fam.particular[: F.nform])
    try:
        mu = exp_of_integral(form)
    except (UnsupportedAntiderivative, ValueError) as exc:
        diag["pfaffian"] = [str(exc)]
        return SearchOutcome([], "pfaffian-failed", diag)
    cert = certify_last_multiplier(S, mu)
    if not cert.verdict:
        diag["pfaffian"] = [f"candidate {mu.render()} failed certification"]
        return SearchOutcome([], "pfaffian-failed", diag)
    cert.notes.append(f"exp of the integral of {form.render()}")
    return SearchOutcome([cert], "verified", diag, 1)


def _pi_cell(S: System, s: int, k: int, req: SearchRequest) -> SearchOutcome:
    diag: dict = {"s": s, "k": k}
    verdict = pi_residuals(S, s, k)
    diag["wronskian"] = [
        {"set": j + 1, "variable": v, "residual": w.render(), "identically_zero": z}
        for (j, v, w), z in zip(verdict.residuals, verdict.identically_zero)
    ]
    if k == 0 and s == 0:
        return SearchOutcome([], "funcsys-empty", diag)
    F = build_pi(S, s, k)
    sol = solve(F)
    fam = restrict(sol, polynomial_form=True)
    vectors = list(fam.nullspace_basis)
    if not vectors:
        vectors = list(restrict(sol).nullspace_basis)
    diag["funcsys"] = {"equations": len(F.equations), "unknowns": F.ncols, "restricted": len(vectors)}
    vectors = [v for v in vectors if not all(e.is_zero() for e in v[: F.nform])]
    if not vectors:
        return SearchOutcome([], "funcsys-empty", diag)
    notes: list[str] = []
    found: list[Certificate] = []
    seen: set = set()
    for vec in vectors:
        form = PfaffForm(F.form_vars, vec[: F.nform])
        res = general_integral(form, req.multiplier_bound, notes)
        if res is None:
            continue
        cert = _try_partial(S, res.potential, notes)
        if cert is None:
            continue
        # the reduced manifold polynomial is the simplest representative
        red = _try_partial(S, Expression.from_poly(_manifold_key(cert)), [])
        if red is not None:
            cert = red
        key = _manifold_key(cert)
        if key not in seen:
            seen.add(key)
            found.append(cert)
    found.extend(_family_sums(S, found, seen, notes))
    diag["pfaffian"] = notes
    if not found:
        return SearchOutcome([], "pfaffian-failed", diag)
    rank = _manifold_rank(found)
    return SearchOutcome(found, "verified", diag, rank)


def _try_partial(S: System, w: Expression, notes: list[str]) -> Certificate | None:
    try:
        cert = certify_partial_integral(S, w)
    except UnsupportedCandidate as exc:
        notes.append(str(exc))
        return None
    if not cert.verdict:
        notes.append(f"candidate {w.render()} failed certification")
        return None
    return cert


def _manifold_key(cert: Certificate):
    """Squarefree primitive polynomial with the certified zero set."""
    P = cert.manifold.as_polynomial()
    _, factors = P.factor_list()
    red = None
    for f, _mult in factors:
        red = f if red is None else red * f
    _, prim = red.primitive()
    if prim.leading_coefficient() < 0:
        prim = -prim
    return prim


def _family_sums(S: System, found: list[Certificate], seen: set, notes: list[str]) -> list[Certificate]:
    """Manifolds sharing all cofactors form a linear family; report the sum too."""
    groups: dict = {}
    for c in found:
        key = tuple(e.render() for e in c.cofactors)
        groups.setdefault(key, []).append(c)
    out = []
    for members in groups.values():
        if len(members) < 2:
            continue
        total = Expression()
        for c in members:
            total = total + c.manifold
        if total.is_zero() or total.is_constant():
            continue
        cert = _try_partial(S, total, notes)
        if cert is not None and _manifold_key(cert) not in seen:
            seen.add(_manifold_key(cert))
            out.append(cert)
    return out


def _manifold_rank(certs: list[Certificate]) -> int:
    rank, _ = functional_independence([c.manifold for c in certs])
    return rank


def _independent_subset(certs: list[Certificate]) -> tuple[list[Certificate], int]:
    """Greedy functionally independent subset, in order."""
    kept: list[Certificate] = []
    for c in certs:
        rank, _ = functional_independence([k.candidate for k in kept] + [c.candidate])
        if rank == len(kept) + 1:
            kept.append(c)
    return kept, len(kept)


# ---------------------------------------------------------------------------
# requests and scans
# ---------------------------------------------------------------------------

_CELL = {"fi": _fi_cell, "lm": _lm_cell, "pi": _pi_cell}


def _cells(req: SearchRequest) -> list[tuple[int, int]]:
    S = req.system
    ks = range(S.n + 1) if req.k == SCAN else [req.k]
    ss = range(S.m + 1) if req.s == SCAN else [req.s]
    if isinstance(S, PdeSystem):
        ss = [0]
    return [(s, k) for k in ks for s in ss if (s, k) != (0, 0) or not req.scanning]


def find(req: SearchRequest) -> SearchOutcome:
    """Run the pipeline for a fixed cell or scan every cell (k ascending, then s)."""
    S = req.system
    cell = _CELL[req.target]
    if not req.scanning:
        out = cell(S, req.s, req.k, req)
        out.cells = [(req.s, req.k, out.stage)]
        return out
    cells = _cells(req)
    results = parallel_map(lambda sk: cell(S, sk[0], sk[1], req), cells)
    best = "wronskian-failed"
    witnesses: list[Certificate] = []
    seen: set = set()
    for (s, k), res in zip(cells, results):
        if STAGES.index(res.stage) > STAGES.index(best):
            best = res.stage
        for w in res.witnesses:
            key = _manifold_key(w) if req.target == "pi" else w.candidate.render()
            if key in seen:
                continue
            seen.add(key)
            witnesses.append(w)
    diag = {"cells": {f"s={s},k={k}": res.diagnostics for (s, k), res in zip(cells, results)}}
    if req.target == "fi":
        witnesses, rank = _independent_subset(witnesses)
    elif req.target == "pi":
        rank = _manifold_rank(witnesses) if witnesses else 0
    else:
        rank = 1 if witnesses else 0
        witnesses = witnesses[:1]
    return SearchOutcome(
        witnesses, best, diag, rank, [(s, k, res.stage) for (s, k), res in zip(cells, results)]
    )


def find_first_integrals(req: SearchRequest) -> SearchOutcome:
    if req.target != "fi":
        raise ValueError("find_first_integrals needs target fi")
    return find(req)


def find_last_multipliers(req: SearchRequest) -> SearchOutcome:
    if req.target != "lm":
        raise ValueError("find_last_multipliers needs target lm")
    return find(req)


def find_partial_integrals(req: SearchRequest) -> SearchOutcome:
    if req.target != "pi":
        raise ValueError("find_partial_integrals needs target pi")
    return find(req)


from .darboux import DarbouxResult, darboux_search  # noqa: E402
from .painleve import painleve_identities_check  # noqa: E402
