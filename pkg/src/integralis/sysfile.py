"""System description files (TOML) and the bundled fixture corpus.

Layout::

    [metadata]   name, tag
    [variables]  independent = [...], dependent = [...]
    [system]     kind = "pde" | "td"
    [op.N]       (pde) one table per operator: variable = "coefficient"
    [matrix]     (td)  rows = [[...], ...]  row-major, n rows by m columns
    [parameters] optional rational constants, substituted at load time
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Union

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

import tomli_w

from .expr import Expression, ExprError, parse
from .system import LinearOperator, PdeSystem, SystemError_, TdSystem, VariableSpace

__all__ = ["SystemModel", "SystemFileError", "load", "loads", "dumps", "fixture_path", "load_fixture", "FIXTURES"]

FIXTURES = (
    "ex1_8",
    "ex1_14",
    "ex1_23",
    "ex2_8",
    "ex3_10",
    "ex3_13",
    "ex3_23",
    "ex3_25",
    "ps",
    "ps_case2",
)


class SystemFileError(ValueError):
    pass


@dataclass
class SystemModel:
    system: Union[PdeSystem, TdSystem]
    name: str = ""
    tag: str = ""
    parameters: dict[str, Fraction] = field(default_factory=dict)
    # expression strings as written in the file (before parameter substitution)
    source: dict = field(default_factory=dict)

    @property
    def kind(self) -> str:
        return "pde" if isinstance(self.system, PdeSystem) else "td"

    def same_system(self, other: "SystemModel") -> bool:
        a, b = self.system, other.system
        if type(a) is not type(b) or a.space != b.space:
            return False
        if isinstance(a, PdeSystem):
            return len(a.operators) == len(b.operators) and all(x == y for x, y in zip(a.operators, b.operators))
        return a.X == b.X


def _parse_rational(text: str, where: str) -> Fraction:
    try:
        e = parse(str(text))
    except ExprError as exc:
        raise SystemFileError(f"{where}: {exc}") from exc
    if not e.is_constant():
        raise SystemFileError(f"{where}: parameter must be a rational constant")
    return e.constant_value()


def _expr(text, where: str, symbols, params: dict[str, Fraction]) -> Expression:
    if not isinstance(text, str):
        text = str(text)
    try:
        e = parse(text, symbols)
    except ExprError as exc:
        raise SystemFileError(f"{where}: {exc}") from exc
    if params:
        used = {p: Expression.const(v) for p, v in params.items() if p in e.free_symbols}
        if used:
            e = e.substitute(used)
    return e


def loads(text: str, *, substitute_parameters: bool = True, origin: str = "<string>") -> SystemModel:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SystemFileError(f"{origin}: {exc}") from exc
    meta = doc.get("metadata", {})
    var = doc.get("variables")
    if var is None:
        raise SystemFileError(f"{origin}: missing [variables] table")
    indep = tuple(var.get("independent", []))
    dep = tuple(var.get("dependent", []))
    if not dep:
        raise SystemFileError(f"{origin}: no dependent variables declared")
    kind = doc.get("system", {}).get("kind")
    if kind not in ("pde", "td"):
        raise SystemFileError(f"{origin}: [system] kind must be 'pde' or 'td'")
    raw_params = doc.get("parameters", {})
    params = {k: _parse_rational(v, f"{origin}: parameter {k}") for k, v in raw_params.items()}
    overlap = set(params) & set(indep + dep)
    if overlap:
        raise SystemFileError(f"{origin}: parameter names clash with variables: {sorted(overlap)}")
    symbols = set(indep) | set(dep) | set(params)
    use = params if substitute_parameters else {}
    try:
        space = VariableSpace(indep, dep)
    except SystemError_ as exc:
        raise SystemFileError(f"{origin}: {exc}") from exc
    source: dict = {}
    if kind == "pde":
        if indep:
            raise SystemFileError(f"{origin}: a pde system declares no independent variables")
        ops_tab = doc.get("op")
        if not ops_tab:
            raise SystemFileError(f"{origin}: pde system needs [op.N] tables")
        keys = sorted(ops_tab, key=lambda k: int(k))
        ops = []
        for k in keys:
            coeffs = {}
            for v, text in ops_tab[k].items():
                if v not in dep:
                    raise SystemFileError(f"{origin}: [op.{k}] refers to unknown variable {v!r}")
                e = _expr(text, f"{origin}: [op.{k}].{v}", symbols, use)
                if not e.is_zero():
                    coeffs[v] = e
            ops.append(LinearOperator(space, coeffs))
            source[f"op.{k}"] = dict(ops_tab[k])
        try:
            system = PdeSystem(space, tuple(ops), meta.get("name", ""))
        except SystemError_ as exc:
            raise SystemFileError(f"{origin}: {exc}") from exc
    else:
        rows = doc.get("matrix", {}).get("rows")
        if rows is None:
            raise SystemFileError(f"{origin}: td system needs [matrix] rows")
        if len(rows) != len(dep):
            raise SystemFileError(
                f"{origin}: dimension mismatch: matrix has {len(rows)} rows, expected n = {len(dep)}"
            )
        X = []
        for i, row in enumerate(rows):
            if len(row) != len(indep):
                raise SystemFileError(
                    f"{origin}: dimension mismatch in matrix row {i + 1}: "
                    f"{len(row)} entries, expected m = {len(indep)}"
                )
            X.append(tuple(_expr(t, f"{origin}: matrix[{i + 1}][{j + 1}]", symbols, use) for j, t in enumerate(row)))
        source["rows"] = [list(r) for r in rows]
        try:
            system = TdSystem(space, tuple(X), meta.get("name", ""))
        except SystemError_ as exc:
            raise SystemFileError(f"{origin}: {exc}") from exc
    return SystemModel(system, meta.get("name", ""), meta.get("tag", ""), params, source)


def load(path: Union[str, Path], *, substitute_parameters: bool = True) -> SystemModel:
    p = Path(path)
    if not p.exists():
        # allow bare fixture names
        if str(path) in FIXTURES:
            p = fixture_path(str(path))
        else:
            raise SystemFileError(f"{path}: no such file")
    return loads(p.read_text(encoding="utf-8"), substitute_parameters=substitute_parameters, origin=str(path))


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("integralis") / "fixtures" / f"{name}.toml"))


def load_fixture(name: str, *, substitute_parameters: bool = True) -> SystemModel:
    return load(fixture_path(name), substitute_parameters=substitute_parameters)


def dumps(model: SystemModel) -> str:
    """Render a model back to the file format (expressions in canonical form)."""
    S = model.system
    doc: dict = {"metadata": {"name": model.name, "tag": model.tag}}
    doc["variables"] = {"independent": list(S.space.independent), "dependent": list(S.space.dependent)}
    doc["system"] = {"kind": model.kind}
    if model.parameters:
        doc["parameters"] = {k: _frac_str(v) for k, v in model.parameters.items()}
    if isinstance(S, PdeSystem):
        doc["op"] = {
            str(j + 1): {v: L.coefficient(v).render() for v in S.space.dependent if not L.coefficient(v).is_zero()}
            for j, L in enumerate(S.operators)
        }
    else:
        doc["matrix"] = {"rows": [[e.render() for e in row] for row in S.X]}
    return tomli_w.dumps(doc)


def _frac_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
