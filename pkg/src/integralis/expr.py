"""Exact symbolic kernel.

Three layers live here:

* :class:`Polynomial` -- multivariate polynomials over the rationals, backed by
  sympy's sparse polynomial rings (graded-lex order, variables ordered
  naturally so that ``x2 < x10``).
* :class:`RationalFunction` -- reduced quotients with a canonical denominator
  (integer-primitive, positive leading coefficient), so structural equality is
  a valid zero test.
* :class:`Expression` -- finite sums of ``coef * prod(base**e) * exp(g)`` with a
  rational-function coefficient, radical factors with non-integer rational
  exponents over irreducible bases, and a polynomial exponent ``g``.  This class
  is closed under differentiation and holds every closed-form object the
  engine produces (e.g. ``x1*exp(-t1-3*t2)`` or ``x1^(-1/2)``).

All values are immutable.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

import mpmath
import sympy
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

__all__ = [
    "ExprError",
    "ExprSyntaxError",
    "UnknownSymbolError",
    "UnsupportedQuotient",
    "UnsupportedOperation",
    "EvaluationSingularity",
    "Polynomial",
    "RationalFunction",
    "Expression",
    "var_key",
    "sort_vars",
    "parse",
    "render",
    "differentiate",
    "add",
    "mul",
    "div",
    "negate",
    "is_zero",
    "evaluate",
    "substitute",
    "EVAL_DPS",
]

#: decimal digits used when an expression has radical or exponential factors
EVAL_DPS = 50

Number = Union[int, Fraction]


class ExprError(ValueError):
    """Base class for errors raised by the expression kernel."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownSymbolError(ExprSyntaxError):
    pass


class UnsupportedQuotient(ExprError):
    pass


class UnsupportedOperation(ExprError):
    pass


class EvaluationSingularity(ExprError):
    pass


# ---------------------------------------------------------------------------
# variable ordering and rings
# ---------------------------------------------------------------------------

_KEY_RE = re.compile(r"^(.*?)(\d*)$")


def var_key(name: str):
    """Natural sort key: ``t1 < t2 < t10 < x1 < y1``."""
    m = _KEY_RE.match(name)
    stem, digits = m.group(1), m.group(2)
    return (stem, int(digits) if digits else -1, name)


def sort_vars(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=var_key))


@lru_cache(maxsize=None)
def _ring(gens: tuple[str, ...]) -> PolyRing:
    return PolyRing(gens, QQ, grlex)


def _q(value) -> "QQ.dtype":
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


def _frac(value) -> Fraction:
    """Convert a ground-domain rational (gmpy2 mpq or PythonMPQ) to Fraction."""
    return Fraction(int(value.numerator), int(value.denominator))


def _as_fraction(value: Number) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected int or Fraction, got {type(value).__name__}")


# ---------------------------------------------------------------------------
# Polynomial
# ---------------------------------------------------------------------------


class Polynomial:
    """Multivariate polynomial over Q.

    The underlying ring always carries exactly the variables that occur, so two
    equal polynomials have identical term maps.
    """

    __slots__ = ("_p", "_hash")

    def __init__(self, elem):
        self._p = elem
        self._hash = None

    # -- constructors -----------------------------------------------------
    @staticmethod
    def _wrap(elem) -> "Polynomial":
        degs = elem.degrees() if elem.ring.ngens else ()
        gens = elem.ring.symbols
        if any(d <= 0 for d in degs):
            used = tuple(str(g) for g, d in zip(gens, degs) if d > 0)
            elem = elem.set_ring(_ring(used))
        return Polynomial(elem)

    @classmethod
    def const(cls, value: Number) -> "Polynomial":
        return Polynomial(_ring(())(_q(_as_fraction(value))))

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return Polynomial(_ring((name,)).gens[0])

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[tuple[str, int], ...], Number]) -> "Polynomial":
        """Build from ``{((var, exp), ...): coefficient}``."""
        names = sort_vars(v for mono in terms for v, _ in mono)
        R = _ring(names)
        index = {n: i for i, n in enumerate(names)}
        data = {}
        for mono, c in terms.items():
            if c == 0:
                continue
            e = [0] * len(names)
            for v, k in mono:
                e[index[v]] += k
            e = tuple(e)
            data[e] = data.get(e, QQ(0)) + _q(_as_fraction(c))
        elem = R.from_dict({k: v for k, v in data.items() if v}) if data else R.zero
        return Polynomial._wrap(elem)

    # -- basic queries ----------------------------------------------------
    @property
    def gens(self) -> tuple[str, ...]:
        return tuple(str(s) for s in self._p.ring.symbols)

    @property
    def free_symbols(self) -> frozenset[str]:
        return frozenset(self.gens)

    def is_zero(self) -> bool:
        return not self._p

    def is_one(self) -> bool:
        return self._p == 1

    def is_constant(self) -> bool:
        return self._p.ring.ngens == 0 or self._p.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return _frac(self._p.LC) if self._p else Fraction(0)

    def total_degree(self) -> int:
        if not self._p:
            return -1
        return max(sum(m) for m in self._p.monoms())

    def degree_in(self, v: str) -> int:
        if v not in self.gens:
            return 0 if self._p else -1
        return self._p.degree(self.gens.index(v))

    def nterms(self) -> int:
        return len(self._p)

    def terms(self) -> list[tuple[dict[str, int], Fraction]]:
        """Terms in descending graded-lex order as ``({var: exp}, coeff)``."""
        gens = self.gens
        out = []
        for mono, c in self._p.terms():
            out.append(({g: k for g, k in zip(gens, mono) if k}, _frac(c)))
        return out

    def monomial_coefficients(self) -> dict[tuple[tuple[str, int], ...], Fraction]:
        gens = self.gens
        return {
            tuple((g, k) for g, k in zip(gens, mono) if k): _frac(c)
            for mono, c in self._p.terms()
        }

    def leading_coefficient(self) -> Fraction:
        return _frac(self._p.LC) if self._p else Fraction(0)

    def coefficients(self) -> list[Fraction]:
        return [_frac(c) for c in self._p.coeffs()]

    # -- arithmetic ---------------------------------------------------------
    @staticmethod
    def _unify(a: "Polynomial", b: "Polynomial"):
        ra, rb = a._p.ring, b._p.ring
        if ra is rb:
            return a._p, b._p
        gens = sort_vars(a.gens + b.gens)
        R = _ring(gens)
        pa = a._p if ra is R else a._p.set_ring(R)
        pb = b._p if rb is R else b._p.set_ring(R)
        return pa, pb

    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(other)
        return NotImplemented

    def __add__(self, other):
        other = Polynomial._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = Polynomial._unify(self, other)
        return Polynomial._wrap(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        other = Polynomial._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = Polynomial._unify(self, other)
        return Polynomial._wrap(a - b)

    def __rsub__(self, other):
        other = Polynomial._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = Polynomial._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = Polynomial._unify(self, other)
        return Polynomial._wrap(a * b)

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(-self._p)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        return Polynomial(self._p**k) if k else Polynomial.const(1)

    def scale(self, c: Number) -> "Polynomial":
        c = _as_fraction(c)
        if c == 0:
            return Polynomial.const(0)
        return Polynomial(self._p * _q(c))

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        a, b = Polynomial._unify(self, other)
        if b == 0:
            raise ZeroDivisionError("polynomial division by zero")
        if a == 0:
            return _ZERO, _ZERO
        q, r = a.div(b)
        return Polynomial._wrap(q), Polynomial._wrap(r)

    def exquo(self, other: "Polynomial") -> "Polynomial":
        """Exact quotient; raises ``ArithmeticError`` if ``other`` does not divide."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def divides(self, other: "Polynomial") -> bool:
        """True iff ``self`` divides ``other``."""
        if self.is_zero():
            return other.is_zero()
        _, r = other.divmod(self)
        return r.is_zero()

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = Polynomial._unify(self, other)
        return Polynomial._wrap(a.gcd(b))

    def diff(self, v: str) -> "Polynomial":
        if v not in self.gens:
            return Polynomial.const(0)
        return Polynomial._wrap(self._p.diff(self._p.ring.gens[self.gens.index(v)]))

    def content(self) -> Fraction:
        """Positive rational content (gcd of numerators / lcm of denominators)."""
        cs = self.coefficients()
        if not cs:
            return Fraction(0)
        num = 0
        den = 1
        for c in cs:
            num = math.gcd(num, abs(c.numerator))
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> tuple[Fraction, "Polynomial"]:
        """``self = c * p`` with ``p`` integer-primitive and positive leading coefficient."""
        if self.is_zero():
            return Fraction(0), self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        return c, self.scale(1 / c)

    def factor_list(self) -> tuple[Fraction, list[tuple["Polynomial", int]]]:
        """Irreducible factorization ``c * prod(f**k)`` with normalized ``f``."""
        if self.is_constant():
            return self.constant_value(), []
        c, facs = self._p.factor_list()
        c = _frac(c)
        out = []
        for f, k in facs:
            fc, fp = Polynomial._wrap(f).primitive()
            c *= fc**k
            out.append((fp, k))
        out.sort(key=lambda fk: fk[0].sort_key())
        return c, out

    def evaluate(self, point: Mapping[str, Number]) -> Fraction:
        gens = self.gens
        if not gens:
            return self.constant_value()
        missing = [g for g in gens if g not in point]
        if missing:
            raise ExprError(f"no value assigned to {', '.join(missing)}")
        R = self._p.ring
        val = self._p.evaluate([(R.gens[i], _q(_as_fraction(point[g]))) for i, g in enumerate(gens)])
        return _frac(val)

    def evaluate_float(self, point: Mapping[str, object]):
        """Evaluate with mpmath numbers (or floats) assigned to the variables."""
        total = 0
        gens = self.gens
        vals = [point[g] for g in gens]
        for mono, c in self._p.terms():
            t = mpmath.mpf(int(c.numerator)) / int(c.denominator)
            for v, k in zip(vals, mono):
                if k:
                    t *= v**k
            total += t
        return total

    def evaluate_partial(self, point: Mapping[str, Number]) -> "Polynomial":
        gens = self.gens
        pairs = [(i, g) for i, g in enumerate(gens) if g in point]
        if not pairs:
            return self
        R = self._p.ring
        elem = self._p
        # substitute from the highest index down so ring indices stay valid
        for i, g in reversed(pairs):
            elem = elem.subs(elem.ring.gens[i], _q(_as_fraction(point[g])))
        return Polynomial._wrap(elem)

    def compose(self, bindings: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Simultaneous substitution of polynomials for variables."""
        relevant = {v: p for v, p in bindings.items() if v in self.gens}
        if not relevant:
            return self
        names = sort_vars(
            [g for g in self.gens if g not in relevant] + [s for p in relevant.values() for s in p.gens]
        )
        R = _ring(names)
        images = {}
        for g in self.gens:
            if g in relevant:
                images[g] = relevant[g]._p.set_ring(R) if relevant[g]._p.ring is not R else relevant[g]._p
            else:
                images[g] = R.gens[names.index(g)]
        gens = self.gens
        total = R.zero
        powers: dict[tuple[str, int], object] = {}
        for mono, c in self._p.terms():
            t = R(c)
            for g, k in zip(gens, mono):
                if k:
                    key = (g, k)
                    if key not in powers:
                        powers[key] = images[g] ** k
                    t = t * powers[key]
            total += t
        return Polynomial._wrap(total)

    # -- comparison and rendering ----------------------------------------
    def _canon(self):
        return (self.gens, tuple(sorted(self._p.items())))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self._p.ring is other._p.ring:
            return self._p == other._p
        return self.gens == other.gens and dict(self._p) == dict(other._p)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._canon())
        return self._hash

    def sort_key(self):
        return (self.total_degree(), self.render())

    def render(self) -> str:
        if not self._p:
            return "0"
        pieces = []
        for mono, c in self.terms():
            c_abs = abs(c)
            factors = []
            for v in sorted(mono, key=var_key):
                k = mono[v]
                factors.append(v if k == 1 else f"{v}^{k}")
            if not factors:
                body = _render_fraction(c_abs)
            elif c_abs == 1:
                body = "*".join(factors)
            else:
                body = _render_fraction(c_abs) + "*" + "*".join(factors)
            pieces.append((c < 0, body))
        out = ("-" if pieces[0][0] else "") + pieces[0][1]
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out

    __str__ = render

    def __repr__(self):
        return f"Polynomial({self.render()!r})"

    def to_sympy(self):
        return self._p.as_expr()

    @classmethod
    def from_sympy(cls, e) -> "Polynomial":
        """Convert a sympy polynomial expression with rational coefficients."""
        e = sympy.expand(sympy.sympify(e))
        syms = sort_vars(str(x) for x in e.free_symbols)
        if not syms:
            r = sympy.Rational(e)
            return cls.const(Fraction(int(r.p), int(r.q)))
        poly = sympy.Poly(e, *[sympy.Symbol(x) for x in syms], domain="QQ")
        return cls.from_terms(
            {tuple((v, k) for v, k in zip(syms, mono) if k): Fraction(int(c.p), int(c.q)) for mono, c in poly.terms()}
        )


def _render_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


_ZERO = Polynomial.const(0)
_ONE = Polynomial.const(1)


# ---------------------------------------------------------------------------
# RationalFunction
# ---------------------------------------------------------------------------


class RationalFunction:
    """Reduced quotient ``num/den`` with canonical denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Polynomial, den: Polynomial | None = None, *, _normalized=False):
        if den is None:
            den = _ONE
        if not _normalized:
            num, den = RationalFunction._normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def _normalize(num: Polynomial, den: Polynomial):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            return _ZERO, _ONE
        if not den.is_constant():
            g = num.gcd(den)
            if not g.is_constant():
                num = num.exquo(g)
                den = den.exquo(g)
        c, den = den.primitive()
        if c != 1:
            num = num.scale(1 / c)
        return num, den

    @classmethod
    def const(cls, value: Number) -> "RationalFunction":
        return RationalFunction(Polynomial.const(value), _ONE, _normalized=True)

    @classmethod
    def from_poly(cls, p: Polynomial) -> "RationalFunction":
        return RationalFunction(p, _ONE, _normalized=True)

    @classmethod
    def var(cls, name: str) -> "RationalFunction":
        return cls.from_poly(Polynomial.var(name))

    @staticmethod
    def _coerce(other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.const(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    @property
    def free_symbols(self) -> frozenset[str]:
        return self.num.free_symbols | self.den.free_symbols

    def __add__(self, other):
        other = RationalFunction._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        other = RationalFunction._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = RationalFunction._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = RationalFunction._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return RationalFunction.const(0)
        if self.den.is_one() and other.den.is_one():
            return RationalFunction(self.num * other.num, _ONE, _normalized=True)
        # cross-cancel before multiplying to keep sizes down
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        n1, d2 = (self.num.exquo(g1), other.den.exquo(g1)) if not g1.is_constant() else (self.num, other.den)
        n2, d1 = (other.num.exquo(g2), self.den.exquo(g2)) if not g2.is_constant() else (other.num, self.den)
        num, den = n1 * n2, d1 * d2
        c, den = den.primitive()
        if c != 1:
            num = num.scale(1 / c)
        return RationalFunction(num, den, _normalized=True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = RationalFunction._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = RationalFunction._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if k >= 0:
            return RationalFunction(self.num**k, self.den**k, _normalized=True) if k else RationalFunction.const(1)
        return self.inverse() ** (-k)

    def scale(self, c: Number) -> "RationalFunction":
        return RationalFunction(self.num.scale(c), self.den, _normalized=True) if c else RationalFunction.const(0)

    def diff(self, v: str) -> "RationalFunction":
        if v not in self.num.gens and v not in self.den.gens:
            return RationalFunction.const(0)
        if self.den.is_one():
            return RationalFunction.from_poly(self.num.diff(v))
        return RationalFunction(
            self.num.diff(v) * self.den - self.num * self.den.diff(v), self.den * self.den
        )

    def evaluate(self, point: Mapping[str, Number]) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise EvaluationSingularity("evaluation singularity: denominator vanishes")
        return self.num.evaluate(point) / d

    def substitute(self, bindings: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        return _poly_subst_rf(self.num, bindings) / _poly_subst_rf(self.den, bindings) if not self.den.is_one() else _poly_subst_rf(self.num, bindings)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            other = RationalFunction._coerce(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def render(self) -> str:
        if self.den.is_one():
            return self.num.render()
        n = self.num.render()
        if self.num.nterms() > 1:
            n = f"({n})"
        d = self.den.render()
        if not _is_power_of_symbol(self.den):
            d = f"({d})"
        return f"{n}/{d}"

    __str__ = render

    def __repr__(self):
        return f"RationalFunction({self.render()!r})"

    def to_sympy(self):
        return self.num.to_sympy() / self.den.to_sympy()

    @classmethod
    def from_sympy(cls, e) -> "RationalFunction":
        num, den = sympy.fraction(sympy.cancel(sympy.together(sympy.sympify(e))))
        return cls(Polynomial.from_sympy(num), Polynomial.from_sympy(den))


def _is_power_of_symbol(p: Polynomial) -> bool:
    terms = p.terms()
    if len(terms) != 1:
        return False
    mono, c = terms[0]
    return c == 1 and len(mono) == 1


def _poly_subst_rf(p: Polynomial, bindings: Mapping[str, RationalFunction]) -> RationalFunction:
    relevant = {v: r for v, r in bindings.items() if v in p.gens}
    if not relevant:
        return RationalFunction.from_poly(p)
    if all(r.den.is_one() for r in relevant.values()):
        return RationalFunction.from_poly(p.compose({v: r.num for v, r in relevant.items()}))
    # common denominator per variable: p(.., n/d, ..) = P(n, d) / d^deg
    total = RationalFunction.const(0)
    powers: dict[tuple[str, int], RationalFunction] = {}
    for mono, c in p.terms():
        t = RationalFunction.const(c)
        rest = {}
        for v, k in mono.items():
            if v in relevant:
                key = (v, k)
                if key not in powers:
                    powers[key] = relevant[v] ** k
                t = t * powers[key]
            else:
                rest[v] = k
        if rest:
            t = t * RationalFunction.from_poly(Polynomial.from_terms({tuple(rest.items()): 1}))
        total = total + t
    return total


# ---------------------------------------------------------------------------
# Expression
# ---------------------------------------------------------------------------

Radicals = tuple  # tuple[tuple[Polynomial, Fraction], ...]


def _radicals_key(rads) -> tuple:
    return tuple((b.sort_key(), e) for b, e in rads)


def _signature_key(sig) -> tuple:
    rads, g = sig
    return (len(rads), _radicals_key(rads), g.sort_key())


def _factor_base(base: Polynomial, e: Fraction) -> tuple[RationalFunction, dict[Polynomial, Fraction]]:
    """Split ``base**e`` into a rational coefficient and canonical radical powers."""
    c, facs = base.factor_list()
    powers: dict[Polynomial, Fraction] = {}
    if c < 0:
        odd = [f for f, k in facs if k % 2]
        if odd:
            # push the sign into the first odd-multiplicity factor
            target = odd[0]
            facs = [((-f if f is target else f), k) for f, k in facs]
            c = -c
        elif (e.denominator % 2) == 1:
            pass  # real odd root of a negative constant handled below
        else:
            raise UnsupportedOperation("radical of a negative constant is not real")
    for f, k in facs:
        powers[f] = powers.get(f, Fraction(0)) + k * e
    coef = RationalFunction.const(1)
    if c != 1:
        sign = 1
        if c < 0:
            # odd denominator: (-a)^e = (-1)^numerator * a^e
            sign = -1 if (e.numerator % 2) else 1
            c = -c
        coef = coef.scale(sign)
        for p, a in _factor_rational(c).items():
            powers[Polynomial.const(p)] = powers.get(Polynomial.const(p), Fraction(0)) + a * e
    return coef, powers


def _factor_rational(c: Fraction) -> dict[int, int]:
    out: dict[int, int] = {}
    for p, a in sympy.factorint(c.numerator).items():
        out[int(p)] = out.get(int(p), 0) + int(a)
    for p, a in sympy.factorint(c.denominator).items():
        out[int(p)] = out.get(int(p), 0) - int(a)
    return out


def _pow_poly_rf(b: Polynomial, k: int) -> RationalFunction:
    if k >= 0:
        return RationalFunction.from_poly(b**k)
    return RationalFunction(_ONE, b ** (-k))


def _settle_radicals(powers: Mapping[Polynomial, Fraction]) -> tuple[RationalFunction, Radicals]:
    """Absorb integer parts of exponents into a coefficient; keep fractional parts in (0, 1)."""
    coef = RationalFunction.const(1)
    rads = []
    for b, e in powers.items():
        if e == 0:
            continue
        fl = math.floor(e)
        frac = e - fl
        if fl:
            if b.is_constant():
                coef = coef.scale(b.constant_value() ** fl)
            else:
                coef = coef * _pow_poly_rf(b, fl)
        if frac:
            rads.append((b, frac))
    rads.sort(key=lambda be: be[0].sort_key())
    return coef, tuple(rads)


class Expression:
    """Finite sum of terms ``coef * prod(base**e) * exp(g)``; see module docstring."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        # terms: {(radicals, expPoly): RationalFunction}, assumed canonical
        self._terms = dict(terms) if terms else {}
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, value: Number) -> "Expression":
        value = _as_fraction(value)
        return cls.from_rf(RationalFunction.const(value))

    @classmethod
    def symbol(cls, name: str) -> "Expression":
        return cls.from_rf(RationalFunction.var(name))

    @classmethod
    def from_rf(cls, rf: RationalFunction) -> "Expression":
        if rf.is_zero():
            return cls()
        return cls({((), _ZERO): rf})

    @classmethod
    def from_poly(cls, p: Polynomial) -> "Expression":
        return cls.from_rf(RationalFunction.from_poly(p))

    @classmethod
    def exp_of(cls, g: Polynomial) -> "Expression":
        return cls({((), g): RationalFunction.const(1)})

    @classmethod
    def radical(cls, base: RationalFunction | Polynomial, e: Number) -> "Expression":
        """``base**e`` for a rational exponent, canonicalized."""
        e = _as_fraction(e)
        if isinstance(base, Polynomial):
            base = RationalFunction.from_poly(base)
        if base.is_zero():
            if e > 0:
                return cls()
            raise ZeroDivisionError("zero to a non-positive power")
        if e.denominator == 1:
            return cls.from_rf(base ** int(e))
        c1, p1 = _factor_base(base.num, e)
        c2, p2 = _factor_base(base.den, -e)
        powers = dict(p1)
        for b, k in p2.items():
            powers[b] = powers.get(b, Fraction(0)) + k
        c3, rads = _settle_radicals(powers)
        return cls._make({(rads, _ZERO): c1 * c2 * c3})

    @classmethod
    def _make(cls, raw: Mapping) -> "Expression":
        return cls({k: v for k, v in raw.items() if not v.is_zero()})

    @staticmethod
    def coerce(value) -> "Expression":
        if isinstance(value, Expression):
            return value
        if isinstance(value, (int, Fraction)):
            return Expression.const(value)
        if isinstance(value, Polynomial):
            return Expression.from_poly(value)
        if isinstance(value, RationalFunction):
            return Expression.from_rf(value)
        if isinstance(value, str):
            return parse(value)
        raise TypeError(f"cannot convert {type(value).__name__} to Expression")

    # -- structure ------------------------------------------------------------
    @property
    def terms(self) -> list[tuple[RationalFunction, Radicals, Polynomial]]:
        return [(self._terms[s], s[0], s[1]) for s in self._sorted_signatures()]

    def _sorted_signatures(self):
        return sorted(self._terms, key=_signature_key)

    def nterms(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and ((), _ZERO) in self._terms)

    def as_rational_function(self) -> RationalFunction:
        if not self._terms:
            return RationalFunction.const(0)
        if not self.is_rational():
            raise UnsupportedOperation("expression is not a rational function")
        return self._terms[((), _ZERO)]

    def is_polynomial(self) -> bool:
        return self.is_rational() and self.as_rational_function().is_polynomial()

    def as_polynomial(self) -> Polynomial:
        rf = self.as_rational_function()
        if not rf.is_polynomial():
            raise UnsupportedOperation("expression is not a polynomial")
        return rf.num

    def is_constant(self) -> bool:
        return self.is_rational() and self.as_rational_function().is_constant()

    def constant_value(self) -> Fraction:
        return self.as_rational_function().constant_value()

    @property
    def free_symbols(self) -> frozenset[str]:
        out: set[str] = set()
        for (rads, g), c in self._terms.items():
            out |= c.free_symbols
            out |= g.free_symbols
            for b, _ in rads:
                out |= b.free_symbols
        return frozenset(out)

    def depends_on(self, v: str) -> bool:
        return not self.diff(v).is_zero()

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        try:
            other = Expression.coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for s, c in other._terms.items():
            if s in out:
                v = out[s] + c
                if v.is_zero():
                    del out[s]
                else:
                    out[s] = v
            else:
                out[s] = c
        return Expression(out)

    __radd__ = __add__

    def __neg__(self):
        return Expression({s: -c for s, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = Expression.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Expression.coerce(other) - self

    @staticmethod
    def _mul_sig(s1, s2):
        (r1, g1), (r2, g2) = s1, s2
        if not r1 and not r2:
            return RationalFunction.const(1), ((), g1 + g2 if not g2.is_zero() else g1)
        powers: dict[Polynomial, Fraction] = {}
        for b, e in r1 + r2:
            powers[b] = powers.get(b, Fraction(0)) + e
        coef, rads = _settle_radicals(powers)
        return coef, (rads, g1 + g2)

    def __mul__(self, other):
        try:
            other = Expression.coerce(other)
        except TypeError:
            return NotImplemented
        if not self._terms or not other._terms:
            return Expression()
        out: dict = {}
        for s1, c1 in self._terms.items():
            for s2, c2 in other._terms.items():
                k, s = Expression._mul_sig(s1, s2)
                v = c1 * c2
                if not k.is_one():
                    v = v * k
                if s in out:
                    out[s] = out[s] + v
                else:
                    out[s] = v
        return Expression._make(out)

    __rmul__ = __mul__

    def inverse(self) -> "Expression":
        if not self._terms:
            raise ZeroDivisionError("division by zero expression")
        if len(self._terms) != 1:
            raise UnsupportedQuotient("unsupported quotient: divisor has more than one term")
        (rads, g), c = next(iter(self._terms.items()))
        powers = {b: -e for b, e in rads}
        k, new_rads = _settle_radicals(powers)
        return Expression._make({(new_rads, -g): c.inverse() * k})

    def __truediv__(self, other):
        try:
            other = Expression.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Expression.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ValueError("use Expression.radical for non-integer powers")
        if k < 0:
            return self.inverse() ** (-k)
        out = Expression.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def scale(self, c: Number) -> "Expression":
        c = _as_fraction(c)
        if c == 0:
            return Expression()
        return Expression({s: v.scale(c) for s, v in self._terms.items()})

    # -- calculus ---------------------------------------------------------
    def diff(self, v: str) -> "Expression":
        out: dict = {}
        for (rads, g), c in self._terms.items():
            d = c.diff(v)
            for b, e in rads:
                db = b.diff(v)
                if not db.is_zero():
                    d = d + c * RationalFunction(db.scale(e), b)
            dg = g.diff(v)
            if not dg.is_zero():
                d = d + c * RationalFunction.from_poly(dg)
            if not d.is_zero():
                out[(rads, g)] = d
        return Expression(out)

    # -- evaluation -------------------------------------------------------
    def evaluate(self, point: Mapping[str, Number]):
        """Exact ``Fraction`` for rational expressions, else an ``mpmath.mpf``."""
        if self.is_rational():
            if not self._terms:
                return Fraction(0)
            return self.as_rational_function().evaluate(point)
        with mpmath.workdps(EVAL_DPS):
            total = mpmath.mpf(0)
            for (rads, g), c in self._terms.items():
                cv = c.evaluate(point)
                t = mpmath.mpf(cv.numerator) / cv.denominator
                for b, e in rads:
                    bv = b.evaluate(point)
                    if bv == 0:
                        raise EvaluationSingularity("evaluation singularity: radical base vanishes")
                    bm = mpmath.mpf(bv.numerator) / bv.denominator
                    if bm < 0:
                        if e.denominator % 2 == 0:
                            raise EvaluationSingularity("evaluation singularity: even root of a negative value")
                        t *= (-1) ** e.numerator * mpmath.root(-bm, e.denominator) ** e.numerator
                    else:
                        t *= mpmath.power(bm, mpmath.mpf(e.numerator) / e.denominator)
                if not g.is_zero():
                    gv = g.evaluate(point)
                    t *= mpmath.exp(mpmath.mpf(gv.numerator) / gv.denominator)
                total += t
            return +total

    def evaluate_float(self, point: Mapping[str, float]) -> float:
        """Fast double-precision evaluation at a float point."""
        total = 0.0
        for (rads, g), c in self._terms.items():
            d = _poly_float(c.den, point)
            if d == 0.0:
                raise EvaluationSingularity("evaluation singularity: denominator vanishes")
            t = _poly_float(c.num, point) / d
            for b, e in rads:
                bv = _poly_float(b, point)
                if bv <= 0.0:
                    if bv == 0.0 or e.denominator % 2 == 0:
                        raise EvaluationSingularity("evaluation singularity: radical base")
                    t *= (-1.0) ** e.numerator * (-bv) ** float(e)
                else:
                    t *= bv ** float(e)
            if not g.is_zero():
                t *= math.exp(_poly_float(g, point))
            total += t
        return total

    def substitute(self, bindings: Mapping[str, "Expression"]) -> "Expression":
        rf_bind: dict[str, RationalFunction] = {}
        for v, val in bindings.items():
            val = Expression.coerce(val)
            if not val.is_rational():
                raise UnsupportedOperation(f"substitution for {v} must be a rational function")
            rf_bind[v] = val.as_rational_function()
        syms = self.free_symbols
        rf_bind = {v: r for v, r in rf_bind.items() if v in syms}
        if not rf_bind:
            return self
        total = Expression()
        for (rads, g), c in self._terms.items():
            try:
                part = Expression.from_rf(c.substitute(rf_bind))
            except ZeroDivisionError as exc:
                raise EvaluationSingularity("substitution creates a zero denominator") from exc
            for b, e in rads:
                nb = _poly_subst_rf(b, rf_bind)
                part = part * Expression.radical(nb, e)
            if not g.is_zero():
                ng = _poly_subst_rf(g, rf_bind)
                if not ng.is_polynomial():
                    raise UnsupportedOperation("substitution makes an exponent non-polynomial")
                part = part * Expression.exp_of(ng.num)
            total = total + part
        return total

    # -- comparison / rendering ---------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Expression):
            try:
                other = Expression.coerce(other)
            except (TypeError, ExprError):
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def render(self) -> str:
        if not self._terms:
            return "0"
        pieces = [_render_term(self._terms[s], s) for s in self._sorted_signatures()]
        out = pieces[0]
        for p in pieces[1:]:
            if p.startswith("-"):
                out += " - " + p[1:]
            else:
                out += " + " + p
        return out

    __str__ = render

    def __repr__(self):
        return f"Expression({self.render()!r})"

    def sort_key(self):
        return (len(self._terms), len(self.render()), self.render())


def _poly_float(p: Polynomial, point: Mapping[str, float]) -> float:
    gens = p.gens
    vals = [point[g] for g in gens]
    total = 0.0
    for mono, c in p._p.terms():
        t = float(c.numerator) / float(c.denominator)
        for v, k in zip(vals, mono):
            if k:
                t *= v**k
        total += t
    return total


def _render_term(c: RationalFunction, sig) -> str:
    rads, g = sig
    extras = [f"({b.render()})^({_render_fraction(e)})" for b, e in rads]
    if not g.is_zero():
        extras.append(f"exp({g.render()})")
    if not extras:
        return c.render()
    tail = "*".join(extras)
    if c.is_one():
        return tail
    if c == RationalFunction.const(-1):
        return "-" + tail
    cs = c.render()
    simple = c.den.is_one() and c.num.nterms() == 1
    if not simple:
        cs = f"({cs})"
    return f"{cs}*{tail}"


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|(.))")


class _Parser:
    def __init__(self, text: str, symbols: Iterable[str] | None):
        self.text = text
        self.symbols = None if symbols is None else frozenset(symbols)
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                break
            if m.group(1) is not None:
                self.tokens.append(("int", m.group(1), m.start(1)))
            elif m.group(2) is not None:
                self.tokens.append(("name", m.group(2), m.start(2)))
            elif m.group(3) is not None:
                ch = m.group(3)
                if ch not in "+-*/^()":
                    raise ExprSyntaxError(f"unexpected character {ch!r}", m.start(3), text)
                self.tokens.append(("op", ch, m.start(3)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] == "end":
            raise ExprSyntaxError(f"expected {value!r}", tok[2], self.text)
        return tok

    def parse(self) -> Expression:
        if not self.tokens:
            raise ExprSyntaxError("empty expression", 0, self.text)
        e = self.sum()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected token {tok[1]!r}", tok[2], self.text)
        return e

    def sum(self) -> Expression:
        e = self.product()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.product()
            e = e + rhs if op == "+" else e - rhs
        return e

    def product(self) -> Expression:
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                e = e * rhs
            else:
                try:
                    e = e / rhs
                except ZeroDivisionError as exc:
                    raise ExprSyntaxError("division by zero", tok[2], self.text) from exc
                except UnsupportedQuotient as exc:
                    raise UnsupportedQuotient(f"unsupported quotient at position {tok[2]}") from exc
        return e

    def unary(self) -> Expression:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return -self.unary()
        if tok[0] == "op" and tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def exponent(self) -> Fraction:
        tok = self.peek()
        sign = 1
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
            tok = self.peek()
        if tok[0] == "int":
            self.take()
            return Fraction(sign * int(tok[1]))
        if tok[0] == "op" and tok[1] == "(":
            self.take()
            inner_sign = 1
            t2 = self.peek()
            if t2[0] == "op" and t2[1] in "+-":
                self.take()
                inner_sign = -1 if t2[1] == "-" else 1
            t3 = self.take()
            if t3[0] != "int":
                raise ExprSyntaxError("expected integer exponent", t3[2], self.text)
            val = Fraction(int(t3[1]))
            if self.peek()[1] == "/":
                self.take()
                t4 = self.take()
                if t4[0] != "int" or int(t4[1]) == 0:
                    raise ExprSyntaxError("expected nonzero integer denominator", t4[2], self.text)
                val = val / int(t4[1])
            self.expect(")")
            return sign * inner_sign * val
        raise ExprSyntaxError("expected exponent", tok[2], self.text)

    def power(self) -> Expression:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            pos = self.take()[2]
            e = self.exponent()
            if e.denominator == 1:
                try:
                    return base ** int(e)
                except (ZeroDivisionError, UnsupportedQuotient) as exc:
                    raise ExprSyntaxError(f"cannot raise to power {e}", pos, self.text) from exc
            if not base.is_rational():
                raise ExprSyntaxError("fractional powers need a rational-function base", pos, self.text)
            return Expression.radical(base.as_rational_function(), e)
        return base

    def atom(self) -> Expression:
        tok = self.take()
        kind, val, pos = tok
        if kind == "int":
            return Expression.const(int(val))
        if kind == "name":
            if val == "exp" and self.peek()[1] == "(":
                self.take()
                inner = self.sum()
                self.expect(")")
                if not inner.is_polynomial():
                    raise ExprSyntaxError("exp() argument must be a polynomial", pos, self.text)
                return Expression.exp_of(inner.as_polynomial())
            if self.symbols is not None and val not in self.symbols:
                raise UnknownSymbolError(f"unknown symbol {val!r}", pos, self.text)
            return Expression.symbol(val)
        if kind == "op" and val == "(":
            e = self.sum()
            self.expect(")")
            return e
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", pos, self.text)
        raise ExprSyntaxError(f"unexpected token {val!r}", pos, self.text)


def parse(text: str, symbols: Iterable[str] | None = None) -> Expression:
    """Parse the ASCII expression grammar into a canonical :class:`Expression`.

    ``symbols`` is an optional strict symbol table; unknown names then raise
    :class:`UnknownSymbolError`.
    """
    return _Parser(text, symbols).parse()


def render(e: Expression) -> str:
    return e.render()


def differentiate(e: Expression, v: str) -> Expression:
    return e.diff(v)


def add(a, b) -> Expression:
    return Expression.coerce(a) + Expression.coerce(b)


def mul(a, b) -> Expression:
    return Expression.coerce(a) * Expression.coerce(b)


def div(a, b) -> Expression:
    return Expression.coerce(a) / Expression.coerce(b)


def negate(a) -> Expression:
    return -Expression.coerce(a)


def is_zero(e: Expression) -> bool:
    return Expression.coerce(e).is_zero()


def evaluate(e: Expression, point: Mapping[str, Number]):
    return Expression.coerce(e).evaluate(point)


def substitute(e: Expression, bindings: Mapping[str, object]) -> Expression:
    return Expression.coerce(e).substitute({k: Expression.coerce(v) for k, v in bindings.items()})
