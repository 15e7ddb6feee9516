"""Sparse multivariate polynomials over exact rationals.

The variable set is fixed: (alpha, beta1, beta2, gamma1, gamma2, c1, c2).
Monomials are exponent tuples; the canonical order is graded lexicographic.
Polynomials interoperate with int / Fraction scalars, so code downstream can
be written once for both rational and symbolic coefficients.
"""

from __future__ import annotations

from fractions import Fraction

VARS = ("alpha", "beta1", "beta2", "gamma1", "gamma2", "c1", "c2")
NVARS = len(VARS)
_VAR_INDEX = {name: i for i, name in enumerate(VARS)}
_ZERO_MONO = (0,) * NVARS


def _grlex_key(mono: tuple[int, ...]) -> tuple:
    return (sum(mono), mono)


class Poly:
    """Polynomial as a sparse map monomial -> Fraction (no stored zeros)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[int, ...], Fraction] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    # -- constructors ---------------------------------------------------

    @staticmethod
    def const(c) -> "Poly":
        c = Fraction(c)
        return Poly({_ZERO_MONO: c}) if c else Poly()

    @staticmethod
    def var(name: str) -> "Poly":
        idx = _VAR_INDEX[name]
        mono = tuple(1 if i == idx else 0 for i in range(NVARS))
        return Poly({mono: Fraction(1)})

    @staticmethod
    def coerce(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return Poly.const(x)

    # -- ring operations -------------------------------------------------

    def __add__(self, other) -> "Poly":
        other = Poly.coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-Poly.coerce(other))

    def __rsub__(self, other) -> "Poly":
        return Poly.coerce(other) + (-self)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            s = Fraction(other)
            if not s:
                return Poly()
            return Poly({m: c * s for m, c in self.terms.items()})
        other = Poly.coerce(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, Fraction(0)) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(m == _ZERO_MONO for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.terms.get(_ZERO_MONO, Fraction(0))

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=_grlex_key)
        return m, self.terms[m]

    def monic(self) -> "Poly":
        """Scaled so the graded-lex leading coefficient is 1 (canonical rep)."""
        if not self.terms:
            return self
        _, c = self.leading()
        return self * (Fraction(1) / c)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def key(self) -> frozenset:
        return frozenset(self.terms.items())

    # -- evaluation -------------------------------------------------------

    def eval(self, point: dict[str, Fraction]) -> Fraction:
        """Full evaluation; every variable occurring must be assigned."""
        vals = [None] * NVARS
        for name, v in point.items():
            vals[_VAR_INDEX[name]] = Fraction(v)
        total = Fraction(0)
        for m, c in self.terms.items():
            prod = c
            for i, e in enumerate(m):
                if e:
                    if vals[i] is None:
                        raise ValueError(f"unassigned variable {VARS[i]}")
                    prod *= vals[i] ** e
            total += prod
        return total

    def substitute(self, point: dict[str, "Poly | Fraction | int"]) -> "Poly":
        """Partial substitution; unassigned variables stay symbolic."""
        subs = {_VAR_INDEX[name]: Poly.coerce(v) for name, v in point.items()}
        total = Poly()
        for m, c in self.terms.items():
            prod = Poly.const(c)
            rest = list(m)
            for i, e in enumerate(m):
                if e and i in subs:
                    rest[i] = 0
                    prod = prod * subs[i] ** e
            prod = prod * Poly({tuple(rest): Fraction(1)})
            total = total + prod
        return total

    # -- printing ----------------------------------------------------------

    def __repr__(self) -> str:
        return self.to_string()

    def to_string(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[m]
            factors = []
            for i, e in enumerate(m):
                if e == 1:
                    factors.append(VARS[i])
                elif e > 1:
                    factors.append(f"{VARS[i]}^{e}")
            if not factors:
                body = _fmt(c)
            elif c == 1:
                body = "*".join(factors)
            elif c == -1:
                body = "-" + "*".join(factors)
            else:
                body = _fmt(c) + "*" + "*".join(factors)
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    @staticmethod
    def parse(text: str) -> "Poly":
        """Inverse of to_string for the restricted syntax used in data files."""
        text = text.strip()
        if text == "0":
            return Poly()
        text = text.replace(" - ", " + -")
        total = Poly()
        for chunk in text.split(" + "):
            term = Poly.const(1)
            chunk = chunk.strip()
            if chunk.startswith("-"):
                term = term * -1
                chunk = chunk[1:]
            for factor in chunk.split("*"):
                factor = factor.strip()
                if "^" in factor:
                    name, exp = factor.split("^")
                    term = term * Poly.var(name) ** int(exp)
                elif factor in _VAR_INDEX:
                    term = term * Poly.var(factor)
                else:
                    term = term * Fraction(factor)
            total = total + term
        return total


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def proportionality(p: Poly, q: Poly) -> Fraction | None:
    """lambda with p == lambda * q, or None when no such rational exists."""
    p, q = Poly.coerce(p), Poly.coerce(q)
    if q.is_zero():
        return None if not p.is_zero() else Fraction(0)
    if p.is_zero():
        return Fraction(0)
    if set(p.terms) != set(q.terms):
        return None
    m0 = next(iter(q.terms))
    lam = p.terms[m0] / q.terms[m0]
    for m, c in q.terms.items():
        if p.terms[m] != lam * c:
            return None
    return lam
