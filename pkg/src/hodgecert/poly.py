"""Sparse homogeneous polynomials over Q with a fixed graded reverse lexicographic order.

Monomials are plain exponent tuples. Every module sorts monomials with
:func:`grevlex_key`, so matrix rows and columns built anywhere in the package
line up.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

from .errors import DegreeMismatchError, NonHomogeneousError, ParseError

Monomial = tuple


def grevlex_key(mono):
    """Sort key; ascending order of keys is ascending grevlex order."""
    return (sum(mono), tuple(-e for e in reversed(mono)))


@lru_cache(maxsize=None)
def monomials_of_degree(num_vars, degree):
    """All monomials of the given degree, strictly increasing in grevlex order."""
    if degree < 0 or num_vars < 1:
        return ()
    monos = []
    for combo in combinations_with_replacement(range(num_vars), degree):
        exps = [0] * num_vars
        for i in combo:
            exps[i] += 1
        monos.append(tuple(exps))
    monos.sort(key=grevlex_key)
    return tuple(monos)


def count_monomials(num_vars, degree):
    if degree < 0:
        return 0
    return comb(degree + num_vars - 1, num_vars - 1)


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def mono_str(mono):
    parts = []
    for i, e in enumerate(mono):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts)


class Polynomial:
    """Immutable sparse polynomial ``{exponent tuple: Fraction}`` in ``num_vars`` variables.

    Non-homogeneous values can be constructed (the parser produces them), but
    every algebraic operation below insists on homogeneous input.
    """

    __slots__ = ("terms", "num_vars", "_hash")

    def __init__(self, terms, num_vars):
        clean = {}
        for mono, c in terms.items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != num_vars:
                raise ValueError(f"monomial {mono} does not have {num_vars} exponents")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = Fraction(c)
            if c:
                clean[mono] = clean.get(mono, 0) + c
                if not clean[mono]:
                    del clean[mono]
        self.terms = clean
        self.num_vars = num_vars
        self._hash = None

    @classmethod
    def zero(cls, num_vars):
        return cls({}, num_vars)

    @classmethod
    def constant(cls, c, num_vars):
        return cls({(0,) * num_vars: c}, num_vars)

    @classmethod
    def monomial(cls, mono, coeff=1):
        return cls({tuple(mono): coeff}, len(mono))

    @classmethod
    def variable(cls, i, num_vars):
        mono = [0] * num_vars
        mono[i] = 1
        return cls.monomial(mono)

    @classmethod
    def parse(cls, text, num_vars):
        return parse_polynomial(text, num_vars)

    def is_zero(self):
        return not self.terms

    def is_homogeneous(self):
        return len({sum(m) for m in self.terms}) <= 1

    @property
    def degree(self):
        """Total degree; ``None`` for the zero polynomial."""
        degs = {sum(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise NonHomogeneousError(f"polynomial is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()

    def monomials(self):
        return sorted(self.terms, key=grevlex_key, reverse=True)

    def __iter__(self):
        for m in self.monomials():
            yield m, self.terms[m]

    def __len__(self):
        return len(self.terms)

    def coefficient(self, mono):
        return self.terms.get(tuple(mono), Fraction(0))

    def _check_compatible(self, other):
        if self.num_vars != other.num_vars:
            raise DegreeMismatchError(
                f"polynomials live in {self.num_vars} and {other.num_vars} variables")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_compatible(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return Polynomial(terms, self.num_vars)

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()}, self.num_vars)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        return Polynomial({m: c * v for m, v in self.terms.items()}, self.num_vars)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num_vars, frozenset(self.terms.items())))
        return self._hash

    def partials(self):
        return partials(self)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r}, num_vars={self.num_vars})"


def mul(a, b):
    """Product of two homogeneous polynomials."""
    a._check_compatible(b)
    for p in (a, b):
        if not p.is_homogeneous():
            raise DegreeMismatchError("mul requires homogeneous factors")
    terms = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            m = mono_mul(ma, mb)
            terms[m] = terms.get(m, 0) + ca * cb
    return Polynomial(terms, a.num_vars)


def partials(f):
    """The list ``[df/dx_0, ..., df/dx_{N-1}]``."""
    if not f.is_homogeneous():
        raise NonHomogeneousError("partials requires a homogeneous polynomial")
    out = []
    for i in range(f.num_vars):
        terms = {}
        for m, c in f.terms.items():
            if m[i]:
                dm = list(m)
                dm[i] -= 1
                terms[tuple(dm)] = c * m[i]
        out.append(Polynomial(terms, f.num_vars))
    return out


def euler_sum(f):
    """``sum_i x_i * df/dx_i``; equals ``deg(f) * f`` for homogeneous ``f``."""
    total = Polynomial.zero(f.num_vars)
    for i, df in enumerate(partials(f)):
        total = total + Polynomial.variable(i, f.num_vars) * df
    return total


def _format_coeff(c):
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_polynomial(f):
    """Canonical text form, accepted back by :func:`parse_polynomial`."""
    if f.is_zero():
        return "0"
    pieces = []
    for mono, c in f:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = mono_str(mono)
        if not body:
            term = _format_coeff(mag)
        elif mag == 1:
            term = body
        else:
            term = f"{_format_coeff(mag)}*{body}"
        pieces.append((sign, term))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, term in pieces[1:]:
        out += f" {sign} {term}"
    return out


_FACTOR = re.compile(r"(\d+(?:/\d+)?)|x(\d+)(?:\^(\d+))?")


def parse_polynomial(text, num_vars):
    """Parse ``c*x0^a*x1^b + ...`` with variables ``x0 .. x{N-1}``; whitespace is ignored."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ParseError("empty polynomial")
    terms = {}
    pos = 0
    while pos < len(s):
        sign = 1
        if s[pos] in "+-":
            sign = -1 if s[pos] == "-" else 1
            pos += 1
        elif pos:
            raise ParseError(f"expected '+' or '-' at position {pos} in {text!r}")
        coeff = Fraction(sign)
        mono = [0] * num_vars
        expect_factor = True
        seen_any = False
        while expect_factor:
            m = _FACTOR.match(s, pos)
            if not m:
                raise ParseError(f"bad term at position {pos} in {text!r}")
            if m.group(1) is not None:
                try:
                    coeff *= Fraction(m.group(1))
                except ZeroDivisionError:
                    raise ParseError(f"zero denominator in {text!r}") from None
            else:
                i = int(m.group(2))
                if i >= num_vars:
                    raise ParseError(f"variable x{i} out of range for {num_vars} variables")
                mono[i] += int(m.group(3)) if m.group(3) is not None else 1
            seen_any = True
            pos = m.end()
            if pos < len(s) and s[pos] == "*":
                pos += 1
            else:
                expect_factor = False
        if not seen_any:
            raise ParseError(f"empty term in {text!r}")
        key = tuple(mono)
        terms[key] = terms.get(key, 0) + coeff
    return Polynomial(terms, num_vars)
