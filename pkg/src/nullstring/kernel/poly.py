"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a non-negative int packing one exponent per interned symbol
(``BITS`` bits each), so monomial multiplication is integer addition and
the integer order is a valid (lexicographic) monomial order.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce

from . import symbols as S
from .symbols import BITS, MASK, TABLE

_ZERO = Fraction(0)
_ONE = Fraction(1)


def decode(m: int) -> list[tuple[int, int]]:
    """(symbol id, exponent) pairs of a packed monomial."""
    out = []
    i = 0
    while m:
        e = m & MASK
        if e:
            out.append((i, e))
        m >>= BITS
        i += 1
    return out


def exponent(m: int, i: int) -> int:
    return (m >> (BITS * i)) & MASK


def mono_of(pairs) -> int:
    m = 0
    for i, e in pairs:
        if e < 0 or e > MASK:
            raise OverflowError("exponent out of range")
        m += e << (BITS * i)
    return m


def mono_divides(a: int, b: int) -> bool:
    """True iff monomial a divides monomial b."""
    while a:
        if (a & MASK) > (b & MASK):
            return False
        a >>= BITS
        b >>= BITS
    return True


def mono_gcd(a: int, b: int) -> int:
    out = 0
    shift = 0
    while a and b:
        out |= min(a & MASK, b & MASK) << shift
        a >>= BITS
        b >>= BITS
        shift += BITS
    return out


def _reduce_units(m: int, c):
    """Apply u**2 -> square for every algebraic unit exponent >= 2."""
    for i, sq in TABLE.units.items():
        e = exponent(m, i)
        if e >= 2:
            k = e // 2
            m -= (2 * k) << (BITS * i)
            c = c * sq**k
    return m, c


class Poly:
    """Immutable sparse polynomial ``{monomial: coefficient}``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms: dict[int, Fraction] = terms if terms is not None else {}
        self._hash = None

    # -- construction ---------------------------------------------------
    @staticmethod
    def const(c) -> "Poly":
        c = Fraction(c)
        return Poly({0: c}) if c else Poly()

    @staticmethod
    def var(sym: S.Symbol, power: int = 1) -> "Poly":
        return Poly({power << (BITS * S.sid(sym)): _ONE})

    # -- queries --------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get(0, _ZERO) if self.is_const() else None

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def support_mask(self) -> int:
        m = 0
        for k in self.terms:
            m |= k
        return m

    def symbol_ids(self) -> list[int]:
        return [i for i, _ in decode(self.support_mask())]

    def has_units(self) -> bool:
        mask = self.support_mask()
        return any(exponent(mask, i) for i in TABLE.units)

    def degree(self, i: int | None = None) -> int:
        if not self.terms:
            return -1
        if i is None:
            return max(sum(e for _, e in decode(m)) for m in self.terms)
        return max(exponent(m, i) for m in self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __len__(self):
        return len(self.terms)

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other: "Poly") -> "Poly":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v += c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        if not c:
            return Poly()
        if c == 1:
            return self
        return Poly({m: v * c for m, v in self.terms.items()})

    def shift(self, mono: int, c=_ONE) -> "Poly":
        """Multiply by the term c*mono."""
        out = {}
        high = TABLE.unit_high_mask
        for m, v in self.terms.items():
            m2 = m + mono
            v2 = v * c
            if m2 & high:
                m2, v2 = _reduce_units(m2, v2)
            prev = out.get(m2)
            if prev is not None:
                v2 += prev
                if not v2:
                    del out[m2]
                    continue
            out[m2] = v2
        return Poly(out)

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly()
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (m, c), = b.items()
            return self.shift(m, c) if a is self.terms else other.shift(m, c)
        out: dict[int, Fraction] = {}
        high = TABLE.unit_high_mask
        get = out.get
        for m1, c1 in b.items():
            for m2, c2 in a.items():
                m = m1 + m2
                c = c1 * c2
                if m & high:
                    m, c = _reduce_units(m, c)
                prev = get(m)
                if prev is not None:
                    c += prev
                out[m] = c
        return Poly({m: c for m, c in out.items() if c})

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- structure ------------------------------------------------------
    def monomial_content(self) -> int:
        """GCD of all monomials (0 for the zero polynomial)."""
        if not self.terms:
            return 0
        return reduce(mono_gcd, self.terms)

    def div_monomial(self, mono: int) -> "Poly":
        if not mono:
            return self
        return Poly({m - mono: c for m, c in self.terms.items()})

    def leading(self) -> tuple[int, Fraction]:
        m = max(self.terms)
        return m, self.terms[m]

    def exact_div(self, other: "Poly") -> "Poly | None":
        """self / other if the division is exact, else None.

        Division by a single polynomial in a monomial order leaves zero
        remainder iff it divides, so the plain division algorithm decides.
        """
        if not other.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if self.has_units() or other.has_units():
            return None
        lm, lc = other.leading()
        rem = dict(self.terms)
        quot: dict[int, Fraction] = {}
        neg_other = [(m, -c) for m, c in other.terms.items() if m != lm]
        while rem:
            m = max(rem)
            if not mono_divides(lm, m):
                return None
            c = rem.pop(m) / lc
            qm = m - lm
            quot[qm] = c
            for om, oc in neg_other:
                k = om + qm
                v = rem.get(k, _ZERO) + oc * c
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        return Poly(quot)

    def diff(self, i: int) -> "Poly":
        """Plain partial derivative with respect to symbol id i."""
        shift = BITS * i
        one = 1 << shift
        out = {}
        for m, c in self.terms.items():
            e = (m >> shift) & MASK
            if e:
                out[m - one] = c * e
        return Poly(out)

    def coefficient_in(self, i: int, power: int) -> "Poly":
        """Coefficient polynomial of sym_i**power."""
        shift = BITS * i
        out = {}
        for m, c in self.terms.items():
            if ((m >> shift) & MASK) == power:
                out[m - (power << shift)] = c
        return Poly(out)

    def conjugate_unit(self, i: int) -> "Poly":
        """Replace unit u by -u."""
        return Poly({m: (-c if exponent(m, i) & 1 else c) for m, c in self.terms.items()})

    def evaluate(self, values: dict[int, Fraction]) -> Fraction:
        total = _ZERO
        for m, c in self.terms.items():
            v = c
            for i, e in decode(m):
                v *= values[i] ** e
            total += v
        return total

    def map_coefficients(self, f) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            v = f(c)
            if v:
                out[m] = v
        return Poly(out)


def poly_from_monomials(items) -> Poly:
    """Build a polynomial from (coefficient, [(Symbol, exp), ...]) items."""
    p = Poly()
    for c, factors in items:
        m = mono_of((S.sid(s), e) for s, e in factors)
        p = p + Poly({m: Fraction(c)})
    return p
