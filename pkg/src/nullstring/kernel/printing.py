"""Canonical text form of expressions.

Monomials are printed in graded-lexicographic order (highest total degree
first) with variables ordered coordinates (q, p, x, y, ...), then
parameters alphabetically, then opaque function symbols, then units. The
output is accepted by :func:`nullstring.kernel.parse.parse` again.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Poly, decode
from .symbols import TABLE


def _mono_key(m: int):
    pairs = decode(m)
    ranked = sorted(((TABLE.symbols[i].sort_key, e) for i, e in pairs))
    total = sum(e for _, e in pairs)
    return total, ranked


def _grlex_sorted(p: Poly):
    # highest total degree first; within a degree compare exponent vectors
    # in variable order, larger exponent of an earlier variable first
    def key(item):
        total, ranked = _mono_key(item[0])
        return (-total, _neg_lex(ranked))

    return sorted(p.terms.items(), key=key)


class _neg_lex:
    __slots__ = ("ranked",)

    def __init__(self, ranked):
        self.ranked = ranked

    def __lt__(self, other):
        a, b = self.ranked, other.ranked
        for (ka, ea), (kb, eb) in zip(a, b):
            if ka != kb:
                # the monomial containing the earlier variable sorts first
                return ka < kb
            if ea != eb:
                return ea > eb
        return len(a) > len(b)

    def __eq__(self, other):
        return self.ranked == other.ranked


def _mono_str(m: int) -> str:
    parts = []
    for key, i, e in sorted((TABLE.symbols[i].sort_key, i, e) for i, e in decode(m)):
        name = TABLE.symbols[i].display()
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _coef_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def poly_str(p: Poly) -> str:
    if not p.terms:
        return "0"
    out = []
    for k, (m, c) in enumerate(_grlex_sorted(p)):
        neg = c < 0
        a = -c if neg else c
        ms = _mono_str(m)
        if not ms:
            body = _coef_str(a)
        elif a == 1:
            body = ms
        else:
            body = f"{_coef_str(a)}*{ms}"
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def _wrap(p: Poly) -> str:
    s = poly_str(p)
    if len(p.terms) > 1:
        return f"({s})"
    m, c = next(iter(p.terms.items()))
    if c < 0 or (c != 1 and m) or c.denominator != 1:
        return f"({s})"
    return s


def _wrap_den(p: Poly) -> str:
    # a/b*c would parse as (a/b)*c, so only a bare power may go unwrapped
    s = _wrap(p)
    if s.startswith("("):
        return s
    m = next(iter(p.terms))
    return s if len(decode(m)) <= 1 else f"({s})"


def rational_str(num: Poly, den: Poly) -> str:
    if den.is_const():
        return poly_str(num)
    return f"{_wrap(num)}/{_wrap_den(den)}"


def to_str(e) -> str:
    base = rational_str(e.num, e.den)
    if not e.logs:
        return base
    parts = [] if e.num.is_zero() else [base]
    for c, u in e.logs:
        v = c.const_value()
        if v == 1:
            parts.append(f"log({to_str(u)})")
        elif v == -1:
            parts.append(f"-log({to_str(u)})")
        else:
            parts.append(f"{_wrap_expr(c)}*log({to_str(u)})")
    return " + ".join(parts).replace("+ -", "- ")


def _wrap_expr(e) -> str:
    s = to_str(e)
    if e.den.is_const() and len(e.num.terms) == 1 and not e.logs:
        (m, c), = e.num.terms.items()
        if c > 0 and (c.denominator == 1):
            return s
    return f"({s})"
