"""Recursive-descent parser for the expression grammar.

::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := base ("^" integer)?
    base   := rational | identifier | identifier "'"* "(" identifier ")"
            | "(" expr ")" | "-" factor | "log" "(" expr ")"

Rationals may be written ``3``, ``3/2`` (as a quotient) or ``0.25``; the
exponent may carry a sign. ``log(...)`` is an extension used for the
double-null potential.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import symbols as S
from .expr import Expr, ZeroDenominatorError, KernelError


class ParseError(KernelError, ValueError):
    def __init__(self, message, position, text=""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class UndeclaredIdentifierError(ParseError):
    pass


FREE = "free"
NONZERO = "nonzero"


@dataclass
class Workspace:
    """Symbol declarations an expression is parsed against."""

    coordinates: tuple[str, ...] = ("q", "p", "x", "y")
    parameters: dict[str, str] = field(default_factory=dict)
    functions: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        names = list(self.coordinates) + list(self.parameters) + list(self.functions)
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ValueError(f"duplicate declarations: {sorted(dup)}")
        for n in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", n):
                raise ValueError(f"bad identifier {n!r}")
        for fname, arg in self.functions.items():
            if arg not in self.coordinates:
                raise ValueError(f"function {fname} argument {arg!r} is not a coordinate")
        for pname, flag in self.parameters.items():
            if flag not in (FREE, NONZERO):
                raise ValueError(f"parameter {pname}: flag must be free or nonzero")

    def coord(self, name: str) -> S.Symbol:
        return S.coordinate(name)

    def lookup(self, name: str, order: int = 0, arg: str | None = None) -> S.Symbol | None:
        if name in self.functions:
            fa = self.functions[name]
            if arg is not None and arg != fa:
                raise ValueError(f"function {name} is declared with argument {fa}, not {arg}")
            return S.function(name, fa, order)
        if order:
            return None
        if name in self.coordinates:
            return S.coordinate(name)
        if name in self.parameters:
            return S.parameter(name)
        return None

    def nonzero_parameters(self) -> list[str]:
        return sorted(k for k, v in self.parameters.items() if v == NONZERO)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()']))"
)


class _Parser:
    def __init__(self, text: str, ws: Workspace):
        self.text = text
        self.ws = ws
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "", len(self.text))

    def take(self, value=None):
        tok = self.peek()
        if value is not None and tok[1] != value:
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {value!r}, found {found}", tok[2], self.text)
        self.i += 1
        return tok

    def parse(self) -> Expr:
        if not self.toks:
            raise ParseError("empty expression", 0, self.text)
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2], self.text)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            t = self.term()
            e = e + t if op == "+" else e - t
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            pos = self.peek()[2]
            f = self.factor()
            if op == "*":
                e = e * f
            else:
                if f.is_zero():
                    raise ZeroDenominatorError("zero denominator", position=pos)
                e = e / f
        return e

    def factor(self) -> Expr:
        b = self.base()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] in ("-", "+"):
                sign = -1 if self.take()[1] == "-" else 1
            kind, val, pos = self.take()
            if kind != "num" or "." in val:
                raise ParseError("exponent must be an integer", pos, self.text)
            n = sign * int(val)
            if n < 0 and b.is_zero():
                raise ZeroDenominatorError("zero raised to a negative power", position=pos)
            b = b**n
        return b

    def base(self) -> Expr:
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return Expr.const(Fraction(val))
        if val == "-":
            self.take()
            return -self.factor()
        if val == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind == "id":
            self.take()
            if val == "log" and self.peek()[1] == "(" and self.ws.lookup("log") is None:
                self.take()
                e = self.expr()
                self.take(")")
                return Expr.log(e)
            order = 0
            while self.peek()[1] == "'":
                self.take()
                order += 1
            arg = None
            if val in self.ws.functions and self.peek()[1] == "(":
                self.take()
                k2, arg, p2 = self.take()
                if k2 != "id":
                    raise ParseError("expected argument identifier", p2, self.text)
                self.take(")")
                if arg != self.ws.functions[val]:
                    raise ParseError(
                        f"function {val} takes argument {self.ws.functions[val]}, not {arg}", p2, self.text
                    )
            sym = self.ws.lookup(val, order, arg)
            if sym is None:
                raise UndeclaredIdentifierError(f"undeclared identifier {val!r}", pos, self.text)
            return Expr.sym(sym)
        if kind == "end":
            raise ParseError("unexpected end of input", pos, self.text)
        raise ParseError(f"unexpected token {val!r}", pos, self.text)


def parse(text: str, workspace: Workspace | None = None) -> Expr:
    """Parse an expression string against the declarations in ``workspace``."""
    return _Parser(text, workspace or Workspace()).parse()
