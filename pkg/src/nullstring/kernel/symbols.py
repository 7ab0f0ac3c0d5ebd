"""Symbols and the process-wide symbol table.

Every symbol is interned to a small integer id; polynomial monomials pack
the exponents of all symbols into one Python int, ``BITS`` bits per id.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from threading import Lock

BITS = 16
MASK = (1 << BITS) - 1

COORDINATE = "coordinate"
PARAMETER = "parameter"
FUNCTION = "function"
UNIT = "unit"

_KIND_RANK = {COORDINATE: 0, PARAMETER: 1, FUNCTION: 2, UNIT: 3}

# Canonical printing order for coordinate names we know about; anything
# else sorts alphabetically after these.
COORDINATE_ORDER = ("q", "p", "x", "y", "r", "s", "w", "wt", "z", "zt", "a", "b", "c", "d")


@dataclass(frozen=True)
class Symbol:
    """A named indeterminate.

    ``kind`` is one of coordinate, parameter, function (an opaque
    univariate function derivative ``base^(order)(arg)``) or unit (an
    algebraic constant ``u`` with ``u**2 == square``).
    """

    name: str
    kind: str = COORDINATE
    base: str | None = None
    order: int = 0
    arg: str | None = None
    square: Fraction | None = None

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind == FUNCTION and (self.base is None or self.arg is None or self.order < 0):
            raise ValueError("function symbols need base, arg and order >= 0")
        if self.kind == UNIT and self.square is None:
            raise ValueError("unit symbols need a square")

    @property
    def sort_key(self):
        if self.kind == COORDINATE:
            try:
                rank = COORDINATE_ORDER.index(self.name)
            except ValueError:
                rank = len(COORDINATE_ORDER)
            return (0, rank, self.name, 0)
        if self.kind == FUNCTION:
            return (2, 0, self.base, self.order)
        return (_KIND_RANK[self.kind], 0, self.name, 0)

    def display(self) -> str:
        if self.kind == FUNCTION:
            return f"{self.base}{chr(39) * self.order}({self.arg})"
        return self.name

    def derivative(self) -> "Symbol":
        """The next symbol in an opaque function's derivative chain."""
        if self.kind != FUNCTION:
            raise TypeError(f"{self.name} is not an opaque function")
        return function(self.base, self.arg, self.order + 1)

    def __repr__(self):
        return f"Symbol({self.display()})"


def coordinate(name: str) -> Symbol:
    return Symbol(name, COORDINATE)


def parameter(name: str) -> Symbol:
    return Symbol(name, PARAMETER)


def function(base: str, arg: str, order: int = 0) -> Symbol:
    return Symbol(base + "'" * order, FUNCTION, base=base, order=order, arg=arg)


def unit(name: str, square) -> Symbol:
    return Symbol(name, UNIT, square=Fraction(square))


class _Table:
    def __init__(self):
        self.symbols: list[Symbol] = []
        self.index: dict[Symbol, int] = {}
        self.by_name: dict[str, Symbol] = {}
        # unit id -> square, and a mask of the "exponent >= 2" bits of all units
        self.units: dict[int, Fraction] = {}
        self.unit_high_mask = 0
        self.lock = Lock()

    def intern(self, sym: Symbol) -> int:
        i = self.index.get(sym)
        if i is not None:
            return i
        with self.lock:
            i = self.index.get(sym)
            if i is not None:
                return i
            other = self.by_name.get(sym.name)
            if other is not None and other != sym:
                raise ValueError(f"symbol name {sym.name!r} already used as {other.kind}")
            i = len(self.symbols)
            self.symbols.append(sym)
            self.by_name[sym.name] = sym
            if sym.kind == UNIT:
                self.units[i] = sym.square
                self.unit_high_mask |= (MASK ^ 1) << (BITS * i)
            self.index[sym] = i
            return i


TABLE = _Table()


def sid(sym: Symbol) -> int:
    return TABLE.intern(sym)


def sym_of(i: int) -> Symbol:
    return TABLE.symbols[i]


SQRT2 = unit("sqrt2", 2)
I_UNIT = unit("I", -1)
