"""Exact symbolic scalar kernel."""

from .symbols import Symbol, coordinate, parameter, function, unit, SQRT2 as SQRT2_SYMBOL, I_UNIT
from .poly import Poly
from .expr import (
    Expr,
    KernelError,
    ZeroDenominatorError,
    PoleError,
    UnassignedSymbolError,
    LogNodeError,
    ZERO,
    ONE,
    SQRT2,
    I,
    as_expr,
    differentiate,
    substitute,
    eval_rational,
    is_zero,
)
from .parse import parse, Workspace, ParseError, UndeclaredIdentifierError
from .printing import to_str

__all__ = [
    "Symbol", "coordinate", "parameter", "function", "unit", "SQRT2_SYMBOL", "I_UNIT",
    "Poly", "Expr", "KernelError", "ZeroDenominatorError", "PoleError",
    "UnassignedSymbolError", "LogNodeError", "ZERO", "ONE", "SQRT2", "I",
    "as_expr", "differentiate", "substitute", "eval_rational", "is_zero",
    "parse", "Workspace", "ParseError", "UndeclaredIdentifierError", "to_str",
]
