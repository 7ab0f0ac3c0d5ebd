"""Scalar kernel: parsing, arithmetic, zero testing, calculus, substitution."""

from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from nullstring.kernel import (
    ONE,
    ZERO,
    SQRT2,
    Expr,
    LogNodeError,
    ParseError,
    PoleError,
    UnassignedSymbolError,
    UndeclaredIdentifierError,
    Workspace,
    ZeroDenominatorError,
    coordinate,
    differentiate,
    eval_rational,
    function,
    parameter,
    parse,
    substitute,
    to_str,
)

q, p, x, y = (Expr.sym(coordinate(n)) for n in "qpxy")
w, wt, z, zt = (Expr.sym(coordinate(n)) for n in ("w", "wt", "z", "zt"))
r, s = Expr.sym(coordinate("r")), Expr.sym(coordinate("s"))
Lam = Expr.sym(parameter("Lambda"))
f = Expr.sym(function("f", "p"))
fp = Expr.sym(function("f", "p", 1))

WS = Workspace(("q", "p", "x", "y"), {"Lambda": "nonzero", "B0": "free"}, {"f": "p"})


# -- parsing --------------------------------------------------------------

def test_parse_rational_coefficient():
    e = parse("x^2*y - 3/2")
    assert (e - (x * x * y - Fraction(3, 2))).is_zero()
    assert e.is_polynomial()


def test_parse_opaque_functions():
    e = parse("f(p)^2*q^3 + f'(p)*q^2", WS)
    assert (e - (f * f * q**3 + fp * q * q)).is_zero()


def test_parse_zero_denominator():
    with pytest.raises(ZeroDenominatorError):
        parse("1/0")


def test_parse_syntax_error_has_position():
    with pytest.raises(ParseError) as ei:
        parse("x*(y+")
    assert ei.value.position == 5


def test_parse_undeclared():
    with pytest.raises(UndeclaredIdentifierError):
        parse("x + kappa", WS)


def test_parse_wrong_function_argument():
    with pytest.raises(ParseError):
        parse("f(q)", WS)


def test_decimal_and_signed_exponent():
    assert (parse("0.25*x^-1") - 1 / (4 * x)).is_zero()


def test_print_parse_roundtrip():
    e = (q**3 * y * Lam * f * f - 3 * fp + x / 3) / (Lam + 1)
    assert (parse(to_str(e), WS) - e).is_zero()


def test_canonical_order():
    # graded lex with coordinates q, p, x, y ahead of parameters
    assert to_str(y + x * x + q) == "x^2 + q + y"


# -- arithmetic and zero testing --------------------------------------------

def test_difference_of_squares():
    assert ((x + y) * (x - y) - (x * x - y * y)).is_zero()


def test_quotient_cancels_under_zero_test():
    e = (x * x - 1) / (x - 1)
    assert (e - (x + 1)).is_zero()


def test_inverse_parameter():
    assert (1 / Lam * Lam - 1).is_zero()


def test_division_by_zero_expr():
    with pytest.raises(ZeroDenominatorError):
        x / (x - x)


def test_zero_tests():
    assert ((x + y) ** 2 - x * x - 2 * x * y - y * y).is_zero()
    assert not (x - y).is_zero()


def test_sqrt2_unit():
    assert (SQRT2 * SQRT2 - 2).is_zero()
    assert (1 / SQRT2 - SQRT2 / 2).is_zero()


# -- calculus ------------------------------------------------------------------

def test_derivative_monomial():
    assert (differentiate(x * x * y, coordinate("x")) - 2 * x * y).is_zero()


def test_derivative_opaque_chain():
    d = differentiate(f * f * q**3, coordinate("p"))
    assert (d - 2 * f * fp * q**3).is_zero()
    # the same after f -> p^2, against the explicit polynomial
    got = substitute(d, {"f": p * p})
    assert (got - 4 * p**3 * q**3).is_zero()


def test_derivative_of_log():
    u = 1 + w * wt + z * zt
    d = differentiate(Expr.log(u), coordinate("w"))
    assert (d - wt / u).is_zero()


def test_derivative_in_other_coordinate_ignores_f():
    assert differentiate(f, coordinate("q")).is_zero()


# -- substitution and evaluation --------------------------------------------

def test_substitute_point():
    assert (substitute(x + y, {"x": 1, "y": 2}) - 3).is_zero()


def test_substitute_rational_map():
    e = substitute(r * p + s + q, {"r": 1 / w, "s": z / w})
    assert (e - (p + z + q * w) / w).is_zero()


def test_substitute_zero_denominator():
    with pytest.raises(ZeroDenominatorError):
        substitute(1 / (x - 1), {"x": 1})


def test_eval_rational():
    assert eval_rational(x * x * y, {"x": 2, "y": 3}) == 12
    assert eval_rational(24 * x, {"x": Fraction(1, 2)}) == 12


def test_eval_errors():
    with pytest.raises(PoleError):
        eval_rational(1 / (x - 1), {"x": 1})
    with pytest.raises(UnassignedSymbolError):
        eval_rational(x + y, {"x": 1})
    with pytest.raises(LogNodeError):
        eval_rational(Expr.log(1 + x), {"x": 1})


# -- properties ----------------------------------------------------------------

coef = st.fractions(min_value=-5, max_value=5, max_denominator=4)
SYMS = [q, p, x, y, Lam]


@st.composite
def polys(draw, max_terms=4):
    e = ZERO
    for _ in range(draw(st.integers(1, max_terms))):
        t = Expr.const(draw(coef))
        for v in SYMS:
            t = t * v ** draw(st.integers(0, 2))
        e = e + t
    return e


@st.composite
def rationals(draw):
    n = draw(polys())
    d = draw(polys(max_terms=2))
    if d.is_zero():
        d = ONE
    return n / d


@settings(max_examples=40, deadline=None)
@given(rationals(), rationals(), rationals())
def test_ring_axioms(a, b, c):
    assert ((a + b) + c - (a + (b + c))).is_zero()
    assert (a * (b + c) - (a * b + a * c)).is_zero()


@settings(max_examples=40, deadline=None)
@given(rationals(), rationals(), st.sampled_from("qpxy"))
def test_derivation_law(a, b, v):
    v = coordinate(v)
    assert (differentiate(a * b, v) - a * differentiate(b, v) - b * differentiate(a, v)).is_zero()


@settings(max_examples=30, deadline=None)
@given(polys(), st.sampled_from("qpxy"), st.lists(coef, min_size=5, max_size=5))
def test_richardson_consistency(e, v, vals):
    """Central differences converge to the exact derivative at rate h^2."""
    point = dict(zip(("q", "p", "x", "y", "Lambda"), vals))
    exact = eval_rational(differentiate(e, coordinate(v)), point)

    def central(h):
        hi, lo = dict(point), dict(point)
        hi[v] = point[v] + h
        lo[v] = point[v] - h
        return (eval_rational(e, hi) - eval_rational(e, lo)) / (2 * h)

    e1 = abs(central(Fraction(1, 100)) - exact)
    e2 = abs(central(Fraction(1, 200)) - exact)
    assert e2 <= e1 / 3 or e1 == 0


@settings(max_examples=30, deadline=None)
@given(rationals(), coef, coef)
def test_substitute_commutes_with_d(e, a, b):
    bind = {"q": a, "Lambda": b}  # constant in x
    try:
        lhs = differentiate(substitute(e, bind), coordinate("x"))
    except ZeroDenominatorError:
        assume(False)  # denominator vanishes at the point: law does not apply
    rhs = substitute(differentiate(e, coordinate("x")), bind)
    assert (lhs - rhs).is_zero()


@settings(max_examples=30, deadline=None)
@given(rationals())
def test_printing_roundtrip(e):
    assert (parse(to_str(e), WS) - e).is_zero()
