"""Exact symbolic scalars.

An :class:`Expr` is ``num/den + sum_i c_i * log(u_i)`` where ``num``, ``den``
are :class:`Poly` and the ``c_i``, ``u_i`` are log-free Exprs. Fractions are
normalised lazily: common monomial content is cancelled, constant
denominators are absorbed, and an exact polynomial division is attempted
when it is cheap. No multivariate GCD is ever computed; zero testing is
exact because a canonical sparse numerator is zero iff it has no terms.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from . import symbols as S
from .poly import Poly, decode, exponent
from .symbols import TABLE, Symbol


class KernelError(Exception):
    """Base class for kernel failures."""


class ZeroDenominatorError(KernelError, ZeroDivisionError):
    def __init__(self, message="zero denominator", binding=None, position=None):
        super().__init__(message)
        self.binding = binding
        self.position = position


class PoleError(KernelError):
    pass


class UnassignedSymbolError(KernelError):
    pass


class LogNodeError(KernelError):
    pass


_ONE_POLY = Poly.const(1)


def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if den.is_zero():
        raise ZeroDenominatorError()
    if num.is_zero():
        return num, _ONE_POLY
    # rationalise away algebraic units in the denominator
    for i in TABLE.units:
        while exponent(den.support_mask(), i):
            conj = den.conjugate_unit(i)
            num, den = num * conj, den * conj
    c = den.const_value()
    if c is not None:
        return (num if c == 1 else num.scale(1 / c)), _ONE_POLY
    g = num.monomial_content()
    from .poly import mono_gcd

    g = mono_gcd(g, den.monomial_content())
    if g:
        num, den = num.div_monomial(g), den.div_monomial(g)
    if den.is_monomial():
        (m, c), = den.terms.items()
        if c != 1:
            num, den = num.scale(1 / c), Poly({m: Fraction(1)})
        return num, den
    q = num.exact_div(den)
    if q is not None:
        return q, _ONE_POLY
    return num, den


class Expr:
    """Immutable exact scalar expression."""

    __slots__ = ("num", "den", "logs")

    def __init__(self, num: Poly, den: Poly = _ONE_POLY, logs=(), *, normalized=False):
        if not normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self.logs: tuple[tuple[Expr, Expr], ...] = logs

    # -- constructors ---------------------------------------------------
    @staticmethod
    def const(c) -> "Expr":
        return Expr(Poly.const(c), normalized=True)

    @staticmethod
    def sym(s: Symbol, power: int = 1) -> "Expr":
        if power >= 0:
            return Expr(Poly.var(s, power), normalized=True)
        return Expr(_ONE_POLY, Poly.var(s, -power), normalized=True)

    @staticmethod
    def log(arg: "Expr") -> "Expr":
        arg = as_expr(arg)
        if arg.logs:
            raise LogNodeError("log argument must be log-free")
        if arg.is_zero():
            raise ZeroDenominatorError("log of zero")
        return Expr(Poly(), _ONE_POLY, ((ONE, arg),), normalized=True)

    # -- queries --------------------------------------------------------
    def rational_part(self) -> "Expr":
        return Expr(self.num, self.den, normalized=True) if self.logs else self

    def has_logs(self) -> bool:
        return bool(self.logs)

    def is_polynomial(self) -> bool:
        return not self.logs and self.den.is_const()

    def is_zero(self) -> bool:
        if not self.logs:
            return self.num.is_zero()
        if not self.num.is_zero():
            return False
        groups: list[tuple[Expr, Expr]] = []
        for c, u in self.logs:
            for k, (gu, gc) in enumerate(groups):
                if (gu - u).is_zero():
                    groups[k] = (gu, gc + c)
                    break
            else:
                groups.append((u, c))
        return all(gc.is_zero() for _, gc in groups)

    def const_value(self) -> Fraction | None:
        if self.logs or not self.den.is_const():
            return None
        return self.num.const_value()

    def symbols(self) -> set[Symbol]:
        ids = set(self.num.symbol_ids()) | set(self.den.symbol_ids())
        out = {TABLE.symbols[i] for i in ids}
        for c, u in self.logs:
            out |= c.symbols() | u.symbols()
        return out

    def depends_on(self, s: Symbol) -> bool:
        """Structural dependence, chain rule for opaque functions included."""
        for t in self.symbols():
            if t == s or (t.kind == S.FUNCTION and t.arg == s.name):
                return True
        return False

    def has_units(self) -> bool:
        return self.num.has_units() or self.den.has_units() or any(
            c.has_units() or u.has_units() for c, u in self.logs
        )

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other) -> "Expr":
        other = as_expr(other)
        if self.den == other.den:
            num, den = self.num + other.num, self.den
        elif other.den.is_const():
            num, den = self.num + other.num * self.den, self.den
        elif self.den.is_const():
            num, den = self.num * other.den + other.num, other.den
        else:
            num, den = self.num * other.den + other.num * self.den, self.den * other.den
        logs = _merge_logs(self.logs, other.logs)
        return Expr(num, den, logs)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(-self.num, self.den, tuple((-c, u) for c, u in self.logs), normalized=True)

    def __sub__(self, other) -> "Expr":
        return self + (-as_expr(other))

    def __rsub__(self, other) -> "Expr":
        return as_expr(other) - self

    def __mul__(self, other) -> "Expr":
        other = as_expr(other)
        if self.logs and other.logs:
            raise LogNodeError("product of two log-carrying expressions")
        if other.logs:
            return other * self
        rat = Expr(self.num * other.num, self.den * other.den)
        if not self.logs:
            return rat
        logs = tuple((c * other, u) for c, u in self.logs)
        return Expr(rat.num, rat.den, _merge_logs((), logs), normalized=True)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Expr":
        other = as_expr(other)
        if other.logs:
            raise LogNodeError("division by a log-carrying expression")
        if other.num.is_zero():
            raise ZeroDenominatorError("division by an identically zero expression")
        inv = Expr(other.den, other.num)
        return self * inv

    def __rtruediv__(self, other) -> "Expr":
        return as_expr(other) / self

    def __pow__(self, n: int) -> "Expr":
        if self.logs:
            if n == 1:
                return self
            raise LogNodeError("powers of log-carrying expressions are not supported")
        if n >= 0:
            return Expr(self.num**n, self.den**n)
        if self.num.is_zero():
            raise ZeroDenominatorError()
        return Expr(self.den ** (-n), self.num ** (-n))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("Expr is not hashable; equality is semantic")

    def __repr__(self):
        from .printing import to_str

        return f"Expr({to_str(self)})"

    def __str__(self):
        from .printing import to_str

        return to_str(self)

    # -- calculus -------------------------------------------------------
    def diff(self, v: Symbol) -> "Expr":
        return differentiate(self, v)

    def subs(self, bindings) -> "Expr":
        return substitute(self, bindings)


def _merge_logs(a, b):
    if not b:
        return a
    if not a:
        return tuple((c, u) for c, u in b if not c.is_zero())
    out = list(a)
    for c, u in b:
        for k, (oc, ou) in enumerate(out):
            if ou.num == u.num and ou.den == u.den:
                out[k] = (oc + c, ou)
                break
        else:
            out.append((c, u))
    return tuple((c, u) for c, u in out if not c.is_zero())


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Expr.const(x)
    if isinstance(x, Symbol):
        return Expr.sym(x)
    if isinstance(x, str):
        return Expr.const(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


ZERO = Expr.const(0)
ONE = Expr.const(1)
SQRT2 = Expr.sym(S.SQRT2)
I = Expr.sym(S.I_UNIT)


def sym(s: Symbol) -> Expr:
    return Expr.sym(s)


def _poly_diff(p: Poly, v: Symbol) -> Poly:
    """d/dv of a polynomial, with d f^(k)(v)/dv = f^(k+1)(v)."""
    vid = TABLE.index.get(v)
    out = p.diff(vid) if vid is not None else Poly()
    for i in p.symbol_ids():
        s = TABLE.symbols[i]
        if s.kind == S.FUNCTION and s.arg == v.name:
            out = out + p.diff(i) * Poly.var(s.derivative())
    return out


def differentiate(e: Expr, v: Symbol) -> Expr:
    e = as_expr(e)
    if v.kind != S.COORDINATE:
        raise TypeError(f"can only differentiate with respect to coordinates, not {v.name}")
    dn = _poly_diff(e.num, v)
    dd = _poly_diff(e.den, v)
    if dd.is_zero():
        rat = Expr(dn, e.den)
    else:
        rat = Expr(dn * e.den - e.num * dd, e.den * e.den)
    if not e.logs:
        return rat
    total = rat
    for c, u in e.logs:
        dc = differentiate(c, v)
        if not dc.is_zero():
            total = total + dc * Expr.log(u)
        du = differentiate(u, v)
        if not du.is_zero():
            total = total + c * du / u
    return total


def _bind_key(k) -> Symbol:
    if isinstance(k, Symbol):
        return k
    if isinstance(k, str):
        s = TABLE.by_name.get(k)
        if s is None:
            raise KeyError(f"unknown symbol {k!r}")
        return s
    raise TypeError(f"bad binding key {k!r}")


def substitute(e: Expr, bindings: Mapping) -> Expr:
    """Simultaneous substitution.

    Keys are Symbols (or names). To replace an opaque function bind its
    order-0 symbol (e.g. ``f``); derivative symbols ``f'``, ``f''`` are then
    replaced by derivatives of the bound expression in the argument
    coordinate. Rebinding a function's argument without also replacing the
    function is rejected.
    """
    e = as_expr(e)
    bind: dict[Symbol, Expr] = {_bind_key(k): as_expr(v) for k, v in bindings.items()}
    present = e.symbols()
    func_bases = {s.base: s for s in bind if s.kind == S.FUNCTION}
    for s in bind:
        if s.kind == S.FUNCTION and s.order != 0:
            raise ValueError("bind opaque functions through their order-0 symbol")
    # resolve opaque function derivative symbols present in e
    images: dict[int, Expr] = {}
    for s in present:
        if s.kind == S.FUNCTION:
            if s.base in func_bases:
                fs = func_bases[s.base]
                g = bind[fs]
                arg_sym = S.coordinate(s.arg)
                for _ in range(s.order):
                    g = differentiate(g, arg_sym)
                images[S.sid(s)] = g
            else:
                arg_sym = TABLE.by_name.get(s.arg)
                if arg_sym in bind and not (bind[arg_sym] - Expr.sym(arg_sym)).is_zero():
                    raise ValueError(
                        f"argument {s.arg} of opaque function {s.base} rebound without replacing {s.base}"
                    )
    for s, v in bind.items():
        if s.kind != S.FUNCTION and s in present:
            images[S.sid(s)] = v
    if not images:
        return e
    # function images are stated in pre-substitution coordinates; apply the
    # coordinate bindings to them as well so the substitution is simultaneous
    coord_images = {S.sid(s): v for s, v in bind.items() if s.kind != S.FUNCTION}
    for i in list(images):
        if TABLE.symbols[i].kind == S.FUNCTION and coord_images:
            images[i] = _subs_rational(images[i], coord_images, None)
    return _subs_all(e, images, bind)


def _subs_all(e: Expr, images: dict[int, Expr], bind) -> Expr:
    rat = _subs_rational(e, images, bind)
    if not e.logs:
        return rat
    logs = []
    for c, u in e.logs:
        cc = _subs_rational(c, images, bind)
        uu = _subs_rational(u, images, bind)
        if uu.is_zero():
            raise ZeroDenominatorError("log argument vanishes after substitution", binding=bind)
        logs.append((cc, uu))
    return Expr(rat.num, rat.den, _merge_logs((), tuple(logs)), normalized=True)


def _subs_poly(p: Poly, images: dict[int, Expr]) -> tuple[Poly, Poly]:
    """Return (N, M) with p(images) = N / M, M a product of image denominators."""
    if not p.terms:
        return Poly(), _ONE_POLY
    mask = p.support_mask()
    ids = [i for i, _ in decode(mask) if i in images]
    if not ids:
        return p, _ONE_POLY
    maxexp = {i: p.degree(i) for i in ids}
    # power caches
    num_pows: dict[int, list[Poly]] = {}
    den_pows: dict[int, list[Poly]] = {}
    for i in ids:
        im = images[i]
        if im.logs:
            raise LogNodeError("cannot substitute a log-carrying expression")
        numl, denl = [_ONE_POLY], [_ONE_POLY]
        for _ in range(maxexp[i]):
            numl.append(numl[-1] * im.num)
            if not im.den.is_const():
                denl.append(denl[-1] * im.den)
        num_pows[i], den_pows[i] = numl, denl
    total = Poly()
    from .symbols import BITS

    for m, c in p.terms.items():
        rest = m
        term = None
        for i in ids:
            e = exponent(m, i)
            rest -= e << (BITS * i)
            factor = num_pows[i][e]
            dl = den_pows[i]
            if len(dl) > 1:
                factor = factor * dl[maxexp[i] - e]
            term = factor if term is None else term * factor
        total = total + term.shift(rest, c)
    mult = _ONE_POLY
    for i in ids:
        dl = den_pows[i]
        if len(dl) > 1:
            mult = mult * dl[maxexp[i]]
    return total, mult


def _subs_rational(e: Expr, images, bind) -> Expr:
    n1, m1 = _subs_poly(e.num, images)
    d1, m2 = _subs_poly(e.den, images)
    if d1.is_zero():
        raise ZeroDenominatorError("substitution makes a denominator vanish", binding=bind)
    return Expr(n1 * m2, d1 * m1)


def eval_rational(e: Expr, point: Mapping) -> Fraction:
    """Exact value at a rational point (all symbols of e must be assigned)."""
    e = as_expr(e)
    if e.logs:
        raise LogNodeError("eval_rational does not evaluate log nodes")
    values: dict[int, Fraction] = {}
    for k, v in point.items():
        values[S.sid(_bind_key(k))] = Fraction(v)
    for s in e.symbols():
        if S.sid(s) not in values:
            if s.kind == S.UNIT:
                raise UnassignedSymbolError(f"{s.name} is irrational; no rational value")
            raise UnassignedSymbolError(f"symbol {s.display()} is not assigned")
    d = e.den.evaluate(values)
    if d == 0:
        raise PoleError("denominator vanishes at the point")
    return e.num.evaluate(values) / d


def is_zero(e) -> bool:
    return as_expr(e).is_zero()


def coefficients(e: Expr, syms) -> dict[tuple[int, ...], Expr]:
    """Split a polynomial dependence on ``syms``: e = sum_k c_k * syms**k.

    The denominator of ``e`` must not involve any of ``syms``; the returned
    coefficients are free of them.
    """
    e = as_expr(e)
    if e.logs:
        raise LogNodeError("coefficient extraction does not handle log nodes")
    ids = [S.sid(s) for s in syms]
    dmask = e.den.support_mask()
    if any(exponent(dmask, i) for i in ids):
        raise ValueError("denominator depends on the extraction symbols")
    from .symbols import BITS

    groups: dict[tuple[int, ...], dict[int, Fraction]] = {}
    for m, c in e.num.terms.items():
        key = tuple(exponent(m, i) for i in ids)
        rest = m
        for i, k in zip(ids, key):
            rest -= k << (BITS * i)
        groups.setdefault(key, {})[rest] = c
    return {k: Expr(Poly(v), e.den) for k, v in groups.items()}
