"""Covariant derivatives of spinor fields, null strings, recurrence, Killing."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import spinor as sp
from .geometry import (
    Connection,
    PlebanskiMetric,
    connection,
    curvature,
)
from .kernel import Expr, ZERO, ONE, as_expr, coordinate, differentiate
from .spinor import SpinorObject, U_LO, D_LO, UNDOTTED, LOWER, UPPER


class ZeroFieldError(ValueError):
    pass


def grad(f, m: PlebanskiMetric) -> SpinorObject:
    """partial_{A M} f as a (u_, d_) object."""
    f = as_expr(f)
    return SpinorObject.from_function((U_LO, D_LO), lambda a, c: m.frame_d(f, a, c))


def grad_log(f, m: PlebanskiMetric) -> SpinorObject:
    f = as_expr(f)
    return grad(f, m).map(lambda e: e / f)


def covariant_derivative(
    s: SpinorObject,
    m: PlebanskiMetric,
    conn: Connection | None = None,
    log_weight: Expr | None = None,
) -> SpinorObject:
    """nabla_{A M} s with the two new lower indices appended.

    Upper indices are lowered first and raised again afterwards (the
    connection is metric, so raising commutes with nabla). With
    ``log_weight`` phi the object is understood as exp(phi)*s and the
    result is exp(-phi) * nabla(exp(phi) s).
    """
    conn = conn or connection(m)
    upper = [k for k, spec in enumerate(s.specs) if spec.variance == UPPER]
    for k in upper:
        s = sp.raise_lower(s, k)
    n = s.rank
    G = conn.undotted
    Gd = conn.dotted
    eps_up = sp.EPS_UPPER
    dphi = None
    if log_weight is not None:
        phi = as_expr(log_weight)
        dphi = {(a, c): m.frame_d(phi, a, c) for a in (0, 1) for c in (0, 1)}

    def fn(*idx):
        body, (A, M) = idx[:n], idx[n:]
        v = m.frame_d(s[body], A, M)
        for k, spec in enumerate(s.specs):
            table = G if spec.family == UNDOTTED else Gd
            B = body[k]
            for S_ in (0, 1):
                for R_ in (0, 1):
                    w = eps_up[R_][S_]
                    if not w:
                        continue
                    g = table[R_, B, A, M]
                    if g.is_zero():
                        continue
                    j = list(body)
                    j[k] = S_
                    comp = s[tuple(j)]
                    if comp.is_zero():
                        continue
                    v = v - g * comp * w
        if dphi is not None:
            v = v + dphi[A, M] * s[body]
        return v

    out = SpinorObject.from_function(list(s.specs) + [U_LO, D_LO], fn)
    for k in upper:
        out = sp.raise_lower(out, k)
    return out


# ---------------------------------------------------------------------------
# null strings

@dataclass
class CongruenceData:
    generator: SpinorObject
    isIntegrable: bool
    sommers: SpinorObject | None = None  # Z_{A C.}
    expansion: SpinorObject | None = None  # M_{C.}
    isNonexpanding: bool = False
    log_weight: Expr | None = None
    obstruction: list = field(default_factory=list)  # m^A m^B nabla_{A C} m_B

    def as_dict(self):
        from .kernel import to_str

        out = {
            "generator": [to_str(e) for e in self.generator.entries],
            "integrable": self.isIntegrable,
            "nonexpanding": self.isNonexpanding,
        }
        if self.sommers is not None:
            out["sommers"] = [to_str(e) for e in self.sommers.entries]
            out["expansion"] = [to_str(e) for e in self.expansion.entries]
        return out


def _rank1_lower(s: SpinorObject) -> SpinorObject:
    if s.rank != 1 or s.specs[0].family != UNDOTTED:
        raise ValueError("generator must be a rank-1 undotted spinor")
    if s.specs[0].variance == UPPER:
        s = sp.raise_lower(s, 0)
    return s


def undotted(a, b) -> SpinorObject:
    return SpinorObject((U_LO,), [a, b])


def string_check(
    s: SpinorObject, m: PlebanskiMetric, conn: Connection | None = None, log_weight=None
) -> CongruenceData:
    """SD null string equations for the generator m_A and its decomposition

        nabla_{A C} m_B = Z_{A C} m_B + eps_{AB} M_C .
    """
    s = _rank1_lower(s)
    if s.is_zero():
        raise ZeroFieldError("generator is identically zero")
    conn = conn or connection(m)
    N = covariant_derivative(s, m, conn, log_weight)  # N[B, A, C]
    s_up = sp.raise_lower(s, 0)
    obstruction = []
    for c in (0, 1):
        v = ZERO
        for a, b in itertools.product((0, 1), repeat=2):
            v = v + s_up[a] * s_up[b] * N[b, a, c]
        obstruction.append(v)
    integrable = all(v.is_zero() for v in obstruction)
    data = CongruenceData(s, integrable, log_weight=log_weight, obstruction=obstruction)
    if not integrable:
        return data
    # m^B N_{BAC} = m_A M_C
    a0 = 0 if not s[0].is_zero() else 1
    M = [sum((s_up[b] * N[b, a0, c] for b in (0, 1)), ZERO) / s[a0] for c in (0, 1)]
    # n^B N_{BAC} = Z_{AC} (n^B m_B) + n_A M_C with n a basis spinor not parallel to m
    for n_low in (undotted(1, 0), undotted(0, 1)):
        n_up = sp.raise_lower(n_low, 0)
        nm = sum((n_up[b] * s[b] for b in (0, 1)), ZERO)
        if not nm.is_zero():
            break
    Z = SpinorObject.from_function(
        (U_LO, D_LO),
        lambda a, c: (sum((n_up[b] * N[b, a, c] for b in (0, 1)), ZERO) - n_low[a] * M[c]) / nm,
    )
    Mo = SpinorObject((D_LO,), M)
    eps = sp.epsilon(UNDOTTED, LOWER)
    recon = SpinorObject.from_function(
        N.specs, lambda b, a, c: Z[a, c] * s[b] + eps[a, b] * Mo[c]
    )
    if not recon.equals(N):
        raise AssertionError("null string decomposition failed to reconstruct nabla m")
    data.sommers = Z
    data.expansion = Mo
    data.isNonexpanding = Mo.is_zero()
    return data


def recurrence_vector(z: CongruenceData, s: CongruenceData) -> SpinorObject:
    """r = 2Z + 2S for two nonexpanding congruences."""
    for d in (z, s):
        if not d.isIntegrable or not d.isNonexpanding:
            raise ValueError("recurrence vector needs two nonexpanding congruences")
    return (z.sommers + s.sommers).scale(2)


def recurrence_residual(T: SpinorObject, r: SpinorObject, m: PlebanskiMetric, conn=None) -> SpinorObject:
    """nabla_{A M} T - r_{A M} T (derivative indices appended last)."""
    dT = covariant_derivative(T, m, conn)
    n = T.rank
    return SpinorObject.from_function(dT.specs, lambda *idx: dT[idx] - r[idx[n:]] * T[idx[:n]])


def recurrence_check(m: PlebanskiMetric, r: SpinorObject, T: SpinorObject | None = None, conn=None) -> bool:
    """nabla C = r C for the SD Weyl spinor (or any given T)."""
    if T is None:
        rep = curvature(m)
        T = rep.weyl_spinor()
    return recurrence_residual(T, r, m, conn).is_zero()


def zero_vector() -> SpinorObject:
    return SpinorObject.zeros((U_LO, D_LO))


# ---------------------------------------------------------------------------
# algebraic structure

class EmptyDecompositionError(ValueError):
    pass


def petrov_decomposition_check(C: SpinorObject, spinors: Sequence[SpinorObject]) -> bool:
    """C is a scalar multiple of the symmetrized product of ``spinors``."""
    if not spinors:
        return C.is_zero()
    if C.is_zero():
        raise EmptyDecompositionError("C vanishes identically; no principal spinors to compare")
    Pm = sp.symmetrized_product([_rank1_lower(s) for s in spinors])
    if len(Pm.specs) != C.rank:
        return False
    nz = Pm.nonzero_entries()
    if not nz:
        return False
    idx, pv = nz[0]
    lam = C[idx] / pv
    return (C - Pm.scale(lam)).is_zero()


def weyl_scale(C: SpinorObject, spinors) -> Expr | None:
    """kappa with C = kappa * sym(product), or None."""
    Pm = sp.symmetrized_product([_rank1_lower(s) for s in spinors])
    nz = Pm.nonzero_entries()
    if not nz:
        return None
    idx, pv = nz[0]
    lam = C[idx] / pv
    return lam if (C - Pm.scale(lam)).is_zero() else None


@dataclass
class RicciFactorization:
    factorizes: bool
    f_undotted: list | None = None  # f_{11}, f_{12}, f_{22}
    f_dotted: list | None = None
    f_undotted_square: Expr | None = None  # f_{AB} f^{AB}
    f_dotted_square: Expr | None = None

    @property
    def general_electromagnetic(self) -> bool:
        return bool(
            self.factorizes
            and not self.f_undotted_square.is_zero()
            and not self.f_dotted_square.is_zero()
        )


def _pair_square(f):
    """f_{AB} f^{AB} for symmetric f given as (f11, f12, f22)."""
    lo = SpinorObject.from_function((U_LO, U_LO), lambda a, b: f[a + b])
    up = sp.raise_all(lo)
    return sum((lo[a, b] * up[a, b] for a in (0, 1) for b in (0, 1)), ZERO)


def ricci_factorization(Cr: SpinorObject) -> RicciFactorization:
    """Test C_{AB C. D.} = f_{AB} f_{C. D.} (rank one across the index pairs)."""
    pairs = [(0, 0), (0, 1), (1, 1)]
    mat = [[Cr[a, b, c, d] for (c, d) in pairs] for (a, b) in pairs]
    for i, j in itertools.combinations(range(3), 2):
        for k, l in itertools.combinations(range(3), 2):
            if not (mat[i][k] * mat[j][l] - mat[i][l] * mat[j][k]).is_zero():
                return RicciFactorization(False)
    piv = next(((i, k) for i in range(3) for k in range(3) if not mat[i][k].is_zero()), None)
    if piv is None:
        return RicciFactorization(False)
    i, k = piv
    fu = [mat[r][k] for r in range(3)]
    fd = [mat[i][c] / mat[i][k] for c in range(3)]
    return RicciFactorization(True, fu, fd, _pair_square(fu), _pair_square(fd))


# ---------------------------------------------------------------------------
# curvature from the commutator of covariant derivatives

def commutator_curvature(m: PlebanskiMetric) -> dict[str, SpinorObject]:
    """SD Weyl, ASD Weyl and traceless Ricci spinors from [nabla, nabla].

    Normalized to the conventions of :func:`geometry.curvature`; used as an
    independent check of the closed curvature formulas.
    """
    conn = connection(m)
    eps_up = sp.EPS_UPPER
    eps_lo = sp.EPS_LOWER
    out = {}

    def second(kind):
        spec = U_LO if kind == "u" else D_LO
        res = []
        for S_ in (0, 1):
            basis = SpinorObject((spec,), [ONE if S_ == 0 else ZERO, ONE if S_ == 1 else ZERO])
            T1 = covariant_derivative(basis, m, conn)
            res.append(covariant_derivative(T1, m, conn))  # [C, B, Bd, A, Ad]
        return res

    def comm(T2, C, A, Ad, B, Bd):
        return T2[C, B, Bd, A, Ad] - T2[C, A, Ad, B, Bd]

    Tu = second("u")
    Td = second("d")
    X = {}  # X_{ABC}^S (undotted, SD)
    Y = {}  # dotted analogue (ASD)
    P = {}  # mixed
    R = (0, 1)
    for S_ in R:
        for A, B, C in itertools.product(R, repeat=3):
            X[A, B, C, S_] = sum(
                (comm(Tu[S_], C, A, Ad, B, Bd) * eps_up[Ad][Bd] for Ad in R for Bd in R if eps_up[Ad][Bd]), ZERO
            ) / 2
            P[A, B, C, S_] = sum(
                (comm(Td[S_], C, A, Ad, B, Bd) * eps_up[Ad][Bd] for Ad in R for Bd in R if eps_up[Ad][Bd]), ZERO
            ) / 2
        for Ad, Bd, C in itertools.product(R, repeat=3):
            Y[Ad, Bd, C, S_] = sum(
                (comm(Td[S_], C, A, Ad, B, Bd) * eps_up[A][B] for A in R for B in R if eps_up[A][B]), ZERO
            ) / 2

    def lower_last(T, specs):
        return SpinorObject.from_function(
            specs, lambda a, b, c, e: sum((T[a, b, c, s_] * eps_lo[s_][e] for s_ in R if eps_lo[s_][e]), ZERO)
        )

    Xs = sp.symmetrize(lower_last(X, [U_LO] * 4), range(4))
    Ys = sp.symmetrize(lower_last(Y, [D_LO] * 4), range(4))
    Pl = lower_last(P, [U_LO, U_LO, D_LO, D_LO])
    Ps = sp.symmetrize(sp.symmetrize(Pl, (0, 1)), (2, 3))
    out["sd"] = -Xs
    out["asd"] = Ys.scale(as_expr(-1) / 2)
    out["ricci"] = Ps.scale(as_expr(1) / 2)
    return out


def curvature_crosscheck(m: PlebanskiMetric) -> dict[str, bool]:
    rep = curvature(m)
    cc = commutator_curvature(m)
    return {
        "sd": cc["sd"].equals(rep.weyl_spinor()),
        "asd": cc["asd"].equals(rep.CdotWeyl),
        "ricci": cc["ricci"].equals(rep.tracelessRicci),
    }


# ---------------------------------------------------------------------------
# Killing vectors

def lie_derivative_metric(K: Sequence, g: Sequence[Sequence], coords: Sequence[str]) -> list[list[Expr]]:
    syms = [coordinate(c) for c in coords]
    n = len(syms)
    K = [as_expr(k) for k in K]
    g = [[as_expr(v) for v in row] for row in g]
    dK = [[differentiate(K[c], syms[a]) for a in range(n)] for c in range(n)]
    out = [[ZERO] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            v = ZERO
            for c in range(n):
                if not K[c].is_zero():
                    v = v + K[c] * differentiate(g[a][b], syms[c])
                v = v + g[c][b] * dK[c][a] + g[a][c] * dK[c][b]
            out[a][b] = out[b][a] = v
    return out


def killing_check(K: Sequence, g, coords) -> bool:
    L = lie_derivative_metric(K, g, coords)
    return all(v.is_zero() for row in L for v in row)


def lie_bracket(X: Sequence, Y: Sequence, coords) -> list[Expr]:
    syms = [coordinate(c) for c in coords]
    n = len(syms)
    X = [as_expr(v) for v in X]
    Y = [as_expr(v) for v in Y]
    return [
        sum((X[b] * differentiate(Y[a], syms[b]) - Y[b] * differentiate(X[a], syms[b]) for b in range(n)), ZERO)
        for a in range(n)
    ]
