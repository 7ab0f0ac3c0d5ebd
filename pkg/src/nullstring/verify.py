"""Named verification suites shared by the CLI and the test-suite.

Every suite returns a list of :class:`Check`; a suite passes when all its
checks do. Randomized suites use fixed seeds so runs are reproducible.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from . import spinor as sp
from .catalog import (
    Check,
    P,
    X,
    dks_coefficients,
    double_null_transition,
    einstein_coefficients,
    einstein_E,
    einstein_final_equations,
    einstein_reduced_family,
    gauge_fixed_first_block,
    get_entry,
    killing_suite,
    matrices_equal,
    non_einstein_2_coefficients,
    non_einstein_named_checks,
    projective_check,
    residuals_einstein,
    residuals_full,
    slice_signature,
    sks_degeneration,
    general_killing_check,
)
from .classify import classify, discriminant, petrov_type
from .congruence import (
    grad_log,
    petrov_decomposition_check,
    recurrence_check,
    recurrence_residual,
    string_check,
    undotted,
    zero_vector,
)
from .geometry import (
    AnsatzCoefficients,
    GaugeTransform,
    ansatz_to_Q,
    christoffel_oracle,
    curvature,
    metric_matrix,
    pullback,
    read_ansatz,
    sks_check,
    transform_coefficients,
)
from .pipeline import normalized_recurrence
from .kernel import ZERO, Expr, as_expr, coordinate, differentiate, substitute
from .spinor import SpinorObject, U_LO, U_UP, D_LO, D_UP

SEED = 20240517


def random_poly(rng: random.Random, degree=2, coords=("q", "p")) -> Expr:
    """Small-integer polynomial of total degree <= ``degree`` in two coordinates."""
    a, b = (X(c) for c in coords)
    e = ZERO
    for i in range(degree + 1):
        for j in range(degree + 1 - i):
            e = e + rng.randint(-2, 2) * a**i * b**j
    return e


def random_ansatz(rng: random.Random, degree=2) -> AnsatzCoefficients:
    return AnsatzCoefficients.from_entries([random_poly(rng, degree) for _ in range(15)])


def random_gauge(rng: random.Random) -> GaugeTransform:
    """Triangular q'^1 = a q + h(p), q'^2 = b p + c with an explicit inverse and random sigma."""
    q, p = X("q"), X("p")
    a = rng.choice([1, 2, -3, Fraction(1, 2)])
    b = rng.choice([1, -1, 2])
    c0 = rng.randint(-2, 2)
    h = rng.randint(-2, 2) * p * p + rng.randint(-2, 2) * p
    pold = (p - c0) / b
    qold = ((q - substitute(h, {coordinate("p"): pold})) / a, pold)
    sigma = (random_poly(rng, 1), random_poly(rng, 1))
    return GaugeTransform((a * q + h, b * p + c0), sigma, qold)


def _all(checks) -> bool:
    return all(c.ok for c in checks)


# -- 1 ----------------------------------------------------------------------

def suite_ansatz(n=5) -> list[Check]:
    rng = random.Random(SEED)
    out = []
    x, y = X("x"), X("y")
    for k in range(n):
        c = random_ansatz(rng)
        m = ansatz_to_Q(c)
        rep = curvature(m)
        out.append(Check(f"set {k + 1}: ASD Weyl vanishes", rep.CdotWeyl.is_zero()))
        # A_N p^N - with A^N p_N = -A_N p^N under the eps conventions
        AN_pN = c.A[0] * x + c.A[1] * y
        out.append(Check(f"set {k + 1}: R/6 = 4 A_N p^N - 2B", (rep.R / 6 - (4 * AN_pN - 2 * c.B0)).is_zero()))
        out.append(Check(f"set {k + 1}: R = 6 C3", (rep.R - 6 * rep.C3).is_zero()))
        ch = christoffel_oracle(metric_matrix(m), m.coords)
        out.append(Check(f"set {k + 1}: oracle scalar curvature", (ch.scalar - rep.R).is_zero()))
    return out


# -- 2 ----------------------------------------------------------------------

def suite_residuals() -> list[Check]:
    out = []
    for name, c in (("case (i)", dks_coefficients()), ("cases (ii)/(iii)", non_einstein_2_coefficients())):
        res = residuals_full(c)
        out.append(Check(f"{name}: {len(res)} residuals vanish", len(res) == 15 and all(r.ok for r in res)))
        out.append(Check(f"{name}: intermediate relations", _all(non_einstein_named_checks(c))))
    sol = gauge_fixed_first_block()
    N, Pp = P("N"), P("P")
    out.append(Check(
        "first block forces S = 0, C_1 = -2N, C_2 = -4P",
        sol is not None and sol["S"].is_zero() and (sol["C_1"] + 2 * N).is_zero() and (sol["C_2"] + 4 * Pp).is_zero(),
    ))
    c = einstein_coefficients()
    out.append(Check("Einstein solution (opaque f): residuals vanish", all(r.ok for r in residuals_einstein(c))))
    out.append(Check("Einstein solution: full 15 residuals vanish", all(r.ok for r in residuals_full(c))))
    out.append(Check("Einstein E_AB solved from the second block",
                     all((a - b).is_zero() for a, b in zip(einstein_E(c), c.E))))
    fam = einstein_reduced_family()
    out.append(Check("M = N = 0 family solves the final pair", all(g.is_zero() for g in einstein_final_equations(fam))))
    cf = AnsatzCoefficients(B0=P("Lambda") / 3, C3=fam)
    cf = AnsatzCoefficients(B0=cf.B0, C3=cf.C3, E=einstein_E(cf))
    out.append(Check("M = N = 0 family solves the Einstein system", all(r.ok for r in residuals_einstein(cf))))
    return out


# -- 3 ----------------------------------------------------------------------

def suite_curvature() -> list[Check]:
    out = []
    m = get_entry("dks").build()
    rep = curvature(m)
    x = X("x")
    out.append(Check("dks: ASD Weyl vanishes", rep.CdotWeyl.is_zero()))
    out.append(Check("dks: C1 = C2 = 0", rep.C1.is_zero() and rep.C2.is_zero()))
    out.append(Check("dks: C3 = 4x, R = 24x", (rep.C3 - 4 * x).is_zero() and (rep.R - 24 * x).is_zero()))
    ch = christoffel_oracle(metric_matrix(m), m.coords)
    out.append(Check("dks: oracle R = 24x", (ch.scalar - 24 * x).is_zero()))
    out.append(Check("dks: dKS class", sks_check(m) == "dKS"))
    e = get_entry("einstein").build()
    rep = curvature(e)
    Lam = P("Lambda")
    out.append(Check("einstein (opaque f): traceless Ricci vanishes", rep.tracelessRicci.is_zero()))
    out.append(Check("einstein (opaque f): R = -4 Lambda", (rep.R + 4 * Lam).is_zero()))
    g = metric_matrix(e)
    ch = christoffel_oracle(g, e.coords)
    lam = ch.einstein_constant(g)
    out.append(Check("einstein (opaque f): oracle Ric = Lambda g", lam is not None and (lam - Lam).is_zero()))
    out.append(Check("einstein (opaque f): oracle R = -4 Lambda", (ch.scalar + 4 * Lam).is_zero()))
    n2 = get_entry("non-einstein-2").build()
    rep = curvature(n2)
    out.append(Check("non-einstein-2: type D", petrov_type(rep.C1, rep.C2, rep.C3) == "D"))
    out.append(Check("non-einstein-2: dKS for generic B0, P0", sks_check(n2) == "dKS"))
    B0, P0 = P("B0"), P("P0")
    qq = sks_degeneration()
    out.append(Check("non-einstein-2: Q.Q = 2y^2 (3P0 - B0^2)(x^2 - 3P0)",
                     (qq - 2 * X("y") ** 2 * (3 * P0 - B0 * B0) * (x * x - 3 * P0)).is_zero()))
    n2s = get_entry("non-einstein-2").build(P0=B0 * B0 / 3)
    out.append(Check("non-einstein-2: sKS at 3 P0 = B0^2", sks_check(n2s) == "sKS"))
    return out


# -- 4 ----------------------------------------------------------------------

def suite_classification() -> list[Check]:
    out = []
    for name in ("dks", "non-einstein-2", "einstein"):
        m = get_entry(name).build()
        rep = curvature(m)
        cls = classify(m, rep)
        out.append(Check(f"{name}: label D^nn x [-]^e", str(cls) == "D^nn x [-]^e", str(cls)))
        out.append(Check(f"{name}: discriminant vanishes, C3 nonzero",
                         discriminant(rep.C1, rep.C2, rep.C3).is_zero() and not rep.C3.is_zero()))
        gens = {}
        for g_name, s in (("m", undotted(0, 1)), ("l", undotted(1, 0))):
            d = string_check(s, m)
            gens[g_name] = d
            out.append(Check(f"{name}: {g_name} integrable and nonexpanding", d.isIntegrable and d.isNonexpanding))
        out.append(Check(f"{name}: R nonzero", not rep.R.is_zero()))
        C = rep.weyl_spinor()
        out.append(Check(f"{name}: C = k m(A m_B l_C l_D)",
                         petrov_decomposition_check(C, [undotted(0, 1)] * 2 + [undotted(1, 0)] * 2)))
    return out


# -- 5 ----------------------------------------------------------------------

def suite_recurrence() -> list[Check]:
    out = []
    for name in ("dks", "non-einstein-2"):
        m = get_entry(name).build()
        rep = curvature(m)
        r, _ = normalized_recurrence(m, rep)
        out.append(Check(f"{name}: r = 2Z + 2S = d ln R", r.equals(grad_log(rep.R, m))))
        out.append(Check(f"{name}: nabla C = r C", recurrence_check(m, r)))
        out.append(Check(f"{name}: r = 0 fails", not recurrence_check(m, zero_vector())))
        out.append(Check(f"{name}: dotted Ricci recurrence fails",
                         not recurrence_residual(rep.tracelessRicci, r, m).is_zero()))
    for name in ("einstein-f0", "einstein"):
        m = get_entry(name).build()
        out.append(Check(f"{name}: nabla C = 0", recurrence_check(m, zero_vector())))
        r, _ = normalized_recurrence(m)
        out.append(Check(f"{name}: 2Z + 2S = 0", r.is_zero()))
    return out


# -- 6 -- 9 -------------------------------------------------------------------

def suite_killing() -> list[Check]:
    out = killing_suite()
    out.append(Check("general Killing field, opaque F", general_killing_check()))
    return out


def suite_double_null() -> list[Check]:
    return double_null_transition()


def suite_projective() -> list[Check]:
    out = projective_check()
    out += [Check(f"f = 0: {c.name}", c.ok) for c in projective_check(f=ZERO)]
    return out


def suite_signature() -> list[Check]:
    origin = {"a": 0, "b": 0, "c": 0, "d": 0}
    out = []
    for sl, lam, want in (
        ("riemannian", 3, "(++++)"),
        ("riemannian", Fraction(1, 2), "(++++)"),
        ("neutral-real", 3, "(++--)"),
        ("riemannian", -3, "(----)"),
    ):
        s = slice_signature(sl, origin, lam)
        out.append(Check(f"{sl}, Lambda={lam}: {want}", str(s) == want, str(s)))
    pt = {"a": 1, "b": 2, "c": -1, "d": Fraction(1, 2)}
    s = slice_signature("riemannian", pt, 3)
    out.append(Check("riemannian at a generic point: (++++)", str(s) == "(++++)", str(s)))
    return out


# -- 10 ---------------------------------------------------------------------

def suite_gauge(n=3) -> list[Check]:
    rng = random.Random(SEED + 1)
    out = []
    for k in range(n):
        t = random_gauge(rng)
        c = random_ansatz(rng, degree=1)
        m = ansatz_to_Q(c)
        m2 = t.apply(m)
        pb = pullback(metric_matrix(m2), t.forward(), m.coords, m.coords)
        out.append(Check(f"transform {k + 1}: inverse", t.inverse_check()))
        out.append(Check(f"transform {k + 1}: pullback equals the old metric", matrices_equal(pb, metric_matrix(m))))
        c_law = transform_coefficients(c, t)
        c_read = read_ansatz(m2)
        out.append(Check(f"transform {k + 1}: coefficient laws commute with read_ansatz",
                         all((a - b).is_zero() for a, b in zip(c_law.all_entries(), c_read.all_entries()))))
        r1, r2 = curvature(m), curvature(m2)
        v1 = (petrov_type(r1.C1, r1.C2, r1.C3), r1.R.is_zero(), r1.CdotWeyl.is_zero())
        v2 = (petrov_type(r2.C1, r2.C2, r2.C3), r2.R.is_zero(), r2.CdotWeyl.is_zero())
        out.append(Check(f"transform {k + 1}: random ansatz verdicts", v1 == v2, f"{v1} vs {v2}"))
        for name in ("dks", "non-einstein-2", "einstein-f0"):
            mc = get_entry(name).build()
            lab = str(classify(t.apply(mc)))
            out.append(Check(f"transform {k + 1}: {name} label", lab == "D^nn x [-]^e", lab))
    return out


# -- 11 ---------------------------------------------------------------------

def _rand_expr(rng: random.Random) -> Expr:
    syms = [X(n) for n in ("q", "p", "x", "y")]
    e = ZERO
    for _ in range(rng.randint(1, 4)):
        t = as_expr(Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
        for s in syms:
            t = t * s ** rng.randint(0, 2)
        e = e + t
    if rng.random() < 0.5:
        d = ZERO
        for s in syms[:2]:
            d = d + rng.randint(1, 3) * s ** rng.randint(0, 1)
        d = d + 1
        e = e / d
    return e


def _rand_spinor(rng: random.Random, rank=None):
    rank = rank if rank is not None else rng.randint(1, 3)
    specs = [rng.choice([U_LO, U_UP, D_LO, D_UP]) for _ in range(rank)]
    return SpinorObject(specs, [_rand_expr(rng) for _ in range(2**rank)])


def kernel_derivation_checks(n=100) -> list[Check]:
    rng = random.Random(SEED + 11)
    bad = 0
    for _ in range(n):
        a, b = _rand_expr(rng), _rand_expr(rng)
        v = coordinate(rng.choice("qpxy"))
        lhs = differentiate(a * b, v)
        rhs = a * differentiate(b, v) + b * differentiate(a, v)
        bad += not (lhs - rhs).is_zero()
    return [Check(f"derivation law, {n} instances", bad == 0, {"failures": bad})]


def epsilon_checks(n=100) -> list[Check]:
    rng = random.Random(SEED + 12)
    out = []
    for fam in (sp.UNDOTTED, sp.DOTTED):
        lo, up = sp.epsilon(fam, sp.LOWER), sp.epsilon(fam, sp.UPPER)
        ok = all(
            (sum((lo[a, c] * up[a, b] for a in (0, 1)), ZERO) - (1 if b == c else 0)).is_zero()
            for b in (0, 1) for c in (0, 1)
        )
        out.append(Check(f"eps_AC eps^AB = delta ({fam})", ok))
    bad = 0
    for _ in range(n):
        spec = rng.choice([U_LO, D_LO])
        a = SpinorObject((spec,), [_rand_expr(rng), _rand_expr(rng)])
        b = SpinorObject((spec,), [_rand_expr(rng), _rand_expr(rng)])
        au, bu = sp.raise_lower(a, 0), sp.raise_lower(b, 0)
        # a^B b_B = -a_B b^B, m^A m_A = 0, contraction of eps with itself = 2
        s1 = sum((au[i] * b[i] for i in (0, 1)), ZERO)
        s2 = sum((a[i] * bu[i] for i in (0, 1)), ZERO)
        s3 = sum((au[i] * a[i] for i in (0, 1)), ZERO)
        # m_A = eps_AB m^B entrywise
        s4 = [a[i] - sum((sp.EPS_LOWER[i][j] * au[j] for j in (0, 1)), ZERO) for i in (0, 1)]
        bad += not ((s1 + s2).is_zero() and s3.is_zero() and all(e.is_zero() for e in s4))
    out.append(Check(f"eps contraction identities, {n} instances", bad == 0, {"failures": bad}))
    return out


def roundtrip_checks(n=100) -> list[Check]:
    rng = random.Random(SEED + 13)
    bad = 0
    for _ in range(n):
        s = _rand_spinor(rng)
        k = rng.randrange(s.rank)
        bad += not sp.raise_lower(sp.raise_lower(s, k), k).equals(s)
    return [Check(f"raise/lower round trips, {n} instances", bad == 0, {"failures": bad})]


def suite_kernel(n=100) -> list[Check]:
    return kernel_derivation_checks(n) + epsilon_checks(n) + roundtrip_checks(n)


SUITES: dict[str, tuple[str, Callable[[], list[Check]]]] = {
    "ansatz": ("ASD-flatness of the cubic ansatz", suite_ansatz),
    "residuals": ("constraint residuals", suite_residuals),
    "curvature": ("catalog curvature", suite_curvature),
    "classification": ("classification D^nn x [-]^e", suite_classification),
    "recurrence": ("conformal recurrence", suite_recurrence),
    "killing": ("Killing vectors", suite_killing),
    "double-null": ("double-null chain", suite_double_null),
    "projective": ("projective embedding", suite_projective),
    "signature": ("real-slice signatures", suite_signature),
    "gauge": ("gauge invariance", suite_gauge),
    "kernel": ("kernel properties", suite_kernel),
}


class UnknownSuiteError(KeyError):
    pass


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise UnknownSuiteError(f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    return SUITES[name][1]()
