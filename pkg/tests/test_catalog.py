"""Solution catalog: constraint systems, entries, transitions, Killing fields, slices."""

import dataclasses
from fractions import Fraction

import pytest

from nullstring import catalog as cat
from nullstring.catalog import P, X
from nullstring.classify import classify
from nullstring.geometry import AnsatzCoefficients, curvature, metric_matrix
from nullstring.kernel import ZERO, Expr

q, p, x, y = (X(n) for n in "qpxy")
Lam = P("Lambda")


def test_catalog_names():
    assert [e.name for e in cat.catalog()] == ["dks", "non-einstein-2", "einstein", "einstein-f0", "double-null"]
    with pytest.raises(cat.UnknownEntryError):
        cat.get_entry("kerr")


@pytest.mark.parametrize("name", list(cat.CATALOG))
def test_entry_self_test(name):
    checks = cat.get_entry(name).self_test()
    assert checks and all(c.ok for c in checks), [c.name for c in checks if not c.ok]


def test_self_test_with_bindings():
    assert all(c.ok for c in cat.get_entry("dks").self_test(M0=1, N0=0, P0=0))
    assert all(c.ok for c in cat.get_entry("einstein-f0").self_test(Lambda=3))


def test_residual_tally():
    tally = cat.residual_tally()
    assert sum(tally.values()) == 15
    assert tally == {"a": 3, "b": 2, "c": 2, "d": 4, "e": 1, "f": 3}


@pytest.mark.parametrize("coeffs", [cat.dks_coefficients, cat.non_einstein_2_coefficients])
def test_full_residuals_vanish(coeffs):
    res = cat.residuals_full(coeffs())
    assert len(res) == 15 and all(r.ok for r in res)


def test_perturbed_E12_breaks_block_b():
    c = cat.dks_coefficients()
    bad = dataclasses.replace(c, E=(c.E[0], c.E[1] + 1, c.E[2]))
    failing = {r.label for r in cat.residuals_full(bad) if not r.ok}
    assert "b1" in failing


def test_flat_ansatz_residuals():
    assert all(r.ok for r in cat.residuals_full(AnsatzCoefficients()))


def test_gauge_fixed_first_block():
    sol = cat.gauge_fixed_first_block()
    assert sol["S"].is_zero()
    assert (sol["C_1"] + 2 * P("N")).is_zero()
    assert (sol["C_2"] + 4 * P("P")).is_zero()


@pytest.mark.parametrize("coeffs", [cat.dks_coefficients, cat.non_einstein_2_coefficients])
def test_named_intermediate_relations(coeffs):
    checks = cat.non_einstein_named_checks(coeffs())
    names = {c.name for c in checks}
    assert "E_22 constant" in names and "6P + B12^2 - B11 B22 constant" in names
    assert all(c.ok for c in checks)


def test_einstein_residuals_opaque_f():
    assert all(r.ok for r in cat.residuals_einstein(cat.einstein_coefficients()))


def test_einstein_residuals_f0():
    assert all(r.ok for r in cat.residuals_einstein(cat.einstein_coefficients(f=ZERO)))


def test_einstein_needs_B0():
    with pytest.raises(cat.GenericityError):
        cat.residuals_einstein(AnsatzCoefficients())


def test_reduced_family_delta_free():
    # delta is not constrained by the final pair of equations
    fam = cat.einstein_reduced_family(beta=0, gamma=0, delta=1)
    assert all(g.is_zero() for g in cat.einstein_final_equations(fam))
    c = AnsatzCoefficients(B0=Lam / 3, C3=fam)
    c = dataclasses.replace(c, E=cat.einstein_E(c))
    assert all(r.ok for r in cat.residuals_einstein(c))


def test_einstein_variants_share_invariants(einstein, einstein0):
    for m in (einstein, einstein0):
        rep = curvature(m)
        assert rep.tracelessRicci.is_zero()
        assert (rep.R + 4 * Lam).is_zero()
        assert str(classify(m, rep)) == "D^nn x [-]^e"


def test_sks_degeneration():
    B0, P0 = P("B0"), P("P0")
    qq = cat.sks_degeneration()
    assert (qq - 2 * y * y * (3 * P0 - B0 * B0) * (x * x - 3 * P0)).is_zero()
    m = cat.get_entry("non-einstein-2").build(P0=B0 * B0 / 3)
    assert curvature(m).kerrSchildClass == "sKS"


def test_double_null_chain():
    checks = cat.double_null_transition()
    assert all(c.ok for c in checks)
    literal = [c for c in checks if c.name.startswith("literal")]
    assert literal and literal[0].detail == {"matches": False}


def test_double_null_potential_metric():
    g = cat.double_null_line_element()
    assert cat.matrices_equal(cat.potential_metric(cat.double_null_potential()), g)


def test_projective_opaque_f():
    assert all(c.ok for c in cat.projective_check())


def test_projective_flat_for_f0():
    G, Pm = cat.projective_data(ZERO)
    assert all(v.is_zero() for a in G for row in a for v in row)
    assert all(v.is_zero() for row in Pm for v in row)
    assert all(c.ok for c in cat.projective_check(f=ZERO))


def test_killing_suite():
    checks = cat.killing_suite()
    assert all(c.ok for c in checks)
    assert sum(c.name.startswith("K") and len(c.name) == 2 for c in checks) == 8


def test_killing_k7_at_lambda_3():
    g = metric_matrix(cat.get_entry("einstein-f0").build(Lambda=3))
    from nullstring.congruence import killing_check

    K7 = cat.killing_vectors(Expr.const(3))[6]
    assert killing_check(K7, g, "qpxy")
    K7_bad = cat.killing_vectors(Expr.const(3), drop_k7_constant=True)[6]
    assert not killing_check(K7_bad, g, "qpxy")


@pytest.mark.parametrize("F", [None, ZERO, p**3 / 6])
def test_general_killing(F):
    assert cat.general_killing_check(F=F)


@pytest.mark.parametrize("slice_name, lam, want", [
    ("riemannian", 3, "(++++)"),
    ("neutral-real", 3, "(++--)"),
    ("neutral-conjugate", 3, "(++--)"),
    ("riemannian", -3, "(----)"),
])
def test_slice_signature_origin(slice_name, lam, want):
    origin = {"a": 0, "b": 0, "c": 0, "d": 0}
    assert str(cat.slice_signature(slice_name, origin, lam)) == want


def test_slice_signature_generic_point():
    pt = {"a": Fraction(1, 3), "b": -1, "c": 2, "d": Fraction(1, 2)}
    assert str(cat.slice_signature("riemannian", pt, 3)) == "(++++)"


def test_unknown_slice():
    with pytest.raises((ValueError, KeyError)):
        cat.slice_map("lorentzian")


def test_line_element_factor():
    g = cat.line_element(("q", "p", "x", "y"), {("q", "x"): Expr.const(1)})
    # 1/2 ds^2 = dq dx gives g_qx = g_xq = 1
    assert g[0][2] == Expr.const(1) and g[2][0] == Expr.const(1)
