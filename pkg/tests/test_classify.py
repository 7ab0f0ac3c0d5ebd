"""Petrov-Penrose labels in the adapted tetrad."""

import random
from fractions import Fraction

import pytest

from nullstring.catalog import X, get_entry
from nullstring.classify import (
    NotAdaptedError,
    NotTypeDError,
    PetrovLabel,
    asd_label,
    classify,
    d_subtype,
    discriminant,
    petrov_type,
    second_principal_spinor,
)
from nullstring.congruence import petrov_decomposition_check
from nullstring.geometry import AnsatzCoefficients, PlebanskiMetric, ansatz_to_Q, curvature
from nullstring.verify import random_gauge

x, y = X("x"), X("y")
TARGET = "D^nn x [-]^e"


@pytest.mark.parametrize("args, want", [
    ((0, 0, 4 * x), "D"),
    ((0, 0, 0), "-"),
    ((1, 0, 0), "N"),
    ((0, 1, 0), "III"),
    ((1, 0, 1), "II"),
    ((2, 3, 3), "D"),  # 2*9 == 3*2*3
])
def test_petrov_type_table(args, want):
    assert petrov_type(*args) == want


def test_unadapted_tetrad():
    with pytest.raises(NotAdaptedError):
        petrov_type(0, 0, 1, C4=1)
    with pytest.raises(NotAdaptedError):
        petrov_type(0, 0, 1, C5=x)


def test_discriminant():
    assert discriminant(0, 0, 4 * x).is_zero()
    assert not discriminant(1, 0, 1).is_zero()


def test_second_principal_spinor_reproduces_weyl():
    from nullstring.geometry import assemble_weyl
    from nullstring.congruence import undotted

    C1, C2, C3 = 2 * x, 3 * x, 3 * x
    assert discriminant(C1, C2, C3).is_zero()
    l = second_principal_spinor(C2, C3)
    m = undotted(0, 1)
    assert petrov_decomposition_check(assemble_weyl(C1, C2, C3), [m, m, l, l])


@pytest.mark.parametrize("name", ("dks", "non-einstein-2", "einstein", "einstein-f0"))
def test_catalog_labels(name):
    m = get_entry(name).build()
    assert str(classify(m)) == TARGET
    assert d_subtype(m)[0] == "nn"


def test_dks_with_unit_parameters():
    m = get_entry("dks").build(M0=1, N0=0, P0=0)
    assert str(classify(m)) == TARGET


def test_asd_labels(dks):
    assert asd_label(dks) == "[-]^e"
    assert asd_label(PlebanskiMetric(0, 0, 0)) == "[-]^n"
    # only E nonzero: R = 0 identically
    m = ansatz_to_Q(AnsatzCoefficients(E=(1, x * 0 + 2, 3)))
    assert curvature(m).R.is_zero()
    assert asd_label(m) == "[-]^n"


def test_flat_label():
    assert str(classify(PlebanskiMetric(0, 0, 0))) == "[-] x [-]"


def test_not_sd():
    m = PlebanskiMetric(x**4, 0, 0)
    assert not curvature(m).CdotWeyl.is_zero()
    assert asd_label(m) == "not-SD"
    assert classify(m).label.asd == "not-SD"


def test_d_subtype_refuses_non_d():
    with pytest.raises(NotTypeDError):
        d_subtype(PlebanskiMetric(0, 0, 0))


def test_label_rendering():
    assert str(PetrovLabel("D", "nn", asd_decoration="e")) == TARGET
    assert str(PetrovLabel("N", "n", asd_decoration="n")) == "N^n x [-]^n"


def test_caveats_name_polynomials(dks):
    cav = classify(dks).caveats
    assert ("vanishing", "C3", "4*x") in cav
    assert ("vanishing", "R", "24*x") in cav
    assert all(len(c) == 3 and c[2] for c in cav)


def test_einstein_caveats_denominator(einstein):
    cav = classify(einstein).caveats
    assert ("denominator", "Q11", "Lambda") in cav


@pytest.mark.parametrize("seed", range(2))
def test_label_gauge_invariant(seed):
    t = random_gauge(random.Random(seed))
    for name in ("dks", "einstein-f0"):
        m = get_entry(name).build()
        assert str(classify(t.apply(m))) == TARGET


def test_type_d_with_expanding_second_congruence():
    # C2 = -18x^2, C1 = 54x^3, C3 = 4x satisfy 2 C2^2 = 3 C1 C3
    c = AnsatzCoefficients(A=(1, 0), C3=(0, 2, 0, 0), C1=(5, 0))
    m = ansatz_to_Q(c)
    rep = curvature(m)
    assert rep.CdotWeyl.is_zero()
    assert any(not v.is_zero() for v in m.eth_Q())
    assert petrov_type(rep.C1, rep.C2, rep.C3) == "D"
    marks, (first, second) = d_subtype(m, rep)
    assert marks == "ne"
    assert first.isNonexpanding and second.isIntegrable and not second.isNonexpanding
    assert (second.generator[1] + Fraction(3, 2) * x).is_zero()
    assert str(classify(m, rep)) == "D^ne x [-]^e"
