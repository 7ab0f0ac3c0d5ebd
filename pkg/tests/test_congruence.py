"""Null strings, recurrence, algebraic checks and Killing fields."""

import random

import pytest

from nullstring import spinor as sp
from nullstring.catalog import X, get_entry, killing_vectors
from nullstring.congruence import (
    EmptyDecompositionError,
    ZeroFieldError,
    covariant_derivative,
    curvature_crosscheck,
    grad,
    grad_log,
    killing_check,
    petrov_decomposition_check,
    recurrence_check,
    recurrence_residual,
    recurrence_vector,
    ricci_factorization,
    string_check,
    undotted,
    weyl_scale,
    zero_vector,
)
from nullstring.geometry import PlebanskiMetric, ansatz_to_Q, curvature, metric_matrix
from nullstring.kernel import SQRT2, ZERO, Expr
from nullstring.pipeline import normalized_recurrence
from nullstring.spinor import SpinorObject, U_LO
from nullstring.verify import random_ansatz

q, p, x, y = (X(n) for n in "qpxy")
CATALOG_PLEB = ("dks", "non-einstein-2", "einstein", "einstein-f0")


def test_nabla_constant_scalar(dks):
    t = covariant_derivative(SpinorObject.scalar(Expr.const(5)), dks)
    assert t.is_zero()


@pytest.mark.parametrize("name", CATALOG_PLEB)
def test_nabla_epsilon_vanishes(name):
    m = get_entry(name).build()
    assert covariant_derivative(sp.epsilon(sp.UNDOTTED), m).is_zero()
    assert covariant_derivative(sp.epsilon(sp.DOTTED), m).is_zero()
    assert covariant_derivative(sp.epsilon(sp.UNDOTTED, sp.UPPER), m).is_zero()


def test_m_congruence_on_dks(dks):
    d = string_check(undotted(0, 1), dks)
    assert d.isIntegrable and d.isNonexpanding
    # Z_{1M} = 0, Z_{2M} = (sqrt2/2) d^A Q_{AM}
    dQ = dks.d_up_Q()
    for c in (0, 1):
        assert d.sommers[0, c].is_zero()
        assert (d.sommers[1, c] - SQRT2 / 2 * dQ[c]).is_zero()
    assert not d.sommers.is_zero()


def test_l_congruence_on_dks(dks):
    d = string_check(undotted(1, 0), dks)
    assert d.isIntegrable and d.isNonexpanding
    assert not d.sommers.is_zero()


def test_l_expands_on_random_ansatz():
    for seed in range(20):
        m = ansatz_to_Q(random_ansatz(random.Random(seed)))
        if any(not v.is_zero() for v in m.eth_Q()):
            break
    d = string_check(undotted(1, 0), m)
    assert not (d.isIntegrable and d.isNonexpanding)


def test_zero_generator(dks):
    with pytest.raises(ZeroFieldError):
        string_check(undotted(0, 0), dks)


def test_recurrence_on_dks(dks, dks_curv):
    r, normalized = normalized_recurrence(dks, dks_curv)
    assert normalized
    assert r.equals(grad_log(dks_curv.R, dks))
    assert recurrence_check(dks, r)
    assert not recurrence_check(dks, zero_vector())
    # nabla R = r R follows
    lhs = grad(dks_curv.R, dks)
    assert (lhs - r.map(lambda e: e * dks_curv.R)).is_zero()


def test_unnormalized_sommers_cancel(dks):
    z = string_check(undotted(0, 1), dks)
    s = string_check(undotted(1, 0), dks)
    assert recurrence_vector(z, s).is_zero()


def test_dotted_ricci_not_recurrent(dks, dks_curv):
    r, _ = normalized_recurrence(dks, dks_curv)
    assert not recurrence_residual(dks_curv.tracelessRicci, r, dks).is_zero()


def test_einstein_conformally_symmetric(einstein0):
    assert recurrence_check(einstein0, zero_vector())
    r, _ = normalized_recurrence(einstein0)
    assert recurrence_check(einstein0, r)


def test_recurrence_vector_rejects_expanding():
    for seed in range(20):
        m = ansatz_to_Q(random_ansatz(random.Random(seed)))
        d = string_check(undotted(1, 0), m)
        if not d.isNonexpanding:
            break
    z = string_check(undotted(0, 1), m)
    with pytest.raises(ValueError):
        recurrence_vector(z, d)


def test_both_zero_sommers():
    flat = PlebanskiMetric(0, 0, 0)
    z = string_check(undotted(0, 1), flat)
    s = string_check(undotted(1, 0), flat)
    assert recurrence_vector(z, s).is_zero()


def test_petrov_decomposition(dks_curv):
    C = dks_curv.weyl_spinor()
    m, l = undotted(0, 1), undotted(1, 0)
    assert petrov_decomposition_check(C, [m, m, l, l])
    assert not petrov_decomposition_check(C, [m, l, l, l])
    assert (weyl_scale(C, [m, m, l, l]) - 24 * x).is_zero()


def test_petrov_decomposition_empty():
    zero = SpinorObject.zeros([U_LO] * 4)
    assert petrov_decomposition_check(zero, [])
    with pytest.raises(EmptyDecompositionError):
        petrov_decomposition_check(zero, [undotted(0, 1)] * 4)


def test_petrov_decomposition_generic_fails():
    rng = random.Random(5)
    C = sp.symmetrize(SpinorObject([U_LO] * 4, [Expr.const(rng.randint(-3, 3)) for _ in range(16)]), range(4))
    spinors = [undotted(rng.randint(1, 3), rng.randint(1, 3)) for _ in range(4)]
    assert not petrov_decomposition_check(C, spinors)


@pytest.mark.parametrize("name", ("dks", "non-einstein-2"))
def test_ricci_general_electromagnetic(name):
    rep = curvature(get_entry(name).build())
    fac = ricci_factorization(rep.tracelessRicci)
    assert fac.factorizes and fac.general_electromagnetic


@pytest.mark.parametrize("name", ("dks", "einstein-f0"))
def test_commutator_crosscheck(name):
    assert all(curvature_crosscheck(get_entry(name).build()).values())


@pytest.mark.parametrize("name", CATALOG_PLEB)
def test_nonexpanding_generators_are_principal(name):
    m = get_entry(name).build()
    C = curvature(m).weyl_spinor()
    for s in (undotted(0, 1), undotted(1, 0)):
        if string_check(s, m).isNonexpanding:
            # a repeated principal spinor: C = s s a b for the other generator
            other = undotted(1, 0) if s[0].is_zero() else undotted(0, 1)
            assert petrov_decomposition_check(C, [s, s, other, other])


def test_killing_examples(einstein0):
    g = metric_matrix(einstein0)
    assert killing_check([0, q, 0, x], g, "qpxy")  # K5
    assert not killing_check([0, 0, x, 0], g, "qpxy")
    K = killing_vectors(Expr.const(3))
    g3 = metric_matrix(get_entry("einstein-f0").build(Lambda=3))
    assert killing_check(K[6], g3, "qpxy")


def test_translations_on_flat():
    g = metric_matrix(PlebanskiMetric(0, 0, 0))
    for k in range(4):
        v = [ZERO] * 4
        v[k] = Expr.const(1)
        assert killing_check(v, g, "qpxy")
