"""Plebanski metrics: tetrad, connection, curvature, ansatz and gauge maps."""

import random
from fractions import Fraction

import pytest

from nullstring.catalog import P, X, matrices_equal
from nullstring.geometry import (
    AnsatzCoefficients,
    GaugeTransform,
    PlebanskiMetric,
    ansatz_to_Q,
    build_tetrad,
    christoffel_oracle,
    connection,
    curvature,
    eth_Q_closed_form,
    frame_metric_check,
    metric_matrix,
    pullback,
    read_ansatz,
    sks_check,
    tetrad_duality_check,
    transform_coefficients,
)
from nullstring.kernel import eval_rational
from nullstring.verify import random_ansatz, random_gauge

q, p, x, y = (X(n) for n in "qpxy")
FLAT = PlebanskiMetric(0, 0, 0)


def test_flat_tetrad_constant():
    g = metric_matrix(FLAT)
    assert all(e.const_value() is not None for row in g for e in row)
    assert tetrad_duality_check(build_tetrad(FLAT))
    assert frame_metric_check(FLAT)


def test_flat_connection_and_curvature():
    conn = connection(FLAT)
    assert conn.undotted.is_zero() and conn.dotted.is_zero()
    rep = curvature(FLAT)
    assert all(v.is_zero() for v in rep.scalars().values())
    assert rep.CdotWeyl.is_zero() and rep.tracelessRicci.is_zero()
    assert sks_check(FLAT) == "sKS"


def test_flat_oracle():
    assert christoffel_oracle(metric_matrix(FLAT), FLAT.coords).scalar.is_zero()


def test_zero_ansatz_is_flat():
    m = ansatz_to_Q(AnsatzCoefficients())
    assert all(getattr(m, k).is_zero() for k in ("Q11", "Q12", "Q22"))


def test_dks_Q(dks):
    M0, N0 = P("M0"), P("N0")
    assert (dks.Q22 + (x * y * y + M0 * x + 3 * N0 * y)).is_zero()


def test_einstein_Q22(einstein):
    assert (einstein.Q22 - P("Lambda") / 3 * y * y).is_zero()


def test_dks_curvature(dks, dks_curv):
    rep = dks_curv
    assert rep.CdotWeyl.is_zero()
    assert rep.C1.is_zero() and rep.C2.is_zero()
    assert (rep.R - 24 * x).is_zero()
    assert eval_rational(rep.R, {"x": Fraction(1, 2)}) == 12
    assert sks_check(dks) == "dKS"


def test_dks_eth_Q_vanishes(dks):
    assert all(v.is_zero() for v in dks.eth_Q())


def test_dks_oracle(dks, dks_curv):
    ch = christoffel_oracle(metric_matrix(dks), dks.coords)
    assert (ch.scalar - dks_curv.R).is_zero()
    assert ch.einstein_constant(metric_matrix(dks)) is None


def test_einstein_f0_oracle(einstein0):
    g = metric_matrix(einstein0)
    ch = christoffel_oracle(g, einstein0.coords)
    assert (ch.einstein_constant(g) - P("Lambda")).is_zero()
    assert (ch.scalar + 4 * P("Lambda")).is_zero()


def test_traceless_ricci_first_block_vanishes(dks_curv):
    # C_{11 A. B.} is zero for every metric of this form
    T = dks_curv.tracelessRicci
    assert all(T[0, 0, c, d].is_zero() for c in (0, 1) for d in (0, 1))


@pytest.mark.parametrize("seed", range(5))
def test_random_ansatz_asd_flat(seed):
    c = random_ansatz(random.Random(seed))
    m = ansatz_to_Q(c)
    rep = curvature(m)
    assert rep.CdotWeyl.is_zero()
    assert (rep.R / 6 - (4 * (c.A[0] * x + c.A[1] * y) - 2 * c.B0)).is_zero()
    T = rep.tracelessRicci
    assert all(T[0, 0, a, b].is_zero() for a in (0, 1) for b in (0, 1))
    ch = christoffel_oracle(metric_matrix(m), m.coords)
    assert (ch.scalar - rep.R).is_zero()


@pytest.mark.parametrize("seed", range(3))
def test_eth_Q_closed_form(seed):
    c = random_ansatz(random.Random(100 + seed))
    m = ansatz_to_Q(c)
    assert all((a - b).is_zero() for a, b in zip(m.eth_Q(), eth_Q_closed_form(c)))


@pytest.mark.parametrize("seed", range(3))
def test_read_ansatz_inverts(seed):
    c = random_ansatz(random.Random(200 + seed))
    back = read_ansatz(ansatz_to_Q(c))
    assert all((a - b).is_zero() for a, b in zip(back.all_entries(), c.all_entries()))


def test_identity_gauge():
    t = GaugeTransform((q, p), (0, 0), (q, p))
    m = ansatz_to_Q(random_ansatz(random.Random(7)))
    m2 = t.apply(m)
    for k in ("Q11", "Q12", "Q22"):
        assert (getattr(m2, k) - getattr(m, k)).is_zero()


def test_singular_gauge_rejected():
    with pytest.raises(ValueError):
        GaugeTransform((p, p), (0, 0), (q, p))


@pytest.mark.parametrize("seed", range(3))
def test_gauge_pullback_and_laws(seed):
    rng = random.Random(300 + seed)
    t = random_gauge(rng)
    c = random_ansatz(rng, degree=1)
    m = ansatz_to_Q(c)
    m2 = t.apply(m)
    assert t.inverse_check()
    assert (t.delta_from_contraction() - t.delta()).is_zero()
    pb = pullback(metric_matrix(m2), t.forward(), m.coords, m.coords)
    assert matrices_equal(pb, metric_matrix(m))
    law, read = transform_coefficients(c, t), read_ansatz(m2)
    assert all((a - b).is_zero() for a, b in zip(law.all_entries(), read.all_entries()))


def test_sqrt2_cancels_in_reports(dks_curv):
    assert not any(v.has_units() for v in dks_curv.scalars().values())
