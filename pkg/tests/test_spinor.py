"""Two-component index calculus."""

import pytest
from hypothesis import given, settings, strategies as st

from nullstring import spinor as sp
from nullstring.kernel import ONE, ZERO, Expr, coordinate
from nullstring.spinor import D_LO, D_UP, U_LO, U_UP, SpinorIndexError, SpinorObject

x, y = Expr.sym(coordinate("x")), Expr.sym(coordinate("y"))


def vec(spec, a, b):
    return SpinorObject((spec,), [a, b])


def test_epsilon_tables():
    lo = sp.epsilon(sp.UNDOTTED, sp.LOWER)
    assert [lo[0, 1], lo[1, 0], lo[0, 0], lo[1, 1]] == [ONE, -ONE, ZERO, ZERO]
    up = sp.epsilon(sp.DOTTED, sp.UPPER)
    assert up[0, 1] == ONE and up[1, 0] == -ONE


@pytest.mark.parametrize("fam", [sp.UNDOTTED, sp.DOTTED])
def test_epsilon_inverse(fam):
    lo, up = sp.epsilon(fam, sp.LOWER), sp.epsilon(fam, sp.UPPER)
    for b in (0, 1):
        for c in (0, 1):
            total = sum((lo[a, c] * up[a, b] for a in (0, 1)), ZERO)
            assert (total - (1 if b == c else 0)).is_zero()


def test_lowering_example():
    m_lo = sp.raise_lower(vec(U_UP, ONE, ZERO), 0)
    assert m_lo.specs == (U_LO,)
    assert list(m_lo.entries) == [ZERO, -ONE]


def test_inner_sign_pair():
    a, m = x, y
    l_lo, m_lo = vec(U_LO, a, ZERO), vec(U_LO, ZERO, m)
    # l^A m_A and l_A m^A differ by a sign
    assert (sp.inner(l_lo, m_lo) - a * m).is_zero()
    assert (sp.inner(m_lo, l_lo) + a * m).is_zero()


def test_symmetrize_epsilon_vanishes():
    assert sp.symmetrize(sp.epsilon(), [0, 1]).is_zero()


def test_symmetrize_mixed_specs_rejected():
    s = SpinorObject((U_LO, U_UP), [x, y, x, y])
    with pytest.raises(SpinorIndexError):
        sp.symmetrize(s, [0, 1])


def test_delta_trace():
    assert sp.contract(sp.delta(), 0, 1).entries[0] == Expr.const(2)


def test_contract_errors():
    with pytest.raises(SpinorIndexError):
        sp.contract(SpinorObject((U_UP, D_LO), [x] * 4), 0, 1)
    with pytest.raises(SpinorIndexError):
        sp.contract(SpinorObject((U_LO, U_LO), [x] * 4), 0, 1)


def test_outer_rank():
    o = sp.outer(vec(U_LO, x, y), vec(D_UP, y, x))
    assert o.rank == 2 and o[1, 0] == y * y


def test_raise_family_independent():
    # dotted and undotted tables coincide, so a mixed object raises index-wise
    s = SpinorObject((U_LO, D_LO), [x, y, ONE, ZERO])
    r = sp.raise_all(s)
    assert sp.lower_all(r).equals(s)


atoms = st.sampled_from([ZERO, ONE, -ONE, x, y, x * y, x - 2 * y, (x + 1) / (y + 2)])
specs = st.sampled_from([U_LO, U_UP, D_LO, D_UP])


@st.composite
def spinors(draw, rank=None):
    k = draw(st.integers(1, 3)) if rank is None else rank
    sp_ = [draw(specs) for _ in range(k)]
    return SpinorObject(sp_, [draw(atoms) for _ in range(2**k)])


@settings(max_examples=60, deadline=None)
@given(spinors(), st.data())
def test_raise_lower_roundtrip(s, data):
    k = data.draw(st.integers(0, s.rank - 1))
    assert sp.raise_lower(sp.raise_lower(s, k), k).equals(s)


@settings(max_examples=60, deadline=None)
@given(atoms, atoms, atoms, atoms)
def test_contraction_sign_flip(a1, a2, b1, b2):
    a, b = vec(U_LO, a1, a2), vec(U_LO, b1, b2)
    au, bu = sp.raise_lower(a, 0), sp.raise_lower(b, 0)
    up_lo = sp.contract(sp.outer(au, b), 0, 1).entries[0]
    lo_up = sp.contract(sp.outer(a, bu), 0, 1).entries[0]
    assert (up_lo + lo_up).is_zero()
    assert sp.contract(sp.outer(au, a), 0, 1).entries[0].is_zero()


@settings(max_examples=40, deadline=None)
@given(spinors(rank=3))
def test_symmetrize_idempotent(s):
    s = SpinorObject([U_LO] * 3, s.entries)
    once = sp.symmetrize(s, [0, 1, 2])
    assert sp.symmetrize(once, [0, 1, 2]).equals(once)


@settings(max_examples=40, deadline=None)
@given(spinors(rank=3))
def test_symmetrize_commutes_with_raise_outside(s):
    s = SpinorObject([U_LO, U_LO, D_LO], s.entries)
    lhs = sp.raise_lower(sp.symmetrize(s, [0, 1]), 2)
    rhs = sp.symmetrize(sp.raise_lower(s, 2), [0, 1])
    assert lhs.equals(rhs)
