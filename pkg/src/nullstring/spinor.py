"""Two-component spinor index calculus.

Objects are dense: a rank-n :class:`SpinorObject` stores all ``2**n``
entries in row-major order, index values 0 and 1 standing for 1 and 2
(or 1-dot and 2-dot). Index symmetries are never assumed by storage.

Conventions::

    eps_{AB} = eps^{AB} = [[0, 1], [-1, 0]]
    m_A = eps_{AB} m^B,      m^A = m_B eps^{BA}

so that ``eps_{AC} eps^{AB} = delta_C^B`` and lowering then raising is
the identity. Dotted indices use the same tables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .kernel import Expr, ZERO, ONE, as_expr

UNDOTTED = "undotted"
DOTTED = "dotted"
UPPER = "upper"
LOWER = "lower"

# The one epsilon table. Tests monkeypatch these to check that a sign
# error is caught by the identity suites.
EPS_LOWER = ((0, 1), (-1, 0))
EPS_UPPER = ((0, 1), (-1, 0))


@dataclass(frozen=True)
class IndexSpec:
    family: str
    variance: str

    def __post_init__(self):
        if self.family not in (UNDOTTED, DOTTED) or self.variance not in (UPPER, LOWER):
            raise ValueError(f"bad index spec {self.family}/{self.variance}")

    def flipped(self) -> "IndexSpec":
        return IndexSpec(self.family, LOWER if self.variance == UPPER else UPPER)

    def __str__(self):
        return ("d" if self.family == DOTTED else "u") + ("^" if self.variance == UPPER else "_")


U_UP = IndexSpec(UNDOTTED, UPPER)
U_LO = IndexSpec(UNDOTTED, LOWER)
D_UP = IndexSpec(DOTTED, UPPER)
D_LO = IndexSpec(DOTTED, LOWER)


class SpinorIndexError(ValueError):
    pass


def _specs(specs) -> tuple[IndexSpec, ...]:
    out = []
    for s in specs:
        if isinstance(s, IndexSpec):
            out.append(s)
        else:
            # short forms "u_", "u^", "d_", "d^"
            fam = {"u": UNDOTTED, "d": DOTTED}[s[0]]
            var = {"_": LOWER, "^": UPPER}[s[1]]
            out.append(IndexSpec(fam, var))
    return tuple(out)


def index_label(spec: IndexSpec, value: int) -> str:
    """Display form of an index value: 1, 2 or 1-dot, 2-dot."""
    return f"{value + 1}" + ("̇" if spec.family == DOTTED else "")


class SpinorObject:
    """Immutable dense array of Exprs over 2-valued spinor indices."""

    __slots__ = ("specs", "entries")

    def __init__(self, specs: Sequence, entries: Sequence):
        self.specs = _specs(specs)
        entries = tuple(as_expr(e) for e in entries)
        if len(entries) != 2 ** len(self.specs):
            raise SpinorIndexError(f"{len(entries)} entries for rank {len(self.specs)}")
        self.entries = entries

    # -- construction ---------------------------------------------------
    @classmethod
    def from_function(cls, specs, fn: Callable[..., object]) -> "SpinorObject":
        specs = _specs(specs)
        return cls(specs, [fn(*idx) for idx in itertools.product((0, 1), repeat=len(specs))])

    @classmethod
    def zeros(cls, specs) -> "SpinorObject":
        specs = _specs(specs)
        return cls(specs, [ZERO] * (2 ** len(specs)))

    @classmethod
    def scalar(cls, value) -> "SpinorObject":
        return cls((), [value])

    @classmethod
    def vector(cls, spec, a, b) -> "SpinorObject":
        return cls((spec,), [a, b])

    # -- access ---------------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.specs)

    @staticmethod
    def _flat(idx: Sequence[int]) -> int:
        k = 0
        for i in idx:
            k = 2 * k + i
        return k

    def __getitem__(self, idx) -> Expr:
        if isinstance(idx, int):
            idx = (idx,)
        if len(idx) != self.rank:
            raise SpinorIndexError(f"rank {self.rank} object indexed with {len(idx)} values")
        return self.entries[self._flat(idx)]

    def items(self) -> Iterable[tuple[tuple[int, ...], Expr]]:
        for k, idx in enumerate(itertools.product((0, 1), repeat=self.rank)):
            yield idx, self.entries[k]

    def map(self, fn: Callable[[Expr], Expr]) -> "SpinorObject":
        return SpinorObject(self.specs, [fn(e) for e in self.entries])

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def nonzero_entries(self):
        return [(idx, e) for idx, e in self.items() if not e.is_zero()]

    # -- arithmetic -----------------------------------------------------
    def _check_same(self, other: "SpinorObject"):
        if self.specs != other.specs:
            raise SpinorIndexError(f"index structures differ: {self.specs} vs {other.specs}")

    def __add__(self, other: "SpinorObject") -> "SpinorObject":
        self._check_same(other)
        return SpinorObject(self.specs, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "SpinorObject") -> "SpinorObject":
        self._check_same(other)
        return SpinorObject(self.specs, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "SpinorObject":
        return self.map(lambda e: -e)

    def scale(self, c) -> "SpinorObject":
        c = as_expr(c)
        return self.map(lambda e: e * c)

    def equals(self, other: "SpinorObject") -> bool:
        self._check_same(other)
        return (self - other).is_zero()

    def transpose(self, perm: Sequence[int]) -> "SpinorObject":
        """New object whose k-th index is the old index perm[k]."""
        if sorted(perm) != list(range(self.rank)):
            raise SpinorIndexError(f"bad permutation {perm}")
        specs = [self.specs[p] for p in perm]

        def fn(*idx):
            old = [0] * self.rank
            for k, p in enumerate(perm):
                old[p] = idx[k]
            return self[tuple(old)]

        return SpinorObject.from_function(specs, fn)

    def __repr__(self):
        body = ", ".join(str(e) for e in self.entries)
        return f"SpinorObject([{' '.join(map(str, self.specs))}], [{body}])"


def epsilon(family: str = UNDOTTED, variance: str = LOWER) -> SpinorObject:
    table = EPS_LOWER if variance == LOWER else EPS_UPPER
    spec = IndexSpec(family, variance)
    return SpinorObject((spec, spec), [table[a][b] for a in (0, 1) for b in (0, 1)])


def delta(family: str = UNDOTTED) -> SpinorObject:
    """delta^A_B (upper index first)."""
    return SpinorObject(
        (IndexSpec(family, UPPER), IndexSpec(family, LOWER)), [ONE, ZERO, ZERO, ONE]
    )


def raise_lower(s: SpinorObject, position: int) -> SpinorObject:
    """Flip the variance of one index with the epsilon conventions above."""
    spec = s.specs[position]
    new_specs = list(s.specs)
    new_specs[position] = spec.flipped()

    def fn(*idx):
        total = ZERO
        for b in (0, 1):
            old = list(idx)
            old[position] = b
            if spec.variance == UPPER:
                w = EPS_LOWER[idx[position]][b]  # m_A = eps_AB m^B
            else:
                w = EPS_UPPER[b][idx[position]]  # m^A = m_B eps^BA
            if w:
                total = total + s[tuple(old)] * w
        return total

    return SpinorObject.from_function(new_specs, fn)


def lower_all(s: SpinorObject) -> SpinorObject:
    for k, spec in enumerate(s.specs):
        if spec.variance == UPPER:
            s = raise_lower(s, k)
    return s


def raise_all(s: SpinorObject) -> SpinorObject:
    for k, spec in enumerate(s.specs):
        if spec.variance == LOWER:
            s = raise_lower(s, k)
    return s


def symmetrize(s: SpinorObject, positions: Sequence[int]) -> SpinorObject:
    """Average over all permutations of the given index positions."""
    positions = list(positions)
    if len(positions) < 2:
        return s
    first = s.specs[positions[0]]
    if any(s.specs[p] != first for p in positions):
        raise SpinorIndexError("symmetrized indices must share family and variance")
    perms = list(itertools.permutations(positions))
    w = as_expr(1) / math.factorial(len(positions))

    def fn(*idx):
        total = ZERO
        for perm in perms:
            old = list(idx)
            for src, dst in zip(positions, perm):
                old[dst] = idx[src]
            total = total + s[tuple(old)]
        return total * w

    return SpinorObject.from_function(s.specs, fn)


def antisymmetrize(s: SpinorObject, positions: Sequence[int]) -> SpinorObject:
    a, b = positions
    if s.specs[a] != s.specs[b]:
        raise SpinorIndexError("antisymmetrized indices must share family and variance")
    perm = list(range(s.rank))
    perm[a], perm[b] = b, a
    return (s - s.transpose(perm)).scale(as_expr(1) / 2)


def contract(s: SpinorObject, pos1: int, pos2: int) -> SpinorObject:
    """Sum over a repeated index pair (same family, opposite variance)."""
    a, b = s.specs[pos1], s.specs[pos2]
    if a.family != b.family:
        raise SpinorIndexError("cannot contract dotted with undotted indices")
    if a.variance == b.variance:
        raise SpinorIndexError("contraction needs one upper and one lower index")
    keep = [k for k in range(s.rank) if k not in (pos1, pos2)]

    def fn(*idx):
        total = ZERO
        for v in (0, 1):
            old = [0] * s.rank
            for k, i in zip(keep, idx):
                old[k] = i
            old[pos1] = old[pos2] = v
            total = total + s[tuple(old)]
        return total

    return SpinorObject.from_function([s.specs[k] for k in keep], fn)


def outer(s1: SpinorObject, s2: SpinorObject) -> SpinorObject:
    entries = [a * b for a in s1.entries for b in s2.entries]
    return SpinorObject(s1.specs + s2.specs, entries)


def inner(a: SpinorObject, b: SpinorObject) -> Expr:
    """a^A b_A-style full contraction of two rank-1 objects.

    Both may be given with any variance; the first is raised if needed and
    the second lowered, i.e. the result is a^A b_A.
    """
    if a.rank != 1 or b.rank != 1:
        raise SpinorIndexError("inner expects rank-1 objects")
    if a.specs[0].variance == LOWER:
        a = raise_lower(a, 0)
    if b.specs[0].variance == UPPER:
        b = raise_lower(b, 0)
    return contract(outer(a, b), 0, 1).entries[0]


def symmetrized_product(spinors: Sequence[SpinorObject]) -> SpinorObject:
    """a_(A b_B ... d_D) of rank-1 objects with a common index spec."""
    out = spinors[0]
    for s in spinors[1:]:
        out = outer(out, s)
    return symmetrize(out, range(out.rank))
