"""Petrov-Penrose typing of the SD Weyl spinor in an adapted tetrad."""

from __future__ import annotations

from dataclasses import dataclass, field

from .congruence import CongruenceData, string_check, undotted, petrov_decomposition_check
from .geometry import CurvatureReport, PlebanskiMetric, curvature
from .kernel import Expr, ONE, ZERO, as_expr

TYPES = ("I", "II", "D", "III", "N", "-")


class NotAdaptedError(ValueError):
    """C4 or C5 nonzero: the tetrad is not adapted to a multiple Penrose spinor."""


class NotTypeDError(ValueError):
    pass


def discriminant(C1, C2, C3) -> Expr:
    """2 C2^2 - 3 C1 C3, zero exactly for type D once C3 is nonzero."""
    C1, C2, C3 = as_expr(C1), as_expr(C2), as_expr(C3)
    return 2 * C2 * C2 - 3 * C1 * C3


def petrov_type(C1, C2, C3, C4=ZERO, C5=ZERO) -> str:
    C1, C2, C3, C4, C5 = map(as_expr, (C1, C2, C3, C4, C5))
    if not (C4.is_zero() and C5.is_zero()):
        raise NotAdaptedError("C4 and C5 must vanish in an adapted tetrad")
    if not C3.is_zero():
        return "D" if discriminant(C1, C2, C3).is_zero() else "II"
    if not C2.is_zero():
        return "III"
    if not C1.is_zero():
        return "N"
    return "-"


def second_principal_spinor(C2, C3):
    """l_A = (1, C2/(3 C3)); with m_A = (0,1) C is a multiple of m_(A m_B l_C l_D)."""
    C3 = as_expr(C3)
    return undotted(ONE, as_expr(C2) / (3 * C3))


def _mark(d: CongruenceData) -> str:
    if not d.isIntegrable:
        return ""
    return "n" if d.isNonexpanding else "e"


@dataclass
class PetrovLabel:
    base: str
    decorations: str = ""
    asd: str = "-"
    asd_decoration: str = ""

    def sd_str(self) -> str:
        core = self.base if self.base != "-" else "[-]"
        return core + (f"^{self.decorations}" if self.decorations else "")

    def asd_str(self) -> str:
        if self.asd != "-":
            return self.asd
        return "[-]" + (f"^{self.asd_decoration}" if self.asd_decoration else "")

    def __str__(self):
        return f"{self.sd_str()} x {self.asd_str()}"


def asd_label(m: PlebanskiMetric, rep: CurvatureReport | None = None) -> str:
    rep = rep or curvature(m)
    if not rep.CdotWeyl.is_zero():
        return "not-SD"
    return "[-]^n" if rep.R.is_zero() else "[-]^e"


def d_subtype(m: PlebanskiMetric, rep: CurvatureReport | None = None):
    """Expansion marks of the two principal congruences of a type-D space.

    Returns (marks, [first, second]) where marks is e.g. "nn" or "n".
    """
    rep = rep or curvature(m)
    if petrov_type(rep.C1, rep.C2, rep.C3) != "D":
        raise NotTypeDError("d_subtype needs type D")
    first = string_check(undotted(0, 1), m)
    second = string_check(second_principal_spinor(rep.C2, rep.C3), m)
    marks = "".join(sorted(_mark(first) + _mark(second), key="ne".index))
    return marks, [first, second]


@dataclass
class Classification:
    label: PetrovLabel
    congruences: list = field(default_factory=list)  # (name, CongruenceData)
    caveats: list = field(default_factory=list)  # (kind, polynomial string)
    principal: list = field(default_factory=list)

    def __str__(self):
        return str(self.label)


def _den_caveats(e: Expr, what: str):
    out = []
    if not e.den.is_const():
        from .kernel.printing import poly_str

        out.append(("denominator", what, poly_str(e.den)))
    return out


def classify(m: PlebanskiMetric, rep: CurvatureReport | None = None) -> Classification:
    rep = rep or curvature(m)
    base = petrov_type(rep.C1, rep.C2, rep.C3)
    label = PetrovLabel(base)
    cav = []
    asd = asd_label(m, rep)
    if asd == "not-SD":
        label.asd, label.asd_decoration = "not-SD", ""
    elif not (base == "-" and rep.R.is_zero() and rep.tracelessRicci.is_zero()):
        label.asd_decoration = asd[-1]  # a flat space carries no decorations
    cls = Classification(label)
    from .kernel.printing import poly_str

    if base == "D":
        marks, (first, second) = d_subtype(m, rep)
        label.decorations = marks
        l = second.generator
        cls.congruences = [("m", first), ("l", second)]
        cls.principal = [undotted(0, 1), l]
        cav.append(("vanishing", "C3", poly_str(rep.C3.num)))
        cav += _den_caveats(l[1], "l_2")
    elif base == "N":
        first = string_check(undotted(0, 1), m)
        label.decorations = _mark(first)
        cls.congruences = [("m", first)]
        cls.principal = [undotted(0, 1)]
        cav.append(("vanishing", "C1", poly_str(rep.C1.num)))
    elif base in ("II", "III"):
        first = string_check(undotted(0, 1), m)
        cls.congruences = [("m", first)]
        key = "C3" if base == "II" else "C2"
        cav.append(("vanishing", key, poly_str(getattr(rep, key).num)))
    if asd == "[-]^e":
        cav.append(("vanishing", "R", poly_str(rep.R.num)))
    for name in ("Q11", "Q12", "Q22"):
        cav += _den_caveats(getattr(m, name), name)
    # nonexpanding generators of a D space should be its principal spinors
    if base == "D" and label.decorations:
        C = rep.weyl_spinor()
        if not petrov_decomposition_check(C, [cls.principal[0]] * 2 + [cls.principal[1]] * 2):
            raise AssertionError("type D principal spinors do not reproduce the Weyl spinor")
    cls.caveats = sorted(set(cav))
    return cls
