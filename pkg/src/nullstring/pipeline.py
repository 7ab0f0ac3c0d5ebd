"""Analysis pipeline producing deterministic report dictionaries."""

from __future__ import annotations

from typing import Sequence

from .classify import Classification, classify
from .congruence import grad_log, recurrence_check, recurrence_vector, string_check, undotted, weyl_scale
from .geometry import CurvatureReport, PlebanskiMetric, christoffel_oracle, curvature
from .kernel import Expr, to_str
from .spinor import SpinorObject

REPORT_VERSION = 1


def normalized_recurrence(m: PlebanskiMetric, rep: CurvatureReport | None = None):
    """Recurrence 1-form r = 2Z + 2S of the generators m = (0,1), l = (1,0).

    The generators are rescaled by kappa^(1/4) where C = kappa m_(A m_B l_C l_D),
    which fixes the otherwise arbitrary spin-weight of Z and S. Returns
    ``(r, normalized)``; ``r`` is None unless both congruences are nonexpanding.
    """
    rep = rep or curvature(m)
    gens = [undotted(0, 1), undotted(1, 0)]
    C = rep.weyl_spinor()
    phi = None
    if not C.is_zero():
        kappa = weyl_scale(C, [gens[0]] * 2 + [gens[1]] * 2)
        if kappa is not None:
            phi = Expr.log(kappa) / 4
    z = string_check(gens[0], m, log_weight=phi)
    s = string_check(gens[1], m, log_weight=phi)
    try:
        return recurrence_vector(z, s), phi is not None
    except ValueError:
        return None, phi is not None


def _spinor_strs(s: SpinorObject | None):
    return None if s is None else [to_str(e) for e in s.entries]


def curvature_summary(rep: CurvatureReport) -> dict:
    return {k: to_str(v) for k, v in rep.scalars().items()}


def recurrence_summary(m: PlebanskiMetric, rep: CurvatureReport) -> dict:
    r, normalized = normalized_recurrence(m, rep)
    if r is None:
        return {"applicable": False}
    out = {
        "applicable": True,
        "normalized": normalized,
        "r": _spinor_strs(r),
        "weyl": recurrence_check(m, r),
    }
    if not rep.R.is_zero():
        out["r_equals_dlnR"] = r.equals(grad_log(rep.R, m))
    return out


def congruence_table(m: PlebanskiMetric, cls: Classification) -> list[dict]:
    rows = []
    for name, s in (("m", undotted(0, 1)), ("l", undotted(1, 0))):
        d = string_check(s, m)
        row = {"name": name}
        row.update(d.as_dict())
        rows.append(row)
    for name, d in cls.congruences:
        if name == "l" and not d.generator.equals(undotted(1, 0)):
            row = {"name": "l-principal"}
            row.update(d.as_dict())
            rows.append(row)
    return rows


def analyze_plebanski(m: PlebanskiMetric, nonzero: Sequence[str] = (), identity: str | None = None) -> dict:
    rep = curvature(m)
    cls = classify(m, rep)
    caveats = [list(c) for c in cls.caveats]
    caveats += [["nonzero", "parameter", n] for n in sorted(nonzero)]
    return {
        "version": REPORT_VERSION,
        "metric": identity or m.name or "unnamed",
        "form": "plebanski",
        "coordinates": list(m.coords),
        "Q": {k: to_str(getattr(m, k)) for k in ("Q11", "Q12", "Q22")},
        "curvature": curvature_summary(rep),
        "petrov": cls.label.sd_str(),
        "asd": cls.label.asd_str(),
        "label": str(cls),
        "kerrSchild": rep.kerrSchildClass,
        "einstein": rep.tracelessRicci.is_zero(),
        "congruences": congruence_table(m, cls),
        "recurrence": recurrence_summary(m, rep),
        "caveats": caveats,
    }


def analyze_matrix(g, coords: Sequence[str], nonzero: Sequence[str] = (), identity: str = "unnamed") -> dict:
    """Coordinate-metric report: only what the Christoffel oracle can decide."""
    ch = christoffel_oracle(g, coords)
    lam = ch.einstein_constant(g)
    return {
        "version": REPORT_VERSION,
        "metric": identity,
        "form": "matrix",
        "coordinates": list(coords),
        "curvature": {"R": to_str(ch.scalar)},
        "einstein": lam is not None,
        "einsteinConstant": None if lam is None else to_str(lam),
        "caveats": [["nonzero", "parameter", n] for n in sorted(nonzero)],
    }
