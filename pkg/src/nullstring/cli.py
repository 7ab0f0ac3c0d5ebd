"""Command line front end: ``analyze``, ``catalog`` and ``verify-paper``.

Exit status is 0 when everything verifies, 1 on a verification failure and
2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import catalog as cat
from .geometry import PlebanskiMetric
from .kernel import KernelError, Workspace, parse, to_str
from .pipeline import analyze_matrix, analyze_plebanski

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

MATRIX_ORDER = [(i, j) for i in range(4) for j in range(i, 4)]


class InputError(ValueError):
    """Malformed or inconsistent metric specification."""


# ---------------------------------------------------------------------------
# input files

def _expect(cond, msg):
    if not cond:
        raise InputError(msg)


def load_spec_text(text: str, source="<input>"):
    """Validate a metric specification and build the metric it describes.

    Returns ``(kind, metric, workspace)`` with kind ``plebanski`` or ``matrix``.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    _expect(isinstance(data, dict), f"{source}: top level must be an object")
    unknown = set(data) - {"name", "coordinates", "parameters", "functions", "form", "components"}
    _expect(not unknown, f"{source}: unknown keys {sorted(unknown)}")
    coords = data.get("coordinates", ["q", "p", "x", "y"])
    _expect(isinstance(coords, list) and len(coords) == 4 and all(isinstance(c, str) for c in coords),
            f"{source}: coordinates must be a list of 4 names")
    params = data.get("parameters", {})
    funcs = data.get("functions", {})
    _expect(isinstance(params, dict) and isinstance(funcs, dict), f"{source}: parameters/functions must be objects")
    try:
        ws = Workspace(tuple(coords), dict(params), dict(funcs))
    except ValueError as e:
        raise InputError(f"{source}: {e}") from None
    form = data.get("form", "plebanski")
    comps = data.get("components")

    def expr(key, s):
        _expect(isinstance(s, str), f"{source}: component {key} must be a string")
        try:
            return parse(s, ws)
        except (KernelError, ValueError) as e:
            raise InputError(f"{source}: component {key}: {e}") from None

    if form == "plebanski":
        _expect(isinstance(comps, dict) and set(comps) == {"Q11", "Q12", "Q22"},
                f"{source}: plebanski components must be exactly Q11, Q12, Q22")
        Q = {k: expr(k, comps[k]) for k in ("Q11", "Q12", "Q22")}
        m = PlebanskiMetric(Q["Q11"], Q["Q12"], Q["Q22"], tuple(coords), data.get("name", ""))
        return "plebanski", m, ws
    if form == "matrix":
        _expect(isinstance(comps, list) and len(comps) == 10,
                f"{source}: matrix components must be a list of 10 strings (upper triangle, row major)")
        g = [[None] * 4 for _ in range(4)]
        for (i, j), s in zip(MATRIX_ORDER, comps):
            e = expr(f"g{i}{j}", s)
            g[i][j] = g[j][i] = e
        return "matrix", g, ws
    raise InputError(f"{source}: form must be plebanski or matrix, not {form!r}")


def load_spec(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    return load_spec_text(text, path)


# ---------------------------------------------------------------------------
# commands

def cmd_analyze(path: str) -> tuple[dict, int]:
    kind, obj, ws = load_spec(path)
    ident = os.path.basename(path)
    if kind == "plebanski":
        rep = analyze_plebanski(obj, ws.nonzero_parameters(), obj.name or ident)
    else:
        rep = analyze_matrix(obj, ws.coordinates, ws.nonzero_parameters(), ident)
    return rep, EXIT_OK


def parse_bindings(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise InputError(f"--param expects K=V, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = parse(v.strip(), Workspace())
        except (KernelError, ValueError) as e:
            raise InputError(f"--param {k}: {e}") from None
    return out


ENTRY_SUITES = {
    "einstein": lambda v: cat.projective_check(Lam=v.get("Lambda")),
    "einstein-f0": lambda v: cat.killing_suite(v.get("Lambda")),
    "double-null": lambda v: cat.double_null_transition(v.get("Lambda")),
}


def cmd_catalog(name: str, bindings: dict) -> tuple[dict, int]:
    try:
        entry = cat.get_entry(name)
    except cat.UnknownEntryError as e:
        raise InputError(str(e.args[0])) from None
    extra = set(bindings) - set(entry.parameters)
    if extra:
        raise InputError(f"entry {name} has no parameters {sorted(extra)}; known: {sorted(entry.parameters)}")
    for k, flag in entry.parameters.items():
        if flag == "nonzero" and k in bindings and bindings[k].is_zero():
            raise InputError(f"parameter {k} of {name} must be nonzero")
    obj = entry.build(**bindings)
    nonzero = [k for k, f in entry.parameters.items() if f == "nonzero" and k not in bindings]
    if entry.kind == "matrix":
        rep = analyze_matrix(obj, entry.coords, nonzero, name)
    else:
        rep = analyze_plebanski(obj, nonzero, name)
    rep["bindings"] = {k: to_str(v) for k, v in sorted(bindings.items())}
    checks = entry.self_test(**bindings)
    if name in ENTRY_SUITES:
        checks += ENTRY_SUITES[name](bindings)
    rep["checks"] = [c.as_dict() for c in checks]
    ok = all(c.ok for c in checks)
    return rep, EXIT_OK if ok else EXIT_FAIL


def thread_cap() -> int:
    v = os.environ.get("NULLSTRING_THREADS", "1")
    try:
        return max(1, int(v))
    except ValueError:
        return 1


def cmd_verify(only=None) -> tuple[dict, int]:
    from .verify import SUITES, run_suite

    names = list(SUITES)
    if only:
        wanted = [s.strip() for s in only.split(",") if s.strip()]
        bad = [s for s in wanted if s not in SUITES]
        if bad:
            raise InputError(f"unknown suite(s) {bad}; known: {', '.join(SUITES)}")
        names = [n for n in names if n in wanted]

    def run(n):
        t0 = time.perf_counter()
        checks = run_suite(n)
        return n, checks, time.perf_counter() - t0

    with ThreadPoolExecutor(max_workers=thread_cap()) as ex:
        results = list(ex.map(run, names))  # map keeps the input order
    suites, timing = [], {}
    for n, checks, dt in results:
        suites.append({
            "suite": n,
            "title": SUITES[n][0],
            "pass": all(c.ok for c in checks),
            "checks": [c.as_dict() for c in checks],
        })
        timing[n] = round(dt, 3)
    ok = all(s["pass"] for s in suites)
    return {"version": 1, "pass": ok, "suites": suites, "timing": timing}, EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# output

def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=str)


def _text_checks(checks, indent="  "):
    for c in checks:
        yield f"{indent}{'PASS' if c['pass'] else 'FAIL'}  {c['name']}"


def to_text(doc: dict) -> str:
    lines = []
    if "suites" in doc:
        for s in doc["suites"]:
            lines.append(f"{'PASS' if s['pass'] else 'FAIL'}  {s['suite']}: {s['title']}")
            lines += [ln for ln in _text_checks(s["checks"]) if "FAIL" in ln]
        lines.append(f"overall: {'PASS' if doc['pass'] else 'FAIL'}")
        return "\n".join(lines)
    lines.append(f"metric: {doc['metric']} ({doc['form']})")
    for k, v in doc["curvature"].items():
        lines.append(f"  {k} = {v}")
    if "label" in doc:
        lines.append(f"label: {doc['label']}")
        lines.append(f"Kerr-Schild class: {doc['kerrSchild']}")
    lines.append(f"einstein: {doc['einstein']}")
    for row in doc.get("congruences", ()):
        state = "nonexpanding" if row["nonexpanding"] else ("expanding" if row["integrable"] else "not integrable")
        lines.append(f"congruence {row['name']} = ({', '.join(row['generator'])}): {state}")
    rec = doc.get("recurrence")
    if rec:
        if rec["applicable"]:
            lines.append(f"recurrence: {'holds' if rec['weyl'] else 'fails'}, r = [{', '.join(rec['r'])}]")
        else:
            lines.append("recurrence: needs two nonexpanding congruences")
    for cv in doc.get("caveats", ()):
        lines.append(f"caveat: {cv[0]} {cv[1]}: {cv[2]}")
    if "checks" in doc:
        lines.append("checks:")
        lines += list(_text_checks(doc["checks"]))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nullstring", description=__doc__.splitlines()[0])
    ap.add_argument("--format", choices=("json", "text"), default="json")
    sub = ap.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="analyze a metric specification file")
    a.add_argument("path")
    c = sub.add_parser("catalog", help="build and check a catalog entry")
    c.add_argument("name", nargs="?", help="entry name; omit to list entries")
    c.add_argument("--param", action="append", default=[], metavar="K=V")
    v = sub.add_parser("verify-paper", help="run the verification suites")
    v.add_argument("--only", default=None, help="comma separated suite names")
    for p in (a, c, v):
        p.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.command == "analyze":
            doc, code = cmd_analyze(args.path)
        elif args.command == "catalog":
            if not args.name:
                doc = {"entries": sorted(cat.CATALOG)}
                print(to_json(doc) if args.format == "json" else "\n".join(doc["entries"]))
                return EXIT_OK
            doc, code = cmd_catalog(args.name, parse_bindings(args.param))
        else:
            doc, code = cmd_verify(args.only)
    except InputError as e:
        err = {"error": "input", "message": str(e)}
        print(to_json(err) if args.format == "json" else f"error: {e}", file=sys.stdout)
        return EXIT_INPUT
    except AssertionError as e:
        err = {"error": "verification", "message": str(e)}
        print(to_json(err) if args.format == "json" else f"verification failure: {e}")
        return EXIT_FAIL
    if args.command != "verify-paper":
        doc["timing"] = {"seconds": round(time.perf_counter() - t0, 3)}
    print(to_json(doc) if args.format == "json" else to_text(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
