"""Build every catalog entry, run its self-test and print one summary line each."""

import argparse
import json
import sys
import time

from nullstring.catalog import catalog
from nullstring.cli import cmd_catalog


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--json", action="store_true", help="emit the full reports as a JSON list")
    args = ap.parse_args(argv)
    reports, ok = [], True
    for entry in catalog():
        t0 = time.perf_counter()
        rep, code = cmd_catalog(entry.name, {})
        ok &= code == 0
        reports.append(rep)
        if not args.json:
            n_pass = sum(c["pass"] for c in rep["checks"])
            label = rep.get("label", "(matrix form)")
            print(f"{entry.name:15s} {label:14s} R = {rep['curvature']['R']:10s} "
                  f"checks {n_pass}/{len(rep['checks'])}  {time.perf_counter() - t0:.1f}s")
    if args.json:
        print(json.dumps(reports, indent=2, sort_keys=True))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
