#!/usr/bin/env python3
"""Produce the full artifact set (verify/eta/converge/resolvent/bounds) in one go.

Usage: python scripts/run_reports.py [outdir]

Every file is written through the CLI layer, so re-running with the same
arguments reproduces the bytes exactly.
"""

import pathlib
import sys

from unishift.cli import main

DEFAULT_OUTDIR = "reports"


def run(outdir: str) -> int:
    out = pathlib.Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [
        ["verify", "--dim", "8", "--trials", "25", "--rmax", "8", "--seed", "1",
         "--scale", "2.0", "--out", str(out / "verify.json")],
        ["eta", "--dim", "8", "--seed", "1", "--scale", "2.0", "--grid", "1024",
         "--out", str(out / "eta.csv")],
        ["converge", "--ambient", "256", "--ranks", "8,16,32,64", "--seed", "1",
         "--scale", "0.5", "--out", str(out / "converge.csv")],
        ["resolvent", "--dim", "6", "--seed", "1", "--z=0.5",
         "--out", str(out / "resolvent_inside.json")],
        ["resolvent", "--dim", "6", "--seed", "1", "--z=2.0",
         "--out", str(out / "resolvent_outside.json")],
        ["bounds", "--ambient", "256", "--ranks", "16,64,256", "--seed", "1",
         "--scale", "0.5", "--out", str(out / "bounds.json")],
    ]
    worst = 0
    for argv in jobs:
        code = main(argv)
        print(f"{argv[0]:<10} -> exit {code}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else DEFAULT_OUTDIR))
