#!/usr/bin/env python3
"""Audit every registered closed form on all preset curves and kinds.

Writes one JSON report per (preset, kind) pair and prints a verdict
summary.  The exit status is 0 even when verdicts are DISCREPANT:
discrepancies are findings, not failures.
"""

import argparse
import collections
import pathlib

import numpy as np

from curveframes.presets import PRESET_NAMES, preset
from curveframes.smarandache import SmarandacheKind
from curveframes.verify import Verdict, audit, report_json


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="audit_out", help="report directory")
    ap.add_argument("--samples", type=int, default=256)
    ap.add_argument("--tol", type=float, default=1e-9)
    args = ap.parse_args()
    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    totals = collections.Counter()
    for name in PRESET_NAMES:
        curve = preset(name)
        length = curve.total_length
        s = np.linspace(0.02 * length, 0.98 * length, args.samples)
        for kind in SmarandacheKind:
            report = audit(kind, curve, s, args.tol)
            path = outdir / f"{name}-{kind.value}.json"
            path.write_text(report_json(report), encoding="utf-8")
            counts = collections.Counter(
                entry.verdict.value for entry in report.formulas)
            totals.update(counts)
            summary = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
            print(f"{name:>8} {kind.value:<3} {summary}")
            for entry in report.formulas:
                if entry.verdict in (Verdict.SIGN_ONLY, Verdict.DISCREPANT):
                    print(f"         {entry.formula_id}: "
                          f"{entry.verdict.value}"
                          f" (|residual| {entry.magnitude_residual:.3e})")
    print("totals:", ", ".join(f"{v} {k}" for k, v in sorted(totals.items())))
    print(f"reports in {outdir}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
