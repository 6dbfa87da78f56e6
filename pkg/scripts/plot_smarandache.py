#!/usr/bin/env python3
"""Render a preset curve and its Smarandache combinations on the unit sphere."""

import argparse
import sys

import numpy as np

from curveframes.frames import frame_grid
from curveframes.presets import PRESET_NAMES, preset
from curveframes.smarandache import SmarandacheKind, beta_positions


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="equator", choices=PRESET_NAMES)
    ap.add_argument("--samples", type=int, default=600)
    ap.add_argument("--out", default=None,
                    help="output PNG (default <preset>_smarandache.png)")
    args = ap.parse_args()
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is required for plotting", file=sys.stderr)
        return 1

    curve = preset(args.preset)
    grid = frame_grid(curve, np.linspace(0.0, curve.total_length, args.samples))
    fig = plt.figure(figsize=(7, 7))
    ax = fig.add_subplot(projection="3d")
    u, v = np.meshgrid(np.linspace(0, 2 * np.pi, 36),
                       np.linspace(0, np.pi, 18))
    ax.plot_wireframe(np.cos(u) * np.sin(v), np.sin(u) * np.sin(v), np.cos(v),
                      color="0.88", linewidth=0.3)
    ax.plot(*grid.position.T, color="black", linewidth=1.5, label=curve.name)
    for kind in SmarandacheKind:
        beta = beta_positions(kind, grid)
        ax.plot(*beta.T, linewidth=1.2, label=kind.value)
    ax.set_box_aspect((1, 1, 1))
    ax.set_title(f"Smarandache combinations of {curve.name!r}")
    ax.legend(loc="upper left")
    out = args.out or f"{args.preset}_smarandache.png"
    fig.savefig(out, dpi=150, bbox_inches="tight")
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
