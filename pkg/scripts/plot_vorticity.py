#!/usr/bin/env python3
"""Render vorticity snapshot files as PNG heat maps.

Usage: python scripts/plot_vorticity.py runs/double-shear/vorticity_*.dat
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def main(paths):
    if not paths:
        print(__doc__)
        return 2
    for name in paths:
        path = Path(name)
        with path.open() as handle:
            header = dict(item.split("=") for item in handle.readline().split())
            data = np.loadtxt(handle)
        m = int(header["M"])
        w = data[:m]  # first component only
        fig, ax = plt.subplots(figsize=(4, 4), dpi=140)
        ax.imshow(w.T, origin="lower", extent=(0, 2 * np.pi, 0, 2 * np.pi), cmap="RdBu_r")
        ax.set_title(f"t = {float(header['time']):g}")
        fig.savefig(path.with_suffix(".png"), bbox_inches="tight")
        plt.close(fig)
        print(path.with_suffix(".png"))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
