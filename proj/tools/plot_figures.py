#!/usr/bin/env python3
"""Render the standard figures from berryoptics CSV artifacts.

Companion script, not part of the test surface. Usage:

    berryoptics figure --kind circuit --a 1 --omega-alpha-tau 12.566 --out data/
    berryoptics figure --kind widths --b 5 --out data/
    python3 tools/plot_figures.py data/
"""
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_csv(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    header = rows[0]
    cols = {name: [float(r[i]) for r in rows[1:]] for i, name in enumerate(header)}
    return cols


def main(out_dir):
    out = Path(out_dir)
    circuit = out / "figure_circuit.csv"
    widths = out / "figure_widths.csv"

    if circuit.exists():
        c = read_csv(circuit)
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.plot(c["X"], c["Y"], lw=0.8)
        ax.set_xlabel("X")
        ax.set_ylabel("Y")
        ax.set_title("parameter-space circuit")
        ax.set_aspect("equal")
        fig.savefig(out / "circuit.png", dpi=160, bbox_inches="tight")
        print(f"wrote {out / 'circuit.png'}")

    if widths.exists():
        w = read_csv(widths)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(w["t_over_ts"], w["width_ground_dx0"], label="ground (b > 0)")
        ax.plot(w["t_over_ts"], w["width_excited_dx0"], label="excited (b < 0)")
        ax.plot(w["t_over_ts"], w["width_free_dx0"], "--", label="free (b = 0)")
        ax.set_xlabel("t / t_s")
        ax.set_ylabel("width / dx0")
        ax.legend()
        ax.set_title("packet width evolution")
        fig.savefig(out / "widths.png", dpi=160, bbox_inches="tight")
        print(f"wrote {out / 'widths.png'}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else ".")
