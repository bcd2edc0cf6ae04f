#!/usr/bin/env python3
"""Plots `simulate` outputs: a time trace directory or a sweep directory.

    python scripts/plot_figures.py trace OUT_DIR
    python scripts/plot_figures.py sweep OUT_DIR
"""
import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def trace(out):
    for path in sorted(out.glob("observables_init*.csv")):
        rows = read(path)
        t = [float(r["time_ps"]) for r in rows]
        fig, ax = plt.subplots()
        for col in rows[0]:
            if col not in ("time_ps", "omega_RC"):
                ax.plot(t, [float(r[col]) for r in rows], label=col)
        ax2 = ax.twinx()
        ax2.plot(t, [float(r["omega_RC"]) for r in rows], "k--", label="omega_RC")
        ax.set_xscale("log")
        ax.set_xlabel("t (ps)")
        ax.legend()
        fig.savefig(out / f"{path.stem}.png", dpi=150)


def sweep(out):
    rows = [r for r in read(out / "sweep.csv") if r["status"] == "ok"]
    var = next(iter(rows[0]))
    cols = ["eta"] + [c for c in rows[0] if c.startswith("phi_")]
    fig, axes = plt.subplots(len(cols), 1, sharex=True, figsize=(5, 2.2 * len(cols)))
    for ax, col in zip(axes, cols):
        for site in sorted({r["initial_site"] for r in rows}):
            sel = [r for r in rows if r["initial_site"] == site]
            ax.plot([float(r[var]) for r in sel], [float(r[col]) for r in sel], label=f"init {site}")
        ax.set_ylabel(col)
        ax.set_xscale("symlog", linthresh=1e-3)
    axes[0].legend()
    axes[-1].set_xlabel(var)
    fig.tight_layout()
    fig.savefig(out / "sweep.png", dpi=150)


if __name__ == "__main__":
    kind, out = sys.argv[1], Path(sys.argv[2])
    {"trace": trace, "sweep": sweep}[kind](out)
