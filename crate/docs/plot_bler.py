#!/usr/bin/env python3
"""Plot BLER or misalignment CSVs written by leo-handover.

    python3 docs/plot_bler.py out/*.csv -o bler.png
"""
import argparse
import csv
import os

import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", nargs="+")
    ap.add_argument("-o", "--output", default="bler.png")
    ap.add_argument("--floor", type=float, default=1e-6, help="lowest BLER on the axis")
    args = ap.parse_args()

    fig, ax = plt.subplots(figsize=(7, 5))
    sweep = False
    for path in args.csv:
        rows = read(path)
        label = os.path.splitext(os.path.basename(path))[0]
        if rows and "required_ref_snr_db" in rows[0]:
            sweep = True
            pts = [(float(r["misalignment_variance_rad2"]), float(r["required_ref_snr_db"])) for r in rows if r["status"] == "ok"]
            pts = [p for p in pts if p[0] > 0]
            ax.semilogx([p[0] for p in pts], [p[1] for p in pts], marker="o", label=label)
        else:
            x = [float(r["ref_snr_db"]) for r in rows]
            y = [max(float(r["bler"]), args.floor / 10) for r in rows]
            ax.semilogy(x, y, marker=".", label=label)

    if sweep:
        ax.set_xlabel("misalignment variance [rad^2]")
        ax.set_ylabel("required reference SNR [dB]")
    else:
        ax.set_xlabel("reference SNR [dB]")
        ax.set_ylabel("BLER")
        ax.set_ylim(args.floor, 1.0)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
