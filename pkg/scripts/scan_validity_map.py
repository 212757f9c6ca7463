#!/usr/bin/env python3
"""Scan the secular-approximation time scale over drive parameters.

Writes the tau_mu^-1 map (units of the drive frequency) over a
(rabi, omega_eg) grid to CSV, with divergence stripes flagged, and prints a
coarse ASCII rendering of the flagged cells.
"""

import argparse

import numpy as np

from floquetdd.io import Table, emit_csv
from floquetdd.validity import scan_tau_map


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--omega", type=float, default=1e10, help="drive frequency (rad/s)")
    parser.add_argument("--rabi-max", type=float, default=0.8, help="max rabi / omega")
    parser.add_argument("--eg-min", type=float, default=0.1, help="min omega_eg / omega")
    parser.add_argument("--eg-max", type=float, default=1.9, help="max omega_eg / omega")
    parser.add_argument("--cells", type=int, default=200, help="grid cells per axis")
    parser.add_argument("--n-samples", type=int, default=512)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", default="taumap.csv")
    args = parser.parse_args()

    rabi = np.linspace(0.0, args.rabi_max * args.omega, args.cells)
    omega_eg = np.linspace(args.eg_min * args.omega, args.eg_max * args.omega, args.cells)
    tmap = scan_tau_map(rabi, omega_eg, args.omega, n_samples=args.n_samples, threads=args.threads)

    emit_csv(
        Table(
            columns=("omega_R", "omega_eg", "tau_mu_inv_over_omega", "diverged"),
            rows=tuple(tmap.rows()),
        ),
        args.out,
    )
    print(f"wrote {args.cells * args.cells} cells to {args.out}; "
          f"{int(tmap.diverged.sum())} flagged as divergence stripes")

    step = max(args.cells // 60, 1)
    coarse = tmap.diverged[::step, ::step]
    print("stripe sketch (rabi down, omega_eg right):")
    for row in coarse:
        print("".join("#" if f else "." for f in row))


if __name__ == "__main__":
    main()
