"""Sweep the oscillation-threshold surface and print the summary profile.

Emits the Ψ(ρ, Δ) grid as CSV through the cached table machinery, then a
compact Θ(τ) = Ψ(1, τ) + ϑ(τ) profile showing the descent from π at
τ = 0 to the 2√2 plateau.

Run from the repository root:

    python3 scripts/threshold_table.py --out table.csv
    python3 scripts/threshold_table.py --delta 0:3:0.25 --rho 0.5:2:0.25
"""

from __future__ import annotations

import argparse
import math

import numpy as np

from semicycles.cli import emit_threshold_table
from semicycles.thresholds import psi, semicycle_threshold, theta


def _grid(text: str) -> tuple:
    lo, hi, step = (float(p) for p in text.split(":"))
    return tuple(np.round(np.arange(lo, hi + step / 2, step), 12))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--delta", type=_grid, default=_grid("0:3:0.25"),
                    metavar="LO:HI:STEP")
    ap.add_argument("--rho", type=_grid, default=_grid("0.5:2:0.5"),
                    metavar="LO:HI:STEP")
    ap.add_argument("--grid", type=int, default=2048)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default=None, help="CSV path (default: stdout)")
    ns = ap.parse_args()

    emit_threshold_table(ns.delta, ns.rho, ns.out, ns.grid, ns.jobs)
    if ns.out:
        print(f"grid written to {ns.out}")

    print("\n tau     theta(tau)  psi(1,tau)  Theta(tau)   Theta - 2*sqrt(2)")
    for tau in (0.25 * k for k in range(13)):
        big = semicycle_threshold(tau)
        print(f"{tau:5.2f}   {theta(tau):9.6f}  {float(psi(1.0, tau)):9.6f}"
              f"   {big:9.6f}   {big - 2.0 * math.sqrt(2.0):+.2e}")


if __name__ == "__main__":
    main()
