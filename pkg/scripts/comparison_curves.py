"""Write the BPSK comparison error curves and report where they cross.

    python scripts/comparison_curves.py --output curves.csv
"""

import argparse
import io
import math

import numpy as np
from scipy import optimize

from qsd.cli import SWEEP_COLUMNS, SweepConfig, sweep_csv
from qsd.receivers import CLOSED_FORMS, ReceiverKind


def crossing(a: str, b: str, lo: float = 1e-6, hi: float = 4.0):
    """Mean photon number where curves ``a`` and ``b`` meet, or None."""
    fa, fb = CLOSED_FORMS[ReceiverKind(a)], CLOSED_FORMS[ReceiverKind(b)]
    gap = lambda n: fa(math.sqrt(n)) - fb(math.sqrt(n))
    grid = np.linspace(lo, hi, 2001)
    vals = np.array([gap(n) for n in grid])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if idx.size == 0:
        return None
    return optimize.brentq(gap, grid[idx[0]], grid[idx[0] + 1], xtol=1e-14)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha-max", type=float, default=2.0)
    parser.add_argument("--steps", type=int, default=101)
    parser.add_argument("--output", "-o", default="comparison_curves.csv")
    args = parser.parse_args()

    text = sweep_csv(SweepConfig(alpha_max=args.alpha_max, steps=args.steps))
    with open(args.output, "w", newline="") as fh:
        fh.write(text)
    data = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1)
    print(f"wrote {data.shape[0]} rows to {args.output}")

    i = int(np.argmin(np.abs(data[:, 0] - 1.0)))
    print(f"at mean photon number {data[i, 0]:g}:")
    for name, value in zip(SWEEP_COLUMNS, data[i, 1:]):
        print(f"  {name:16s} {value:.7f}")

    for a, b in (("displacement_pd", "bs_pd"), ("displacement_pd", "homodyne")):
        n = crossing(a, b)
        where = "never" if n is None else f"at mean photon number {n:.7f}"
        print(f"{a} and {b} cross {where}")


if __name__ == "__main__":
    main()
