"""Regenerate the stored Gaussian-mixture fits to the uniform density.

Prints a ``_RAW_FITS`` dict literal to paste into src/emgmamp/uniform_fit.py.
"""
import argparse

import numpy as np

from emgmamp.uniform_fit import raw_uniform_fit


def fmt(values):
    return "[" + ", ".join(np.format_float_positional(v, unique=True) for v in values) + "]"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-L", type=int, default=8)
    ap.add_argument("--samples", type=int, default=10**6)
    ap.add_argument("--iters", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("_RAW_FITS = {")
    for L in range(1, args.max_L + 1):
        omega, phi = raw_uniform_fit(L, args.samples, args.iters, args.seed)
        print(f"    {L}: ({fmt(omega)}, {fmt(phi)}),")
    print("}")


if __name__ == "__main__":
    main()
