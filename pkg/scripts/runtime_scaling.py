"""Runtime versus N for the dense and the row-sampled DCT operator, with the
fitted log-log slopes.

    python scripts/runtime_scaling.py
"""
import argparse

from emgmamp import harness

DEFAULT_N = {"iid_gaussian": [512, 1024, 2048, 4096], "row_sampled_dct": [2**14, 2**15, 2**16, 2**17]}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--realizations", type=int, default=3)
    args = ap.parse_args()
    for matrix, ns in DEFAULT_N.items():
        table = harness.run_scaling(ns, realizations=args.realizations, matrix=matrix)
        print(matrix)
        for row in table.rows:
            print(f"  N={row['n']:>7}  {row['median_runtime_s']:.3f} s  NMSE {row['median_nmse_db']:.1f} dB")
        print(f"  slope {table.extra['slope']:.2f}")


if __name__ == "__main__":
    main()
