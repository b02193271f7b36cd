"""Noisy NMSE-versus-M/N sweeps at N=1000, K=100, SNR=25 dB.

BR signals with L=3 and L=1 (the gain from a richer mixture and the -15 dB
breakpoint), BG signals, and Student's-t signals in both modes.

    python scripts/nmse_sweeps.py --realizations 50
"""
import argparse
from pathlib import Path

from emgmamp import harness
from emgmamp.harness import SolverConfig
from emgmamp.signals import SignalSpec

RATIOS = (0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--k", type=int, default=100)
    ap.add_argument("--snr", type=float, default=25.0)
    ap.add_argument("--realizations", type=int, default=50)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ms = [int(round(r * args.n)) for r in RATIOS]

    experiments = {
        "br": (SignalSpec("br", args.n, k=args.k), (SolverConfig(L=3), SolverConfig(L=1))),
        "bg": (SignalSpec("bg", args.n, k=args.k), (SolverConfig(L=3),)),
        "students_t": (SignalSpec("students_t", args.n),
                       (SolverConfig(mode="heavy_tailed", L=4), SolverConfig(mode="sparse", L=3))),
    }
    for name, (sig, solvers) in experiments.items():
        table = harness.run_nmse_sweep(sig, ms, args.snr, args.realizations, solvers, jobs=args.jobs)
        table.extra["kind"] = "sweep"
        table.to_csv(out / f"sweep_{name}.csv")
        table.to_json(out / f"sweep_{name}.json")
        print(name)
        for row in table.rows:
            print(f"  {row['solver']:>16}  M/N={row['m_over_n']:.2f}  median {row['median_nmse_db']:7.2f} dB")
        for solver, bp in table.extra["breakpoint"].items():
            print(f"  breakpoint {solver}: {bp}")


if __name__ == "__main__":
    main()
