"""Drift of the discrete energies for undamped runs (dielectric and Sellmeier, q = m+2 and 3m+2).

    python scripts/conservation.py [--n 40] [--t-final 5]
"""
import argparse

from hermite_maxwell.experiments import conservation_run, drift_trend


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--t-final", type=float, default=5.0)
    p.add_argument("--m", type=int, nargs="+", default=[3, 4])
    args = p.parse_args()
    print(f"{'regime':20s} {'m':>2s} {'q':>3s} {'drift egenn':>12s} {'drift egenh':>12s} {'trend':>10s}")
    for regime in ("dielectric", "sellmeier_highfreq"):
        for m in args.m:
            for q in (m + 2, 3 * m + 2):
                rep = conservation_run(regime, m, q, n=args.n, t_final=args.t_final)
                print(f"{regime:20s} {m:2d} {q:3d} {rep.relative_drift('egenn'):12.2e} "
                      f"{rep.relative_drift('egenh'):12.2e} {drift_trend(rep.egenn):+10.1e}", flush=True)


if __name__ == "__main__":
    main()
