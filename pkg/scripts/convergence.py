"""Run named desk-scale convergence sweeps and write one convergence.csv each.

    python scripts/convergence.py dielectric_m3 lorentz_resonant_m3 --out results
    python scripts/convergence.py --list
"""
import argparse
import logging
from pathlib import Path

from hermite_maxwell.cli import write_convergence
from hermite_maxwell.experiments import SWEEPS, run_sweep


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("names", nargs="*", help="sweep names (default: all desk-scale sweeps)")
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--grids", type=lambda s: [int(x) for x in s.split(",")], default=None,
                   help="comma-separated N_G list overriding the protocol")
    p.add_argument("--start", choices=("exact", "self_start"), default=None)
    p.add_argument("--list", action="store_true")
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    if args.list:
        for name, sw in SWEEPS.items():
            print(f"{name:24s} {sw.regime:20s} m={sw.m} k={sw.k:g} T={sw.t_final:g} N_G={list(sw.grids)}")
        return
    names = args.names or [n for n in SWEEPS if not n.endswith("_full")]
    for name in names:
        over = {"start": args.start} if args.start else {}
        res = run_sweep(SWEEPS[name], args.grids, **over)
        write_convergence([(n, d, e) for n, d, e, _ in res.rows], args.out / name / "convergence.csv")
        print(f"{name}: rate {res.rate:.2f} (E), {res.rate_max_rel:.2f} (max relative error)")


if __name__ == "__main__":
    main()
