"""Long-horizon run at cfl 0.9 with q = m+2, writing the energy history to CSV.

    python scripts/stability.py --steps 5000 --out results/stability.csv
"""
import argparse
import math
from pathlib import Path

from hermite_maxwell.cli import write_timeseries
from hermite_maxwell.media import dielectric
from hermite_maxwell.stepper import SolverConfig, run


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--steps", type=int, default=5000)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--k", type=float, default=2.0)
    p.add_argument("--cfl", type=float, default=0.9)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--every", type=int, default=25)
    p.add_argument("--out", type=Path, default=Path("results/stability.csv"))
    args = p.parse_args()
    dt = args.cfl * 2 * math.pi / args.n
    cfg = SolverConfig(m=args.m, n=args.n, t_final=args.steps * dt, medium=dielectric(), q=args.q,
                       cfl=args.cfl, k=args.k, energy_every=args.every, error_every=args.every)
    rep = run(cfg)
    write_timeseries(rep, args.out)
    print(f"{cfg.n_steps} steps, q={cfg.q}: egenn drift {rep.relative_drift('egenn'):.2e}, "
          f"egenh drift {rep.relative_drift('egenh'):.2e}, max rel error {rep.max_rel_error():.2e}")


if __name__ == "__main__":
    main()
