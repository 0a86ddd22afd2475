"""High-frequency mode with and without damping: order-6 saturation of the damped runs.

The damping integrals are carried as degree-6 polynomials in time, so the
damped high-frequency runs stall near order 6 while the undamped ones keep
the spatial order.

    python scripts/barrier.py [--m 2 4]
"""
import argparse
from dataclasses import replace

from hermite_maxwell.experiments import SWEEPS, run_sweep


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--m", type=int, nargs="+", default=[2, 4])
    args = p.parse_args()
    for m in args.m:
        base = SWEEPS.get(f"lorentz_highfreq_m{m}", replace(SWEEPS["lorentz_highfreq_m4"], m=m))
        for regime in ("lorentz_highfreq", "sellmeier_highfreq"):
            res = run_sweep(replace(base, regime=regime))
            print(f"{regime:20s} m={m}: rate {res.rate:.2f}", flush=True)


if __name__ == "__main__":
    main()
