"""Command line front end.

    hermite-maxwell solve run.yaml
    hermite-maxwell sweep sweep.yaml
    hermite-maxwell rates out/convergence.csv

``--threads N`` caps BLAS/OpenMP threads; ``HERMITE_OUTPUT_DIR`` overrides the
configured output directory.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from threadpoolctl import threadpool_limits

from .config import ConfigError, RunConfig, load_config
from .diagnostics import RunReport, fit_rate
from .stepper import InstabilityError, run

log = logging.getLogger("hermite_maxwell")

EXIT_CONFIG = 2
EXIT_UNSTABLE = 3
EXIT_FAILED = 4

CONVERGENCE_COLUMNS = ("N_G", "dof_per_wavelength", "error")


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def write_timeseries(report: RunReport, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(RunReport.COLUMNS)
        for row in report.rows():
            w.writerow([fmt(v) for v in row])


def dof_per_wavelength(n: int, m: int, k: float) -> float:
    return n * (m + 1) / k


def write_convergence(rows, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(CONVERGENCE_COLUMNS)
        for n, dof, err in rows:
            w.writerow([fmt(n), fmt(dof), fmt(err)])


def read_convergence(path: Path) -> list[tuple[int, float, float]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CONVERGENCE_COLUMNS:
            raise ValueError(f"{path}: expected header {','.join(CONVERGENCE_COLUMNS)}")
        return [(int(r["N_G"]), float(r["dof_per_wavelength"]), float(r["error"])) for r in reader]


def summary_text(cfg: RunConfig, rows) -> str:
    rate = fit_rate([(d, e) for _, d, e in rows])
    lo, hi = min(d for _, d, _ in rows), max(d for _, d, _ in rows)
    return (f"regime: {cfg.regime}\nm: {cfg.m}\nk: {cfg.k:g}\nt_final: {cfg.t_final:g}\n"
            f"grids: {' '.join(str(n) for n, _, _ in rows)}\n"
            f"DOF/wavelength: {lo:g}-{hi:g}\nfitted rate: {rate:.4f}\n")


def solve_one(cfg: RunConfig, n: int, out: Path) -> RunReport:
    try:
        report = run(cfg.solver(n))
    except InstabilityError as exc:
        if exc.report is not None:
            write_timeseries(exc.report, out / "timeseries.csv")
        raise
    write_timeseries(report, out / "timeseries.csv")
    return report


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    if len(cfg.grids) != 1:
        raise ConfigError("solve takes a single 'grid' value; use sweep for a list")
    out = cfg.output_dir()
    report = solve_one(cfg, cfg.grids[0], out)
    print(f"steps: {len(report) - 1}  max rel L2 error: {report.max_rel_error():.6e}  "
          f"E: {report.final_edef():.6e}  egenn drift: {report.relative_drift('egenn'):.3e}")
    print(f"wrote {out / 'timeseries.csv'}")
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if len(cfg.grids) < 3:
        raise ConfigError("sweep needs at least 3 grid sizes")
    out = cfg.output_dir()
    rows = []
    for n in cfg.grids:
        try:
            report = solve_one(cfg, n, out / f"N{n}")
        except Exception as exc:
            write_convergence(rows, out / "convergence.csv")
            (out / "summary.txt").write_text(f"sweep aborted at N_G={n}: {exc}\n")
            log.error("sweep aborted at N_G=%d: %s", n, exc)
            return EXIT_UNSTABLE if isinstance(exc, InstabilityError) else EXIT_FAILED
        rows.append((n, dof_per_wavelength(n, cfg.m, cfg.k), report.final_edef()))
        write_convergence(rows, out / "convergence.csv")
        print(f"N_G={n:4d}  DOF/wavelength={rows[-1][1]:8.3f}  E={rows[-1][2]:.6e}", flush=True)
    text = summary_text(cfg, rows)
    (out / "summary.txt").write_text(text)
    print(text, end="")
    return 0


def cmd_rates(args) -> int:
    rows = read_convergence(Path(args.csv))
    print(f"fitted rate: {fit_rate([(d, e) for _, d, e in rows]):.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hermite-maxwell", description=__doc__.split("\n")[0])
    p.add_argument("--threads", type=int, default=None, help="cap on BLAS/OpenMP threads")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", help="single run, writes timeseries.csv")
    s.add_argument("config")
    s.set_defaults(func=cmd_solve)
    s = sub.add_parser("sweep", help="grid sweep, writes convergence.csv and summary.txt")
    s.add_argument("config")
    s.set_defaults(func=cmd_sweep)
    s = sub.add_parser("rates", help="fit a convergence rate to a convergence.csv")
    s.add_argument("csv")
    s.set_defaults(func=cmd_rates)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with threadpool_limits(limits=args.threads):
            return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InstabilityError as exc:
        print(f"unstable: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
