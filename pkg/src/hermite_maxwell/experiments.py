"""Desk-scale experiment protocols shared by the acceptance suite and scripts/.

Sweeps run the standing-wave solutions at ``k=10, T=5`` unless stated
otherwise; each grid range starts where the error is near 1e-2 and spans
roughly a factor of two in DOF per wavelength.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .diagnostics import RunReport, fit_rate
from .exact import default_medium
from .stepper import SolverConfig, run

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Sweep:
    regime: str
    m: int
    grids: tuple[int, ...]
    k: float = 10.0
    t_final: float = 5.0
    q: int | None = None
    start: str = "exact"
    mode: str = "tm2d"


SWEEPS = {
    "dielectric_m2": Sweep("dielectric", 2, (36, 42, 48, 54, 60, 66)),
    "dielectric_m3": Sweep("dielectric", 3, (28, 32, 36, 40, 44, 48)),
    "dielectric_m4": Sweep("dielectric", 4, (25, 30, 35, 40, 45, 50, 55, 60)),
    "lorentz_resonant_m3": Sweep("lorentz_resonant", 3, (20, 24, 28, 32, 36, 40)),
    "lorentz_highfreq_m2": Sweep("lorentz_highfreq", 2, (40, 50, 60, 70, 80)),
    "lorentz_highfreq_m4": Sweep("lorentz_highfreq", 4, (25, 30, 35, 40, 45, 50, 55, 60)),
    "sellmeier_highfreq_m4": Sweep("sellmeier_highfreq", 4, (25, 30, 35, 40, 45, 50, 55, 60)),
    # full scale: hours on one core
    "dielectric_m3_full": Sweep("dielectric", 3, tuple(range(125, 276, 25)), k=40.0, t_final=100.0),
}


@dataclass
class SweepResult:
    sweep: Sweep
    rows: list[tuple[int, float, float, float]]   # N_G, DOF/wavelength, E, max relative error

    @property
    def rate(self) -> float:
        """Fitted order from the accumulated metric."""
        return fit_rate([(d, e) for _, d, e, _ in self.rows])

    @property
    def rate_max_rel(self) -> float:
        return fit_rate([(d, r) for _, d, _, r in self.rows])


def solver_config(sw: Sweep, n: int, **overrides) -> SolverConfig:
    kw = dict(m=sw.m, n=n, t_final=sw.t_final, medium=default_medium(sw.regime), mode=sw.mode,
              q=sw.q, regime=sw.regime, k=sw.k, start=sw.start, energy_every=10**9)
    kw.update(overrides)
    return SolverConfig(**kw)


def run_sweep(sw: Sweep, grids=None, **overrides) -> SweepResult:
    rows = []
    for n in grids or sw.grids:
        rep: RunReport = run(solver_config(sw, n, **overrides))
        row = (n, n * (sw.m + 1) / sw.k, rep.final_edef(), rep.max_rel_error())
        log.info("%s m=%d N_G=%d E=%.3e", sw.regime, sw.m, n, row[2])
        rows.append(row)
    return SweepResult(sw, rows)


def conservation_run(regime: str, m: int, q: int, n: int = 40, k: float = 10.0,
                     t_final: float = 5.0, energy_every: int = 1) -> RunReport:
    """Undamped run sampling the discrete energies (used for drift checks)."""
    cfg = SolverConfig(m=m, n=n, t_final=t_final, medium=default_medium(regime), q=q,
                       regime=regime, k=k, energy_every=energy_every, error_every=10**9)
    return run(cfg)


def drift_trend(values) -> float:
    """Net relative change implied by a linear fit of ``E_s/E_0`` over the run."""
    vals = np.asarray([v for v in values if v is not None], dtype=float)
    if len(vals) < 2:
        return 0.0
    slope = np.polyfit(np.arange(len(vals)), vals / vals[0] - 1.0, 1)[0]
    return float(slope * (len(vals) - 1))
