"""Staggered Hermite time stepping.

``V`` lives on the primal grid at integer time levels, ``W`` on the dual grid
at half-integer levels.  A half-step interpolates the other field on every
cell centered at an update node, runs the time-derivative recursion on the
cell polynomial, and adds the centered Taylor increment

    2 * sum_{l=1}^{q} (dt/2)^(2l-1) / (2l-1)! * U^l

restricted to the (m+1)^d leading coefficients.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from . import dissipation as diss
from . import diagnostics as dg
from .exact import exact_solution
from .grid import Grid, HermiteField
from .hbinterp import build_hb_operator, hb_project_field, hb_project_wide
from .media import MediumSpec, SymmetrizedSystem, assemble_system
from .tensorpoly import TensorPoly, diff_coeffs

log = logging.getLogger(__name__)


class InstabilityError(RuntimeError):
    def __init__(self, step: int, time: float, report=None):
        super().__init__(f"non-finite solution at step {step} (t={time:.6g})")
        self.step = step
        self.time = time
        self.report = report


def default_q(m: int) -> int:
    return m + 2 if m <= 6 else m + 3


@dataclass
class SolverConfig:
    m: int
    n: int
    t_final: float
    medium: MediumSpec
    mode: str = "tm2d"
    q: int | None = None
    cfl: float = 0.9
    regime: str | None = "dielectric"
    k: float = 10.0
    start: str = "exact"          # exact | self_start
    dissipation: bool = True
    error_every: int = 1
    energy_every: int = 10

    def __post_init__(self):
        if self.q is None:
            self.q = default_q(self.m)
        if self.q < 1:
            raise ValueError("q must be at least 1")
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if self.cfl <= 0:
            raise ValueError("cfl must be positive")
        if self.cfl >= 1:
            warnings.warn(f"cfl={self.cfl} violates the domain-of-dependence limit c*dt < dx")
        if self.n < 2:
            raise ValueError("grid needs at least 2 nodes per direction")
        if self.t_final < 0:
            raise ValueError("t_final must be non-negative")
        if self.start not in ("exact", "self_start"):
            raise ValueError(f"unknown start {self.start!r}")
        if self.start == "exact" and self.regime is None:
            raise ValueError("exact start needs a regime")

    @property
    def dim(self) -> int:
        return {"full3d": 3, "tm2d": 2, "1d": 1}[self.mode]

    @property
    def dx(self) -> float:
        return 2 * math.pi / self.n

    @property
    def n_steps(self) -> int:
        nominal = self.cfl * self.dx / self.medium.c
        return int(math.ceil(self.t_final / nominal - 1e-9)) if self.t_final > 0 else 0

    @property
    def dt(self) -> float:
        # shrink slightly so that an integer number of steps lands on t_final
        if self.n_steps == 0:
            return self.cfl * self.dx / self.medium.c
        return self.t_final / self.n_steps


@lru_cache(maxsize=64)
def _sparse_plan(system: SymmetrizedSystem, adjoint: bool):
    """Nonzero entries of ``A_k`` (grouped by source column) and ``M``.

    ``adjoint=True`` describes ``sum A_k^T d/dx_k - M^T``.
    """
    mats = [a.T if adjoint else a for a in system.A]
    mm = -system.M.T if adjoint else system.M
    deriv = []
    for k, a in enumerate(mats):
        for j in np.flatnonzero(np.any(a != 0, axis=0)):
            rows = tuple((int(i), float(a[i, j])) for i in np.flatnonzero(a[:, j]))
            deriv.append((k, int(j), rows))
    local = tuple((int(i), int(j), float(mm[i, j])) for i, j in zip(*np.nonzero(mm)))
    return mm.shape[0], tuple(deriv), local


def _apply(plan, u: np.ndarray, dim: int, dx: float) -> np.ndarray:
    n_out, deriv, local = plan
    out = np.zeros((n_out,) + u.shape[1:])
    for i, j, a in local:
        out[i] += a * u[j]
    for k, j, rows in deriv:
        d = diff_coeffs(u[j], u.ndim - 1 - dim + k, dx)
        for i, a in rows:
            out[i] += a * d
    return out


def apply_bv(system: SymmetrizedSystem, w: np.ndarray, dx: float) -> np.ndarray:
    """``sum_k A_k d/dx_k W + M W`` on component-first cell polynomials."""
    return _apply(_sparse_plan(system, False), w, system.dim, dx)


def apply_bw(system: SymmetrizedSystem, v: np.ndarray, dx: float) -> np.ndarray:
    """``sum_k A_k^T d/dx_k V - M^T V``."""
    return _apply(_sparse_plan(system, True), v, system.dim, dx)


def _operators(system, direction):
    if direction == "V":
        return (lambda u, dx: apply_bv(system, u, dx)), (lambda u, dx: apply_bw(system, u, dx))
    if direction == "W":
        return (lambda u, dx: apply_bw(system, u, dx)), (lambda u, dx: apply_bv(system, u, dx))
    raise ValueError(f"direction must be 'V' or 'W', got {direction!r}")


def recursion_stages(system: SymmetrizedSystem, source: TensorPoly, q: int, dx: float,
                     direction: str = "V", dissipation_terms=None) -> list[np.ndarray]:
    """Odd time derivatives ``U^1..U^q`` at the half-step midpoint.

    ``direction='V'`` computes V-derivatives from an interpolated W polynomial,
    ``'W'`` the mirror image.  ``dissipation_terms[l-1] = (cross, own)`` adds
    ``B(cross) + own`` to stage ``l``.
    """
    forward, backward = _operators(system, direction)
    n_src = system.n_w if direction == "V" else system.n_v
    if source.coeffs.shape[0] != n_src:
        raise ValueError(f"source has {source.coeffs.shape[0]} components, system expects {n_src}")
    stages = []
    extra = dissipation_terms or [(None, None)] * q
    for ell in range(1, q + 1):
        cross, own = extra[ell - 1]
        if ell == 1:
            w = source.coeffs
        else:
            w = backward(stages[-1], dx)
            if cross is not None:
                w = w + cross
        u = forward(w, dx)
        if own is not None:
            u = u + own
        stages.append(u)
    return stages


def taylor_weights(q: int, dt: float) -> np.ndarray:
    return np.array([2 * (dt / 2) ** (2 * ell - 1) / factorial(2 * ell - 1) for ell in range(1, q + 1)])


def cell_recursion(system: SymmetrizedSystem, source: TensorPoly, q: int, dt: float, dx: float,
                   direction: str = "V", dissipation_terms=None) -> TensorPoly:
    """Centered Taylor increment over one step of length ``dt``."""
    if dt == 0:
        raise ValueError("dt must be non-zero")
    stages = recursion_stages(system, source, q, dx, direction, dissipation_terms)
    inc = np.zeros_like(stages[0])
    for wgt, s in zip(taylor_weights(q, dt), stages):
        inc += wgt * s
    return TensorPoly(inc, source.dim)


def increment(target: HermiteField, source: HermiteField, system: SymmetrizedSystem,
              q: int, dt: float, dissipation_terms=None) -> np.ndarray:
    """DOF increment for every node of ``target`` (no time checks)."""
    if target.grid.dual == source.grid.dual or target.grid.n != source.grid.n:
        raise ValueError("target and source must live on dual grids of the same size")
    if target.m != source.m:
        raise ValueError("target and source use different m")
    direction = "W" if target.grid.dual else "V"
    m, dim = target.m, target.grid.dim
    cells = hb_project_field(source.data, dim, m, onto_dual=target.grid.dual,
                             op=build_hb_operator(m))
    inc = cell_recursion(system, cells, q, dt, target.grid.dx, direction, dissipation_terms)
    return inc.coeffs[(Ellipsis,) + (slice(0, m + 1),) * dim]


def half_step(target: HermiteField, source: HermiteField, system: SymmetrizedSystem,
              q: int, dt: float, dissipation_terms=None) -> HermiteField:
    """Advance ``target`` by ``dt`` using ``source`` at the midpoint time."""
    if not math.isclose(source.time, target.time + dt / 2, rel_tol=1e-12, abs_tol=1e-12 * (1 + abs(dt))):
        raise ValueError(f"time mismatch: source at {source.time}, target at {target.time}, dt={dt}")
    inc = increment(target, source, system, q, dt, dissipation_terms)
    return target.with_data(target.data + inc, target.time + dt)


def taylor_derivatives(own: HermiteField, other: HermiteField, system: SymmetrizedSystem,
                       order: int) -> list[np.ndarray]:
    """Time derivatives ``d^j U/dt^j`` (j = 0..order) of the field ``own`` at its nodes.

    Both fields must be given at the same time.  The other field is
    interpolated on the usual cells centered at ``own``'s nodes; ``own`` itself
    on double-width cells centered at its nodes, so both polynomials share the
    node as their center.
    """
    if own.grid.dual == other.grid.dual:
        raise ValueError("fields must live on dual grids")
    m, dim, dx = own.m, own.grid.dim, own.grid.dx
    own_is_w = own.grid.dual
    p_other = hb_project_field(other.data, dim, m, onto_dual=own.grid.dual).coeffs
    p_own = hb_project_wide(own.data, dim, m).coeffs
    if own_is_w:
        w, v = p_own, p_other
    else:
        v, w = p_own, p_other
    gv = system.gamma_v.reshape((-1,) + (1,) * (v.ndim - 1))
    gw = system.gamma_w.reshape((-1,) + (1,) * (w.ndim - 1))
    out = []
    blk = (Ellipsis,) + (slice(0, m + 1),) * dim
    for j in range(order + 1):
        out.append((w if own_is_w else v)[blk].copy())
        v, w = apply_bv(system, w, dx) - gv * v, apply_bw(system, v, dx) - gw * w
    # the nodal value is the stored data, not the wide interpolant
    out[0] = own.data.copy()
    return out


def self_start(v0: HermiteField, w0: HermiteField, system: SymmetrizedSystem,
               q: int, dt: float) -> HermiteField:
    """``W(dt/2)`` from data at ``t = 0`` by a one-sided Taylor step.

    All powers of ``dt/2`` up to ``2q`` are kept.
    """
    if not (math.isclose(v0.time, w0.time)):
        raise ValueError("self_start needs V and W at the same time")
    derivs = taylor_derivatives(w0, v0, system, 2 * q)
    data = w0.data.copy()
    h = dt / 2
    for j in range(1, 2 * q + 1):
        data += h**j / factorial(j) * derivs[j]
    return w0.with_data(data, w0.time + h)


def shifted_derivatives(derivs: list[np.ndarray], h: float, count: int) -> list[np.ndarray]:
    """Taylor-shift a list of time derivatives by ``h``, keeping ``count`` orders."""
    out = []
    for j in range(count):
        acc = np.zeros_like(derivs[0])
        for i in range(len(derivs) - j):
            acc += h**i / factorial(i) * derivs[j + i]
        out.append(acc)
    return out


def _initial_state(config: SolverConfig, system: SymmetrizedSystem, exact, dt: float):
    """``V(0)``, ``W(dt/2)`` and the Nordsieck arrays for both fields."""
    m, dim, q = config.m, config.dim, config.q
    grid = Grid(config.n, dim)
    dual = grid.staggered()
    v0 = exact.state_dofs(system, grid, m, 0.0, "V")
    p = diss.DEFAULT_DEGREE
    use_diss = config.dissipation and system.damped
    if config.start == "exact":
        w = exact.state_dofs(system, dual, m, dt / 2, "W")
        if use_diss:
            dv = [exact.state_dofs(system, grid, m, 0.0, "V", j).data for j in range(p)]
            dw = [exact.state_dofs(system, dual, m, dt / 2, "W", j).data for j in range(p)]
    else:
        w0 = exact.state_dofs(system, dual, m, 0.0, "W")
        w = self_start(v0, w0, system, q, dt)
        if use_diss:
            dv = taylor_derivatives(v0, w0, system, p - 1)
            full = taylor_derivatives(w0, v0, system, p - 1 + 2 * q)
            dw = shifted_derivatives(full, dt / 2, p)
    state_v = state_w = None
    if use_diss:
        state_v = diss.nordsieck_init(dv, system.gamma_v, dt, 0.0, p)
        state_w = diss.nordsieck_init(dw, system.gamma_w, dt, dt / 2, p)
    return v0, w, state_v, state_w


def leapfrog_step(v: HermiteField, w: HermiteField, dv, dw, system: SymmetrizedSystem,
                  q: int, dt: float):
    """One full step: ``V(t_n) -> V(t_{n+1})`` then ``W(t_{n+1/2}) -> W(t_{n+3/2})``.

    ``dv``/``dw`` are the Nordsieck arrays of the damping integrals (``None``
    when the field carries no damping); each is predicted to the update
    midpoint for the recursion, then shifted a full step and corrected with
    the new field data.
    """
    m, dim = v.m, v.grid.dim
    n_v, n_w = system.n_v, system.n_w
    damped = dv is not None or dw is not None

    terms = None
    if damped:
        pv = diss.nordsieck_predict(dv, dt / 2) if dv is not None else None
        terms = diss.stage_terms(pv, dw, q, n_v, n_w, dim, m, onto_dual=False)
    v_new = half_step(v, w, system, q, dt, terms)
    if dv is not None:
        dv = diss.nordsieck_correct(diss.nordsieck_predict(dv, dt), v_new.data)

    terms = None
    if damped:
        pw = diss.nordsieck_predict(dw, dt / 2) if dw is not None else None
        terms = diss.stage_terms(pw, dv, q, n_w, n_v, dim, m, onto_dual=True)
    w_new = half_step(w, v_new, system, q, dt, terms)
    if dw is not None:
        dw = diss.nordsieck_correct(diss.nordsieck_predict(dw, dt), w_new.data)
    return v_new, w_new, dv, dw


def _finite(*arrays) -> bool:
    return all(np.isfinite(a).all() for a in arrays)


def run(config: SolverConfig) -> "dg.RunReport":
    """Evolve the configured problem and record diagnostics.

    Row ``s`` of the report is taken once ``V(t_s)`` and ``W(t_{s+1/2})`` are
    known: the ``H_z`` error is measured on ``W(t_{s+1/2})``, ``egenn`` at
    ``t_s`` and ``egenh`` at ``t_{s-1/2}``.  Row 0 obtains the earlier levels
    by stepping backwards without damping terms.
    """
    system = assemble_system(config.medium, config.dim, config.mode)
    if config.regime is None:
        raise ValueError("run needs a regime providing initial data")
    exact = exact_solution(config.regime, config.k, config.medium, config.dim)
    dt, n_steps, q, m, dim = config.dt, config.n_steps, config.q, config.m, config.dim
    log.info("run %s m=%d q=%d n=%d dt=%.6g steps=%d", config.regime, m, q, config.n, dt, n_steps)

    v, w, dv, dw = _initial_state(config, system, exact, dt)
    report = dg.RunReport(config=config)
    sum_sq = 0.0

    def error_row(wf, step, count):
        nonlocal sum_sq
        e = dg.hz_error_samples(wf, exact, system)
        sq = dg.l2_sq(e, wf.grid.dx, m, dim)
        if count:
            sum_sq += sq
        return math.sqrt(sq) / exact.amplitude_l2(), dg.edef(sum_sq, step)

    # row 0
    w_prev = half_step(w, v, system, q, -dt)
    v_prev = half_step(v, w_prev, system, q, -dt)
    sv, sw = dg.hb_samples(v), dg.hb_samples(w)
    swp, svp = dg.hb_samples(w_prev), dg.hb_samples(v_prev)
    rel, _ = error_row(w, 0, False)
    report.append(step=0, time=v.time, rel_l2_error=rel, edef_accumulated=0.0,
                  egenn=dg.egenn(sv, sw, swp), egenh=dg.egenh(swp, sv, svp),
                  hb_energy_V=dg._sq(sv), hb_energy_W=dg._sq(sw))

    for s in range(n_steps):
        v_new, w_new, dv, dw = leapfrog_step(v, w, dv, dw, system, q, dt)
        step = s + 1
        # pin the clocks to exact multiples of dt so they do not drift
        v_new.time, w_new.time = step * dt, (step + 0.5) * dt
        if not _finite(v_new.data, w_new.data):
            raise InstabilityError(step, v_new.time, report)

        last = step == n_steps
        # the accumulated metric needs every step; the cadence only thins the output
        rel, ed = error_row(w_new, step, True)
        if not (step % config.error_every == 0 or last):
            rel = ed = None
        en = eh = ev = ew = None
        if step % config.energy_every == 0 or last:
            sv, svp = dg.hb_samples(v_new), dg.hb_samples(v)
            swn, sw = dg.hb_samples(w_new), dg.hb_samples(w)
            en, eh = dg.egenn(sv, swn, sw), dg.egenh(sw, sv, svp)
            ev, ew = dg._sq(sv), dg._sq(swn)
        # squared diagnostics overflow before the fields themselves do
        if not all(x is None or math.isfinite(x) for x in (rel, ed, en, eh, ev, ew)):
            raise InstabilityError(step, v_new.time, report)
        report.append(step=step, time=v_new.time, rel_l2_error=rel, edef_accumulated=ed,
                      egenn=en, egenh=eh, hb_energy_V=ev, hb_energy_W=ew)
        v, w = v_new, w_new

    report.final_V, report.final_W = v, w
    return report
