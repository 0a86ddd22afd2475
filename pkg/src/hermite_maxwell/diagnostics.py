"""HB seminorms, discrete conserved quantities, error metrics and rate fits.

The HB semi-inner product of two piecewise polynomials on the same cells is

    <f, g>_m = sum_cells int D^{(m+1,...,m+1)} f * D^{(m+1,...,m+1)} g dx,

integrated exactly with ``m+1`` Gauss-Legendre points per direction.  The
integrand is represented by its weighted samples (``hb_samples``) so that
inner products become dot products and linear combinations of fields
never need to be re-interpolated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import HermiteField
from .hbinterp import hb_project_field
from .tensorpoly import TensorPoly, poly_eval_grid


def _gauss(m: int):
    x, w = np.polynomial.legendre.leggauss(m + 1)
    return x / 2, w / 2


def poly_samples(cells: TensorPoly, m: int, dx: float) -> np.ndarray:
    """Weighted quadrature samples of the mixed ``(m+1)``-th derivative of cell polynomials.

    Physical scaling is included, so ``sum(s**2)`` is the squared seminorm.
    """
    dim = cells.dim
    deg = cells.degree
    if deg < m + 1:
        return np.zeros(cells.batch_shape + (m + 1,) * dim)
    c = cells.coeffs[(Ellipsis,) + (slice(m + 1, None),) * dim]
    # d^{m+1}/dxi^{m+1} xi^j = j!/(j-m-1)! xi^{j-m-1}
    fac = np.array([math.factorial(j) / math.factorial(j - m - 1) for j in range(m + 1, deg + 1)])
    for k in range(dim):
        shape = [1] * c.ndim
        shape[c.ndim - dim + k] = len(fac)
        c = c * fac.reshape(shape)
    x, w = _gauss(m)
    vals = poly_eval_grid(TensorPoly(c, dim), x)
    wt = w
    for _ in range(dim - 1):
        wt = np.multiply.outer(wt, w)
    scale = dx ** (0.5 * dim - (m + 1) * dim)
    return vals * np.sqrt(wt) * scale


def hb_samples(f: HermiteField) -> np.ndarray:
    """Samples for the piecewise HB interpolant of node data (cells on the staggered grid)."""
    cells = hb_project_field(f.data, f.grid.dim, f.m, onto_dual=not f.grid.dual)
    return poly_samples(cells, f.m, f.grid.dx)


def hb_inner(f, g, m: int | None = None, dx: float | None = None) -> float:
    """HB semi-inner product.

    ``f`` and ``g`` are either two ``HermiteField`` on the same grid or two
    ``TensorPoly`` cell collections (then ``m`` and ``dx`` are required).
    """
    if isinstance(f, HermiteField):
        if not isinstance(g, HermiteField) or f.grid != g.grid or f.m != g.m:
            raise ValueError("hb_inner needs fields on the same grid with the same m")
        if f.n_comp != g.n_comp:
            raise ValueError("component count mismatch")
        return float(np.vdot(hb_samples(f), hb_samples(g)))
    if m is None or dx is None:
        raise ValueError("m and dx are required for cell polynomials")
    if f.coeffs.shape != g.coeffs.shape:
        raise ValueError("cell collections differ in shape")
    return float(np.vdot(poly_samples(f, m, dx), poly_samples(g, m, dx)))


def hb_seminorm(f, m: int | None = None, dx: float | None = None) -> float:
    return math.sqrt(max(hb_inner(f, f, m, dx), 0.0))


def _sq(s: np.ndarray) -> float:
    return float(np.vdot(s, s))


def egenn(sv: np.ndarray, sw_next: np.ndarray, sw_prev: np.ndarray) -> float:
    """``|V_n|^2 + |W_{n+1/2} + W_{n-1/2}|^2/4 - |W_{n+1/2} - W_{n-1/2}|^2/4`` from samples.

    The difference of the two ``W`` levels is the stored ``W`` update increment.
    """
    return _sq(sv) + 0.25 * _sq(sw_next + sw_prev) - 0.25 * _sq(sw_next - sw_prev)


def egenh(sw: np.ndarray, sv_next: np.ndarray, sv_prev: np.ndarray) -> float:
    """Half-level counterpart: ``W_{n+1/2}`` with ``V_{n+1}`` and ``V_n``."""
    return _sq(sw) + 0.25 * _sq(sv_next + sv_prev) - 0.25 * _sq(sv_next - sv_prev)


def conserved_quantities(v: HermiteField, w_prev: HermiteField, w_next: HermiteField,
                         v_prev: HermiteField) -> tuple[float, float]:
    """``(Egenn at v.time, Egenh at w_prev.time)``.

    Expects ``w_prev``/``w_next`` at ``v.time -/+ dt/2`` and ``v_prev`` at
    ``v.time - dt``.
    """
    dt = w_next.time - w_prev.time
    ok = (math.isclose(v.time - w_prev.time, dt / 2, abs_tol=1e-12)
          and math.isclose(v.time - v_prev.time, dt, abs_tol=1e-12))
    if not ok or dt <= 0:
        raise ValueError("fields are not at consistent staggered times")
    sv, svp = hb_samples(v), hb_samples(v_prev)
    swp, swn = hb_samples(w_prev), hb_samples(w_next)
    return egenn(sv, swn, swp), egenh(swp, sv, svp)


def submesh_points(m: int) -> np.ndarray:
    """Cell-centered ``2m`` points per direction in local coordinates (one point for ``m=0``)."""
    n = max(2 * m, 1)
    return -0.5 + (np.arange(n) + 0.5) / n


def field_samples(f: HermiteField, comp: int, points_1d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values of the HB interpolant of one component on a tensor sub-mesh of every cell.

    Returns ``(values, coords)`` where ``coords[k]`` holds the physical
    coordinate along axis ``k`` broadcastable against ``values``.
    """
    dim = f.grid.dim
    cells = hb_project_field(f.data[comp:comp + 1], dim, f.m, onto_dual=not f.grid.dual)
    vals = poly_eval_grid(cells, points_1d)[0]
    centers = f.grid.staggered().coords_1d()
    coords = []
    for k in range(dim):
        x = centers[:, None] + points_1d[None, :] * f.grid.dx   # (n, p)
        shape = [1] * (2 * dim)
        shape[k], shape[dim + k] = x.shape
        coords.append(x.reshape(shape))
    return vals, coords


def hz_error_samples(w: HermiteField, exact, system, scale_index: int | None = None) -> np.ndarray:
    """Pointwise ``H_z`` error on the ``2m x 2m`` per-cell sub-mesh at ``w.time``."""
    idx = system.w_index("Hz") if scale_index is None else scale_index
    pts = submesh_points(w.m)
    vals, coords = field_samples(w, idx, pts)
    vals = vals / system.w_scales[idx]
    ref = exact.temporal("Hz", w.time)
    for k, x in enumerate(coords):
        ref = ref * exact.spatial_1d("Hz", k, x)
    return vals - ref


def l2_sq(err: np.ndarray, cell_dx: float, m: int, dim: int, weight: str = "area") -> float:
    """Squared discrete l2 norm of sub-mesh samples.

    ``weight='area'`` multiplies by the sub-cell volume so the sum approximates
    the continuous L2 norm; ``'unit'`` uses the raw sum of squares.
    """
    s = float(np.vdot(err, err))
    if weight == "unit":
        return s
    if weight != "area":
        raise ValueError(f"unknown weight {weight!r}")
    return s * (cell_dx / max(2 * m, 1)) ** dim


def edef(sum_sq: float, n_steps: int) -> float:
    """``sqrt(sum_j ||e_j||^2 / (4 sqrt(N_T)))``."""
    if n_steps <= 0:
        return 0.0
    return math.sqrt(sum_sq / (4.0 * math.sqrt(n_steps)))


def fit_rate(points) -> float:
    """Least-squares slope of ``log(error)`` against ``log(DOF per wavelength)``, sign flipped.

    ``points`` is a sequence of ``(dof_per_wavelength, error)`` pairs.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("fit_rate needs at least 3 (abscissa, error) pairs")
    if np.any(pts <= 0) or not np.all(np.isfinite(pts)):
        raise ValueError("abscissas and errors must be positive and finite")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    if np.ptp(x) <= 1e-12 * max(1.0, np.abs(x).max()):
        raise ValueError("degenerate abscissas: all DOF/wavelength values coincide")
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


@dataclass
class RunReport:
    """Time series produced by ``stepper.run``.

    Unsampled entries are ``None``.  ``egenh`` on row ``s`` refers to the
    half level ``s - 1/2``; ``rel_l2_error`` on row ``s >= 1`` is measured on
    ``H_z`` at ``t_{s-1/2}``, the latest ``W`` level used to reach ``t_s``.
    """

    config: object = field(repr=False, default=None)
    step: list[int] = field(default_factory=list)
    time: list[float] = field(default_factory=list)
    rel_l2_error: list[float | None] = field(default_factory=list)
    edef_accumulated: list[float | None] = field(default_factory=list)
    egenn: list[float | None] = field(default_factory=list)
    egenh: list[float | None] = field(default_factory=list)
    hb_energy_V: list[float | None] = field(default_factory=list)
    hb_energy_W: list[float | None] = field(default_factory=list)
    final_V: HermiteField | None = field(default=None, repr=False)
    final_W: HermiteField | None = field(default=None, repr=False)

    COLUMNS = ("step", "time", "rel_l2_error", "edef_accumulated", "egenn", "egenh",
               "hb_energy_V", "hb_energy_W")

    def append(self, **row):
        unknown = set(row) - set(self.COLUMNS)
        if unknown:
            raise KeyError(f"unknown report columns {sorted(unknown)}")
        if self.time and row["time"] < self.time[-1]:
            raise ValueError("report times must be non-decreasing")
        for col in self.COLUMNS:
            val = row.get(col)
            if isinstance(val, float) and not math.isfinite(val):
                raise ValueError(f"non-finite {col} at step {row.get('step')}")
            getattr(self, col).append(val)

    def __len__(self) -> int:
        return len(self.step)

    def rows(self):
        for i in range(len(self)):
            yield tuple(getattr(self, c)[i] for c in self.COLUMNS)

    def max_rel_error(self) -> float:
        vals = [v for v in self.rel_l2_error if v is not None]
        return max(vals) if vals else 0.0

    def final_edef(self) -> float:
        vals = [v for v in self.edef_accumulated if v is not None]
        return vals[-1] if vals else 0.0

    def relative_drift(self, column: str = "egenn") -> float:
        """``max |E_s - E_0| / |E_0|`` over sampled rows."""
        vals = [v for v in getattr(self, column) if v is not None]
        if not vals:
            return 0.0
        e0 = vals[0]
        if e0 == 0:
            return float(max(abs(v) for v in vals))
        return float(max(abs(v - e0) for v in vals) / abs(e0))
