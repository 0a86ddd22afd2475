"""Closed-form standing-wave solutions used for accuracy and conservation tests.

Every physical component has the separable form

    u(x, t) = P(x) * Im(C * exp(z t)),   z = -theta + i*omega,

with ``P`` a product of ``sin(k x_i)``/``cos(k x_i)`` factors.  In two
dimensions this is the diagonal mode ``H_z ~ sin(kx) sin(ky)``; the 1D mode is
``H_z ~ sin(kx)``.  With ``a = mu*k/|k|^2`` and ``|k|^2 = dim*k^2``:

    H_z: C = 1
    E_x: C = -a z                    (2d only)
    E_y: C = +a z
    K_x: C = +(k/eps + a z^2)/w_e^2,  K_y: C = -(k/eps + a z^2)/w_e^2
    L_i: C_K / z
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, pi, sqrt

import numpy as np

from .grid import Grid, HermiteField
from .media import MediumSpec, SymmetrizedSystem, dielectric, dispersion_quartic_roots, lorentz_test_medium

REGIMES = ("dielectric", "lorentz_resonant", "lorentz_highfreq",
           "sellmeier_resonant", "sellmeier_highfreq")

_PHASE = {"sin": 0.0, "cos": pi / 2}


@dataclass(frozen=True)
class Component:
    pattern: tuple[str, ...]
    coef: complex


@dataclass
class ExactSolution:
    regime: str
    k: float
    medium: MediumSpec
    dim: int
    theta: float
    omega: float
    components: dict[str, Component] = field(repr=False)

    @property
    def z(self) -> complex:
        return complex(-self.theta, self.omega)

    def temporal(self, name: str, t, order: int = 0):
        """``d^order/dt^order Im(C exp(z t))``."""
        c = self.components[name].coef * self.z**order
        return np.imag(c * np.exp(self.z * np.asarray(t, dtype=float)))

    def spatial_1d(self, name: str, axis: int, x, order: int = 0):
        ph = _PHASE[self.components[name].pattern[axis]]
        return self.k**order * np.sin(self.k * np.asarray(x, dtype=float) + ph + order * pi / 2)

    def evaluate(self, name: str, points, t, deriv=None, t_order: int = 0):
        """Value (or derivative) at points of shape ``(..., dim)``."""
        points = np.asarray(points, dtype=float)
        deriv = deriv or (0,) * self.dim
        val = self.temporal(name, t, t_order)
        for i in range(self.dim):
            val = val * self.spatial_1d(name, i, points[..., i], deriv[i])
        return val

    def amplitude_l2(self) -> float:
        """Spatial L2 norm of the ``H_z`` profile over the periodic box (``pi`` in 2d)."""
        return sqrt(pi) ** self.dim

    def node_dofs(self, name: str, grid: Grid, m: int, t: float, t_order: int = 0) -> np.ndarray:
        """Scaled Taylor block of one physical component at every node of ``grid``."""
        x = grid.coords_1d()
        dx = grid.dx
        tables = []
        for i in range(self.dim):
            tab = np.stack([self.spatial_1d(name, i, x, a) * dx**a / factorial(a)
                            for a in range(m + 1)], axis=-1)  # (n, m+1)
            tables.append(tab)
        out = np.asarray(self.temporal(name, t, t_order), dtype=float)
        if self.dim == 1:
            block = tables[0]
        elif self.dim == 2:
            block = np.einsum("ia,jb->ijab", tables[0], tables[1])
        else:
            block = np.einsum("ia,jb,kc->ijkabc", *tables)
        return out * block

    def state_dofs(self, system: SymmetrizedSystem, grid: Grid, m: int, t: float,
                   which: str, t_order: int = 0) -> HermiteField:
        """Scaled ``V`` (primal grid) or ``W`` (dual grid) data at time ``t``."""
        names = system.v_names if which == "V" else system.w_names
        scales = system.v_scales if which == "V" else system.w_scales
        data = np.zeros((len(names),) + grid.shape + (m + 1,) * grid.dim)
        for i, (name, s) in enumerate(zip(names, scales)):
            phys = _physical_name(name)
            if phys in self.components:
                data[i] = s * self.node_dofs(phys, grid, m, t, t_order)
        return HermiteField(grid, m, data, t)

    def pde_residual(self, points, t) -> float:
        """Max residual of the auxiliary-field Maxwell system at the given samples."""
        eps, mu = self.medium.epsilon, self.medium.mu
        ev = lambda n, d=None, to=0: self.evaluate(n, points, t, d, to)
        unit = lambda i: tuple(int(j == i) for j in range(self.dim))
        res = []
        if self.dim == 2:
            curl_h = {"Ex": ev("Hz", unit(1)), "Ey": -ev("Hz", unit(0))}
            curl_e_z = ev("Ey", unit(0)) - ev("Ex", unit(1))
        else:
            curl_h = {"Ey": -ev("Hz", unit(0))}
            curl_e_z = ev("Ey", unit(0))
        res.append(ev("Hz", to=1) + curl_e_z / mu)
        for e, ch in curl_h.items():
            a = e[1]
            r = ev(e, to=1) - ch / eps
            for j, p in enumerate(self.medium.electric_poles):
                kname, lname = f"K{a}", f"L{a}"
                r = r + p.strength**2 * ev(kname)
                res.append(ev(kname, to=1) + p.damping * ev(kname) + p.resonance**2 * ev(lname) - ev(e))
                res.append(ev(lname, to=1) - ev(kname))
            res.append(r)
        return float(max(np.max(np.abs(r)) for r in res))


def _physical_name(slot: str) -> str:
    # slot names carry the pole index as a trailing digit; the test solutions have one pole
    return slot[:-1] if slot[-1].isdigit() else slot


def default_medium(regime: str) -> MediumSpec:
    """Standard test medium: ``eps=5/4, mu=4/5`` or the silicon-carbide-like pole."""
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    if regime == "dielectric":
        return dielectric()
    return lorentz_test_medium(0.0 if regime.startswith("sellmeier") else 0.0107)


def exact_solution(regime: str, k: float, medium: MediumSpec | None = None,
                   dim: int = 2) -> ExactSolution:
    """Exact solution for one of the test regimes.

    Without an explicit medium ``default_medium(regime)`` is used.
    """
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    if dim not in (1, 2):
        raise ValueError("exact solutions are available for dim 1 and 2")
    if medium is None:
        medium = default_medium(regime)
    if regime == "dielectric":
        if medium.electric_poles or medium.magnetic_poles:
            raise ValueError("dielectric regime requires a medium without poles")
        theta, omega = 0.0, medium.c * sqrt(dim) * k
    else:
        if medium.magnetic_poles or len(medium.electric_poles) != 1:
            raise ValueError(f"{regime} requires exactly one electric pole")
        if regime.startswith("sellmeier") and not medium.is_sellmeier:
            raise ValueError("sellmeier regimes require zero damping")
        roots = dispersion_quartic_roots(medium, k, dim)
        theta, omega = roots.resonant if regime.endswith("resonant") else roots.high

    z = complex(-theta, omega)
    a = medium.mu * k / (dim * k**2)
    comps = {"Hz": Component(("sin",) * dim, 1.0 + 0j)}
    if dim == 2:
        comps["Ex"] = Component(("sin", "cos"), -a * z)
        comps["Ey"] = Component(("cos", "sin"), a * z)
    else:
        comps["Ey"] = Component(("cos",), a * z)
    for p in medium.electric_poles:
        ck = (k / medium.epsilon + a * z * z) / p.strength**2
        for e in [n for n in ("Ex", "Ey") if n in comps]:
            sign = 1.0 if (e == "Ex") else -1.0
            pat = comps[e].pattern
            comps["K" + e[1]] = Component(pat, sign * ck)
            comps["L" + e[1]] = Component(pat, sign * ck / z)
    return ExactSolution(regime, k, medium, dim, theta, omega, comps)
