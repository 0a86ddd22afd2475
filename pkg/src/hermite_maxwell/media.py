"""Media and the symmetrized first-order Maxwell system.

The state is split into ``V`` (electric field and the Lorentz ``L``/magnetic
``R`` auxiliaries) and ``W`` (magnetic field, ``S`` and ``K`` auxiliaries),
rescaled so that

    dV/dt = sum_k A_k dW/dx_k + M W - GammaV V
    dW/dt = sum_k A_k^T dV/dx_k - M^T V - GammaW W

Slot scalings::

    V = (sqrt(eps) E, sqrt(eps) w_e W_e L_j, sqrt(mu) w_m R_j)
    W = (sqrt(mu) H, sqrt(mu) w_m W_m S_j, sqrt(eps) w_e K_j)

Reduced modes keep only the field components that stay coupled:

* ``tm2d``: ``E = (Ex, Ey)``, ``H = Hz``, fields independent of ``z``.
* ``1d``: ``E = Ey``, ``H = Hz``, fields depending on ``x`` only.

``A_k[E_i, H_l] = c * levi_civita(i, k, l)`` reproduces ``dE/dt = curl H / eps``
and ``dH/dt = -curl E / mu``; see ``docs/tm_reduction.md``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import mpmath
import numpy as np

MODES = ("full3d", "tm2d", "1d")
_AXES = "xyz"


@dataclass(frozen=True)
class Pole:
    """Lorentz term ``strength**2 / (s**2 + damping*s + resonance**2)``."""

    strength: float
    resonance: float
    damping: float = 0.0


@dataclass(frozen=True)
class MediumSpec:
    epsilon: float = 1.0
    mu: float = 1.0
    electric_poles: tuple[Pole, ...] = ()
    magnetic_poles: tuple[Pole, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "electric_poles", tuple(self.electric_poles))
        object.__setattr__(self, "magnetic_poles", tuple(self.magnetic_poles))
        if self.epsilon <= 0 or self.mu <= 0:
            raise ValueError("epsilon and mu must be positive")
        for p in self.electric_poles + self.magnetic_poles:
            if min(p.strength, p.resonance, p.damping) < 0:
                raise ValueError(f"pole parameters must be non-negative: {p}")

    @property
    def c(self) -> float:
        return 1.0 / sqrt(self.epsilon * self.mu)

    @property
    def is_sellmeier(self) -> bool:
        return all(p.damping == 0 for p in self.electric_poles + self.magnetic_poles)

    @classmethod
    def from_dict(cls, d: dict) -> "MediumSpec":
        def poles(key):
            return tuple(Pole(**p) for p in d.get(key, ()))

        return cls(float(d.get("epsilon", 1.0)), float(d.get("mu", 1.0)),
                   poles("electric_poles"), poles("magnetic_poles"))


def dielectric(epsilon: float = 1.25, mu: float = 0.8) -> MediumSpec:
    return MediumSpec(epsilon, mu)


def lorentz_test_medium(damping: float = 0.0107) -> MediumSpec:
    """Single electric pole scaled from cubic silicon carbide (``damping=0`` gives Sellmeier)."""
    return MediumSpec(1.0, 1.0, (Pole(sqrt(1.052 * np.pi), 1.0, damping),))


@dataclass(frozen=True, eq=False)  # identity hash: used as a cache key
class SymmetrizedSystem:
    dim: int
    mode: str
    A: tuple[np.ndarray, ...]
    M: np.ndarray
    gamma_v: np.ndarray
    gamma_w: np.ndarray
    v_names: tuple[str, ...]
    w_names: tuple[str, ...]
    v_scales: np.ndarray
    w_scales: np.ndarray
    c: float
    medium: MediumSpec = field(repr=False)

    @property
    def n_v(self) -> int:
        return len(self.v_names)

    @property
    def n_w(self) -> int:
        return len(self.w_names)

    @property
    def damped(self) -> bool:
        return bool(np.any(self.gamma_v) or np.any(self.gamma_w))

    def v_index(self, name: str) -> int:
        return self.v_names.index(name)

    def w_index(self, name: str) -> int:
        return self.w_names.index(name)


def _levi_civita(i: int, j: int, k: int) -> int:
    return (i - j) * (j - k) * (k - i) // 2


def _components(mode: str):
    if mode == "full3d":
        return "xyz", "xyz"
    if mode == "tm2d":
        return "xy", "z"
    return "y", "z"


def assemble_system(medium: MediumSpec, dim: int, mode: str) -> SymmetrizedSystem:
    """Assemble ``A_k``, ``M`` and the damping diagonals for a medium."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    expected = {"full3d": 3, "tm2d": 2, "1d": 1}[mode]
    if dim != expected:
        raise ValueError(f"mode {mode!r} requires dim={expected}, got dim={dim}")

    eps, mu, c = medium.epsilon, medium.mu, medium.c
    e_comps, h_comps = _components(mode)

    v_names, v_scales = [], []
    w_names, w_scales = [], []
    for a in e_comps:
        v_names.append(f"E{a}")
        v_scales.append(sqrt(eps))
    for j, p in enumerate(medium.electric_poles):
        for a in e_comps:
            v_names.append(f"L{a}{j}")
            v_scales.append(sqrt(eps) * p.strength * p.resonance)
    for j, p in enumerate(medium.magnetic_poles):
        for a in h_comps:
            v_names.append(f"R{a}{j}")
            v_scales.append(sqrt(mu) * p.strength)
    for a in h_comps:
        w_names.append(f"H{a}")
        w_scales.append(sqrt(mu))
    for j, p in enumerate(medium.magnetic_poles):
        for a in h_comps:
            w_names.append(f"S{a}{j}")
            w_scales.append(sqrt(mu) * p.strength * p.resonance)
    for j, p in enumerate(medium.electric_poles):
        for a in e_comps:
            w_names.append(f"K{a}{j}")
            w_scales.append(sqrt(eps) * p.strength)

    n_v, n_w = len(v_names), len(w_names)
    vi = {n: i for i, n in enumerate(v_names)}
    wi = {n: i for i, n in enumerate(w_names)}

    A = []
    for k in range(dim):
        Ak = np.zeros((n_v, n_w))
        for a in e_comps:
            for b in h_comps:
                Ak[vi[f"E{a}"], wi[f"H{b}"]] = c * _levi_civita(_AXES.index(a), k, _AXES.index(b))
        A.append(Ak)

    M = np.zeros((n_v, n_w))
    gamma_v = np.zeros(n_v)
    gamma_w = np.zeros(n_w)
    for j, p in enumerate(medium.electric_poles):
        for a in e_comps:
            M[vi[f"E{a}"], wi[f"K{a}{j}"]] = -p.strength
            M[vi[f"L{a}{j}"], wi[f"K{a}{j}"]] = p.resonance
            gamma_w[wi[f"K{a}{j}"]] = p.damping
    for j, p in enumerate(medium.magnetic_poles):
        for a in h_comps:
            M[vi[f"R{a}{j}"], wi[f"H{a}"]] = p.strength
            M[vi[f"R{a}{j}"], wi[f"S{a}{j}"]] = -p.resonance
            gamma_v[vi[f"R{a}{j}"]] = p.damping

    for arr in A + [M, gamma_v, gamma_w]:
        arr.setflags(write=False)
    return SymmetrizedSystem(dim, mode, tuple(A), M, gamma_v, gamma_w,
                             tuple(v_names), tuple(w_names),
                             np.array(v_scales), np.array(w_scales), c, medium)


@dataclass(frozen=True)
class DispersionRoots:
    """Roots ``z = -theta + i*omega`` (``omega > 0``) of the modal quartic."""

    resonant: tuple[float, float]
    high: tuple[float, float]


def quartic_coefficients(medium: MediumSpec, k: float, dim: int = 2) -> list[float]:
    """Highest power first; ``dim`` sets ``|k|^2 = dim * k**2`` for the diagonal mode."""
    if len(medium.electric_poles) != 1 or medium.magnetic_poles:
        raise ValueError("dispersion quartic needs exactly one electric pole and no magnetic poles")
    if k <= 0:
        raise ValueError("k must be positive")
    p = medium.electric_poles[0]
    ck2 = medium.c**2 * dim * k**2
    return [1.0, p.damping, ck2 + p.strength**2 + p.resonance**2,
            ck2 * p.damping, ck2 * p.resonance**2]


def dispersion_quartic_roots(medium: MediumSpec, k: float, dim: int = 2,
                             tol: float = 1e-12) -> DispersionRoots:
    """Resonant and high-frequency roots, companion eigenvalues polished by Newton."""
    coeffs = quartic_coefficients(medium, k, dim)
    if coeffs[1] == 0:
        # undamped: biquadratic in z, roots purely imaginary
        with mpmath.workdps(40):
            b, c0 = mpmath.mpf(coeffs[2]), mpmath.mpf(coeffs[4])
            disc = mpmath.sqrt(b * b - 4 * c0)
            w2 = sorted([(b - disc) / 2, (b + disc) / 2])
            return DispersionRoots(resonant=(0.0, float(mpmath.sqrt(w2[0]))),
                                   high=(0.0, float(mpmath.sqrt(w2[1]))))
    with mpmath.workdps(40):
        co = [mpmath.mpf(c) for c in coeffs]
        poly = lambda z: mpmath.polyval(co, z)
        dpoly = lambda z: mpmath.polyval([co[i] * (4 - i) for i in range(4)], z)
        roots = []
        for z0 in np.roots(coeffs):
            if z0.imag <= 0:
                continue
            z = mpmath.mpc(z0)
            for _ in range(50):
                step = poly(z) / dpoly(z)
                z -= step
                if abs(step) <= mpmath.mpf(10) ** -30 * max(1, abs(z)):
                    break
            else:
                raise RuntimeError(f"Newton polishing did not converge from {z0}")
            scale = max(abs(c) * abs(z) ** (4 - i) for i, c in enumerate(co))
            if abs(poly(z)) > tol * scale:
                raise RuntimeError(f"quartic residual too large at {z}")
            roots.append((float(-z.real), float(z.imag)))
    if len(roots) != 2:
        raise RuntimeError(f"expected two roots with positive frequency, found {len(roots)}")
    roots.sort(key=lambda r: abs(r[1]))
    return DispersionRoots(resonant=roots[0], high=roots[1])
