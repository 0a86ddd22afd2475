"""Nordsieck treatment of the damping terms ``-GammaV V`` and ``-GammaW W``.

For each damped field ``U`` we carry ``D`` with ``dD/dt = -Gamma U`` as a
degree-``p`` polynomial in time, stored in Nordsieck form

    z_j = h**j / j! * d^j D / dt^j,   j = 0..p,

per node, per damped component, per spatial DOF.  The recursion needs time
derivatives of ``D`` at the midpoint of each half-step: they come from the
predicted array for the field being updated, and from the last corrected
array (HB-interpolated onto the update cells) for the other field.

The corrector is the fixed-step Adams-Moulton method in Nordsieck form: after
each update of ``U`` the array is shifted by ``h`` and corrected along

    l(x) = int_{-1}^{x} prod_{i=1}^{p-1} (1 + s/i) ds

so that ``dD/dt`` matches ``-Gamma U`` at the new time.  Its derivative then
interpolates ``-Gamma U`` at the last ``p`` correction times.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from math import comb, factorial

import numpy as np
from numpy.polynomial import polynomial as P

from .hbinterp import hb_project_field

DEFAULT_DEGREE = 6


@lru_cache(maxsize=None)
def corrector_vector(p: int) -> np.ndarray:
    dl = np.array([1.0])
    for i in range(1, p):
        dl = P.polymul(dl, [1.0, 1.0 / i])
    lpoly = P.polyint(dl, lbnd=-1.0)
    out = np.zeros(p + 1)
    out[: len(lpoly)] = lpoly
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _pascal(p: int, r: float) -> np.ndarray:
    mat = np.zeros((p + 1, p + 1))
    for i in range(p + 1):
        for j in range(i, p + 1):
            mat[i, j] = comb(j, i) * r ** (j - i)
    return mat


@dataclass(frozen=True)
class NordsieckState:
    z: np.ndarray          # (p+1, n_damped) + grid + block
    comps: tuple[int, ...]  # indices of damped components in the field
    gamma: np.ndarray      # damping of each carried component
    h: float
    time: float

    @property
    def p(self) -> int:
        return self.z.shape[0] - 1

    def derivative(self, order: int) -> np.ndarray | None:
        """``d^order D/dt^order`` at ``self.time``; ``None`` beyond the degree."""
        if order > self.p:
            return None
        return self.z[order] * (factorial(order) / self.h**order)


def damped_components(gamma: np.ndarray) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(np.asarray(gamma) != 0))


def _gamma_shape(gamma, ndim):
    return np.asarray(gamma).reshape((-1,) + (1,) * (ndim - 1))


def nordsieck_init(field_derivs, gamma: np.ndarray, h: float, time: float,
                   p: int = DEFAULT_DEGREE) -> NordsieckState | None:
    """Start from time derivatives of the field data at ``time``.

    ``field_derivs[j]`` holds ``d^j U/dt^j`` node data for all components of
    ``U``; missing orders are zero-padded.  Returns ``None`` if nothing is damped.
    """
    comps = damped_components(gamma)
    if not comps:
        return None
    g = np.asarray(gamma)[list(comps)]
    base = np.asarray(field_derivs[0])[list(comps)]
    z = np.zeros((p + 1,) + base.shape)
    gshape = _gamma_shape(g, base.ndim)
    for j in range(1, p + 1):
        if j - 1 < len(field_derivs):
            dj = -gshape * np.asarray(field_derivs[j - 1])[list(comps)]
            z[j] = dj * h**j / factorial(j)
    return NordsieckState(z, comps, g, h, time)


def nordsieck_predict(state: NordsieckState, dt: float) -> NordsieckState:
    """Taylor shift of the stored polynomial by ``dt``."""
    mat = _pascal(state.p, dt / state.h)
    z = np.tensordot(mat, state.z, axes=(1, 0))
    return replace(state, z=z, time=state.time + dt)


def nordsieck_correct(state: NordsieckState, field_data: np.ndarray) -> NordsieckState:
    """Enforce ``dD/dt = -Gamma U`` at ``state.time`` using the new field data."""
    u = np.asarray(field_data)[list(state.comps)]
    g = -_gamma_shape(state.gamma, u.ndim) * u
    err = state.h * g - state.z[1]
    lvec = corrector_vector(state.p)
    z = state.z + lvec.reshape((-1,) + (1,) * err.ndim) * err[None]
    return replace(state, z=z)


def _embed(state: NordsieckState, block: np.ndarray, n_comp: int) -> np.ndarray:
    out = np.zeros((n_comp,) + block.shape[1:])
    out[list(state.comps)] = block
    return out


def _pad(block: np.ndarray, dim: int, degree: int) -> np.ndarray:
    m = block.shape[-1] - 1
    out = np.zeros(block.shape[: block.ndim - dim] + (degree + 1,) * dim)
    out[(Ellipsis,) + (slice(0, m + 1),) * dim] = block
    return out


def dissipative_terms(own_predicted: NordsieckState | None, other: NordsieckState | None,
                      ell: int, n_own: int, n_other: int, dim: int, m: int,
                      onto_dual: bool):
    """Additive stage-``ell`` terms for one update.

    Returns ``(cross, own)``: ``cross`` is ``d^{2l-2} D_other/dt^{2l-2}``
    interpolated onto the update cells (to be mapped through the coupling
    operator by the caller, ``ell >= 2`` only); ``own`` is the nodal
    ``d^{2l-1} D_own/dt^{2l-1}`` from the predicted array.  Either may be ``None``.
    """
    if ell < 1:
        raise ValueError("stage index starts at 1")
    degree = 2 * m + 1
    cross = None
    if other is not None and ell >= 2:
        d = other.derivative(2 * ell - 2)
        if d is not None:
            cross = hb_project_field(_embed(other, d, n_other), dim, m, onto_dual).coeffs
    own = None
    if own_predicted is not None:
        d = own_predicted.derivative(2 * ell - 1)
        if d is not None:
            own = _pad(_embed(own_predicted, d, n_own), dim, degree)
    return cross, own


def stage_terms(own_predicted, other, q, n_own, n_other, dim, m, onto_dual):
    """``dissipative_terms`` for every stage ``1..q``, or ``None`` when all vanish."""
    if own_predicted is None and other is None:
        return None
    return [dissipative_terms(own_predicted, other, ell, n_own, n_other, dim, m, onto_dual)
            for ell in range(1, q + 1)]
