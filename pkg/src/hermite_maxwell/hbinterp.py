"""Two-point Hermite-Birkhoff interpolation, tensorized over directions.

Node data are scaled Taylor coefficients ``c_k = dx**k / k! * f^(k)``.  In the
cell coordinate ``xi`` this is ``c_k = p^(k)(xi_node) / k!``, so the 1D
operator does not depend on ``dx`` and one matrix serves every cell.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .tensorpoly import TensorPoly

MAX_ORDER = 12


def _conditions_matrix(m: int) -> list[list[Fraction]]:
    """Rows map centered coefficients a_0..a_{2m+1} to stacked node data.

    Row ``(side, k)`` is ``(1/k!) d^k/dxi^k xi^j`` at ``xi = -1/2`` (left) or
    ``+1/2`` (right), which is ``C(j, k) * xi**(j - k)``.
    """
    n = 2 * m + 2
    rows = []
    for node in (Fraction(-1, 2), Fraction(1, 2)):
        for k in range(m + 1):
            rows.append([Fraction(comb(j, k)) * node ** (j - k) if j >= k else Fraction(0)
                         for j in range(n)])
    return rows


def _exact_inverse(a: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(a)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [v * inv_p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [vr - f * vc for vr, vc in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@lru_cache(maxsize=None)
def _matrix1d(m: int) -> np.ndarray:
    inv = _exact_inverse(_conditions_matrix(m))
    mat = np.array([[float(v) for v in row] for row in inv])
    mat.setflags(write=False)
    return mat


@dataclass(frozen=True)
class HBOperator:
    m: int
    matrix1d: np.ndarray = field(repr=False)

    @property
    def degree(self) -> int:
        return 2 * self.m + 1


def build_hb_operator(m: int) -> HBOperator:
    """Interpolation matrix for order ``m`` (exact rational construction)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m > MAX_ORDER:
        raise ValueError(f"m={m} exceeds the supported maximum {MAX_ORDER}")
    return HBOperator(m, _matrix1d(m))


def _apply_along(x: np.ndarray, mat: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.moveaxis(x, axis, -1) @ mat.T, -1, axis)


def interpolate_cell(op: HBOperator, corner_data: np.ndarray, dim: int) -> TensorPoly:
    """Cell polynomial from corner blocks.

    ``corner_data`` has shape ``batch + (2,)*dim + (m+1,)*dim`` with corner
    index 0 the lower node and 1 the upper node in each direction.
    """
    m = op.m
    corner_data = np.asarray(corner_data, dtype=float)
    tail = (2,) * dim + (m + 1,) * dim
    if corner_data.shape[corner_data.ndim - 2 * dim:] != tail:
        raise ValueError(f"corner data must end with shape {tail}, got {corner_data.shape}")
    nb = corner_data.ndim - 2 * dim
    # interleave (side_i, k_i) pairs and flatten each to the stacked 1D layout
    order = list(range(nb)) + [a for i in range(dim) for a in (nb + i, nb + dim + i)]
    stacked = corner_data.transpose(order).reshape(corner_data.shape[:nb] + (2 * m + 2,) * dim)
    for i in range(dim):
        stacked = _apply_along(stacked, op.matrix1d, nb + i)
    return TensorPoly(stacked, dim)


def hb_project_field(data: np.ndarray, dim: int, m: int, onto_dual: bool,
                     op: HBOperator | None = None) -> TensorPoly:
    """Interpolants on every cell of the staggered grid, with periodic wraparound.

    ``data`` has shape ``(n_comp,) + (N,)*dim + (m+1,)*dim``.  For
    ``onto_dual=True`` the source lives on the primal grid and the cell indexed
    ``j`` is centered at the dual node ``j + 1/2`` (corners ``j`` and ``j+1``);
    otherwise the source is on the dual grid and the cell ``j`` is centered at
    the primal node ``j`` (corners ``j - 1/2`` and ``j + 1/2``, stored at
    indices ``j-1`` and ``j``).
    """
    op = op or build_hb_operator(m)
    out = np.asarray(data, dtype=float)
    grid_axes = range(1, 1 + dim)
    coef0 = 1 + dim
    for i, gax in enumerate(grid_axes):
        if onto_dual:
            lower, upper = out, np.roll(out, -1, axis=gax)
        else:
            lower, upper = np.roll(out, 1, axis=gax), out
        stacked = np.concatenate([lower, upper], axis=coef0 + i)
        out = _apply_along(stacked, op.matrix1d, coef0 + i)
    return TensorPoly(out, dim)


def hb_project_wide(data: np.ndarray, dim: int, m: int) -> TensorPoly:
    """Interpolants centered on the source's own nodes, using the neighbours at +-1 cell.

    The cell spans two grid spacings; the result is rescaled to the usual
    one-spacing coordinate so it can be combined with ordinary cell polynomials.
    """
    op = build_hb_operator(m)
    out = np.asarray(data, dtype=float)
    coef0 = 1 + dim
    for i in range(dim):
        gax = 1 + i
        cax = coef0 + i
        lower = np.roll(out, 1, axis=gax)
        upper = np.roll(out, -1, axis=gax)
        # node data scaled by 2*dx instead of dx
        up = 2.0 ** np.arange(m + 1)
        sshape = [1] * out.ndim
        sshape[cax] = m + 1
        stacked = np.concatenate([lower * up.reshape(sshape), upper * up.reshape(sshape)], axis=cax)
        res = _apply_along(stacked, op.matrix1d, cax)
        # back to xi = (x - xc) / dx
        down = 0.5 ** np.arange(2 * m + 2)
        dshape = [1] * res.ndim
        dshape[cax] = 2 * m + 2
        out = res * down.reshape(dshape)
    return TensorPoly(out, dim)
