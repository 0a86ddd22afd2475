"""Dense tensor-product polynomials on a single cell.

A cell polynomial is stored in centered, width-scaled coordinates
``xi_i = (x_i - xc_i) / dx_i`` with ``xi_i`` in [-1/2, 1/2].  With this
convention the scaled Taylor data ``dx**|a| / a! * D**a f(xc)`` of a field
are exactly the low-order coefficients ``coeffs[a]``.

The coefficient array carries the polynomial axes last, one per direction
(axis ``-dim + i`` is direction ``i``).  Any leading axes are batch axes, so
one ``TensorPoly`` can hold every cell and every field component of a grid.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np


@dataclass(frozen=True)
class TensorPoly:
    coeffs: np.ndarray
    dim: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        shape = np.shape(self.coeffs)
        if len(shape) < self.dim:
            raise ValueError("coefficient array has fewer axes than dim")
        poly_shape = shape[len(shape) - self.dim:]
        if len(set(poly_shape)) != 1:
            raise ValueError(f"polynomial axes must have equal length, got {poly_shape}")

    @property
    def degree(self) -> int:
        return self.coeffs.shape[-1] - 1

    @property
    def batch_shape(self) -> tuple:
        return self.coeffs.shape[: self.coeffs.ndim - self.dim]

    def _poly_axis(self, axis: int) -> int:
        if not 0 <= axis < self.dim:
            raise IndexError(f"axis {axis} out of range for dim {self.dim}")
        return self.coeffs.ndim - self.dim + axis


def zeros(dim: int, degree: int, batch_shape=()) -> TensorPoly:
    return TensorPoly(np.zeros(tuple(batch_shape) + (degree + 1,) * dim), dim)


def diff_coeffs(coeffs: np.ndarray, axis: int, dx: float) -> np.ndarray:
    """Raw-array version of :func:`poly_diff`; ``axis`` is an array axis."""
    n = coeffs.shape[axis]
    out = np.empty(coeffs.shape)
    src = [slice(None)] * coeffs.ndim
    dst = [slice(None)] * coeffs.ndim
    src[axis] = slice(1, n)
    dst[axis] = slice(0, n - 1)
    factors = np.arange(1, n, dtype=float) / dx
    bshape = [1] * coeffs.ndim
    bshape[axis] = n - 1
    np.multiply(coeffs[tuple(src)], factors.reshape(bshape), out=out[tuple(dst)])
    dst[axis] = n - 1
    out[tuple(dst)] = 0.0
    return out


def poly_diff(p: TensorPoly, axis: int, dx: float) -> TensorPoly:
    """Physical derivative along ``axis`` of a polynomial on a cell of width ``dx``.

    The degree container is kept; the top coefficient row becomes zero.
    """
    if dx <= 0:
        raise ValueError("dx must be positive")
    return TensorPoly(diff_coeffs(p.coeffs, p._poly_axis(axis), dx), p.dim)


def poly_axpy(alpha: float, p: TensorPoly, q: TensorPoly) -> TensorPoly:
    if p.dim != q.dim or p.coeffs.shape != q.coeffs.shape:
        raise ValueError(
            f"shape mismatch: {p.coeffs.shape} (dim {p.dim}) vs {q.coeffs.shape} (dim {q.dim})"
        )
    return TensorPoly(alpha * p.coeffs + q.coeffs, p.dim)


def monomials(points, degree: int) -> np.ndarray:
    """Matrix ``P[i, j] = points[i] ** j`` for ``j = 0..degree``."""
    points = np.asarray(points, dtype=float)
    return points[:, None] ** np.arange(degree + 1)[None, :]


def poly_eval(p: TensorPoly, xi) -> np.ndarray:
    """Evaluate at one point ``xi`` (length ``dim``) by nested Horner sweeps.

    Returns an array of the batch shape (a 0-d array for a single polynomial).
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (p.dim,):
        raise ValueError(f"point must have {p.dim} coordinates")
    c = p.coeffs
    # innermost direction first, so the remaining axes stay in order
    for axis in reversed(range(p.dim)):
        acc = c[..., -1]
        for j in range(c.shape[-1] - 2, -1, -1):
            acc = acc * xi[axis] + c[..., j]
        c = acc
    return np.asarray(c)


def poly_eval_grid(p: TensorPoly, points_1d) -> np.ndarray:
    """Evaluate on the tensor grid built from the same 1D points in every direction.

    Output shape is ``batch_shape + (len(points_1d),) * dim``.
    """
    vander = monomials(points_1d, p.degree)
    out = p.coeffs
    for axis in range(p.dim):
        ax = out.ndim - p.dim + axis
        out = np.moveaxis(np.moveaxis(out, ax, -1) @ vander.T, -1, ax)
    return out


def poly_extract_dofs(p: TensorPoly, m: int) -> np.ndarray:
    """Leading ``(m+1)**dim`` coefficient block, i.e. the scaled DOFs at the cell center."""
    if m > p.degree:
        raise ValueError(f"cannot extract order {m} from degree {p.degree}")
    sl = (Ellipsis,) + (slice(0, m + 1),) * p.dim
    return p.coeffs[sl].copy()


def poly_from_dofs(block: np.ndarray, dim: int, degree: int) -> TensorPoly:
    """Zero-pad a DOF block into a polynomial with the given degree container."""
    m = block.shape[-1] - 1
    if m > degree:
        raise ValueError("block larger than degree container")
    coeffs = np.zeros(block.shape[: block.ndim - dim] + (degree + 1,) * dim)
    coeffs[(Ellipsis,) + (slice(0, m + 1),) * dim] = block
    return TensorPoly(coeffs, dim)


def scaled_taylor_1d(derivs, dx: float) -> np.ndarray:
    """Scaled coefficients ``dx**k / k! * f^(k)`` from a list of derivatives."""
    return np.array([d * dx**k / factorial(k) for k, d in enumerate(derivs)])
