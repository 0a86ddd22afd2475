"""Periodic Cartesian grids and node-based Hermite data."""
from __future__ import annotations

from dataclasses import dataclass, replace
from math import pi

import numpy as np

LOWER = -pi
LENGTH = 2 * pi


@dataclass(frozen=True)
class Grid:
    """``n`` nodes per direction on the periodic box ``[-pi, pi)^dim``.

    Primal nodes sit at ``-pi + j*dx``; dual nodes at ``-pi + (j + 1/2)*dx``
    and are stored at index ``j``.
    """

    n: int
    dim: int
    dual: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("grid needs at least 2 nodes per direction")
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")

    @property
    def dx(self) -> float:
        return LENGTH / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    def coords_1d(self) -> np.ndarray:
        return LOWER + (np.arange(self.n) + (0.5 if self.dual else 0.0)) * self.dx

    def staggered(self) -> "Grid":
        return replace(self, dual=not self.dual)


@dataclass
class HermiteField:
    """Scaled Taylor data ``dx**|a|/a! D^a u`` at every node.

    ``data`` has shape ``(n_comp,) + (n,)*dim + (m+1,)*dim``.
    """

    grid: Grid
    m: int
    data: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        expected = self.grid.shape + (self.m + 1,) * self.grid.dim
        if self.data.ndim != 1 + 2 * self.grid.dim or self.data.shape[1:] != expected:
            raise ValueError(f"data shape {self.data.shape} does not match grid/m {expected}")

    @classmethod
    def zeros(cls, grid: Grid, m: int, n_comp: int, time: float = 0.0) -> "HermiteField":
        return cls(grid, m, np.zeros((n_comp,) + grid.shape + (m + 1,) * grid.dim), time)

    @property
    def n_comp(self) -> int:
        return self.data.shape[0]

    def copy(self) -> "HermiteField":
        return HermiteField(self.grid, self.m, self.data.copy(), self.time)

    def with_data(self, data: np.ndarray, time: float | None = None) -> "HermiteField":
        return HermiteField(self.grid, self.m, data, self.time if time is None else time)
