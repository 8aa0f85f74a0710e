"""Equispaced design grids and basis systems for discretized curves.

The design puts mass 1/m at each of the m midpoints t_j = (j - 1/2)/m.
Both basis families built here (Fourier and Haar) are exactly orthonormal
under that empirical measure, which is what makes coefficient analysis a
plain matrix product and keeps round trips lossless.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "BasisMatrix",
    "make_grid",
    "fourier_basis",
    "haar_basis",
    "analyze",
    "synthesize",
    "check_orthonormality",
]


def _frozen_array(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Grid:
    """Midpoint design on (0,1): points[j-1] = (j - 1/2)/m."""

    m: int
    points: np.ndarray

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"grid needs m >= 2, got {self.m}")
        pts = _frozen_array(self.points)
        if pts.shape != (self.m,):
            raise ValueError(f"expected {self.m} points, got shape {pts.shape}")
        if np.any(pts <= 0.0) or np.any(pts >= 1.0) or np.any(np.diff(pts) <= 0.0):
            raise ValueError("grid points must be strictly increasing in (0,1)")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True, eq=False)
class BasisMatrix:
    """m basis functions evaluated on the grid, one per column."""

    family: str
    grid: Grid
    values: np.ndarray
    sup_norms: np.ndarray

    def __post_init__(self):
        m = self.grid.m
        vals = _frozen_array(self.values)
        sups = _frozen_array(self.sup_norms)
        if vals.shape != (m, m):
            raise ValueError(f"basis matrix must be {m}x{m}, got {vals.shape}")
        if sups.shape != (m,):
            raise ValueError("sup_norms length must equal m")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "sup_norms", sups)

    @property
    def m(self) -> int:
        return self.grid.m


def same_grid(a: Grid, b: Grid) -> bool:
    return a.m == b.m and np.array_equal(a.points, b.points)


def make_grid(m: int) -> Grid:
    if m < 2:
        raise ValueError(f"grid needs m >= 2, got {m}")
    points = (np.arange(1, m + 1) - 0.5) / m
    return Grid(m=m, points=points)


def fourier_basis(grid: Grid) -> BasisMatrix:
    """Constant, cosine/sine pairs, and for even m the alternating column.

    Column order: phi_1 = 1, then for each frequency l the pair
    sqrt(2) cos(2 pi l t), sqrt(2) sin(2 pi l t).  When m is even the sine
    at the top frequency vanishes on the midpoint grid, so the system is
    completed by the alternating column (-1)^(j-1), which has unit norm
    under the empirical measure.
    """
    m, t = grid.m, grid.points
    cols = [np.ones(m)]
    for l in range(1, (m - 1) // 2 + 1):
        cols.append(np.sqrt(2.0) * np.cos(2.0 * np.pi * l * t))
        cols.append(np.sqrt(2.0) * np.sin(2.0 * np.pi * l * t))
    if m % 2 == 0:
        cols.append((-1.0) ** np.arange(m))
    values = np.column_stack(cols)
    sup_norms = np.max(np.abs(values), axis=0)
    return BasisMatrix(family="fourier", grid=grid, values=values, sup_norms=sup_norms)


def haar_basis(grid: Grid) -> BasisMatrix:
    """Haar system: constant plus wavelets ordered by (level, shift).

    Requires m = 2^J so every wavelet breakpoint falls between midpoints.
    """
    m, t = grid.m, grid.points
    J = int(round(np.log2(m)))
    if 2**J != m or J < 1:
        raise ValueError(f"haar basis needs m a power of two >= 2, got {m}")
    cols = [np.ones(m)]
    for l in range(J):
        amp = 2.0 ** (l / 2.0)
        for q in range(2**l):
            lo = q / 2.0**l
            mid = (q + 0.5) / 2.0**l
            hi = (q + 1.0) / 2.0**l
            pos = ((t >= lo) & (t < mid)).astype(float)
            neg = ((t >= mid) & (t < hi)).astype(float)
            cols.append(amp * (pos - neg))
    values = np.column_stack(cols)
    sup_norms = np.max(np.abs(values), axis=0)
    return BasisMatrix(family="haar", grid=grid, values=values, sup_norms=sup_norms)


def analyze(values: np.ndarray, basis: BasisMatrix) -> np.ndarray:
    """Coefficients c_k = (1/m) sum_j values_j phi_k(t_j)."""
    v = np.asarray(values, dtype=float)
    if v.shape != (basis.m,):
        raise ValueError(f"expected vector of length {basis.m}, got shape {v.shape}")
    return basis.values.T @ v / basis.m


def synthesize(coeffs: np.ndarray, basis: BasisMatrix) -> np.ndarray:
    """Function values g(t_j) = sum_k coeffs_k phi_k(t_j)."""
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (basis.m,):
        raise ValueError(f"expected vector of length {basis.m}, got shape {c.shape}")
    return basis.values @ c


def check_orthonormality(basis: BasisMatrix) -> float:
    """Max entrywise deviation of the empirical Gram matrix from identity."""
    m = basis.m
    gram = basis.values.T @ basis.values / m
    return float(np.max(np.abs(gram - np.eye(m))))
