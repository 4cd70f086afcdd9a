"""Arbitrary-precision fallback for the binomial sweeps.

Same contract as the compiled module: in-place updates of an (nx, ny)
numpy grid, here of dtype object so coefficients never overflow.
"""

from __future__ import annotations

import numpy as np


def _slices(n: int, d: int) -> tuple[slice, slice] | None:
    # destination / source index ranges for "dst[i] += src[i - d]"
    if abs(d) >= n:
        return None
    if d >= 0:
        return slice(d, n), slice(0, n - d)
    return slice(0, n + d), slice(-d, n)


def poly_sweep(grid: np.ndarray, da: int, dw: int, s: int, k: int) -> None:
    """Multiply the grid by (1 - s q^da g^dw)^k in place."""
    nx, ny = grid.shape
    sx = _slices(nx, da)
    sy = _slices(ny, dw)
    if sx is None or sy is None:
        return
    for _ in range(k):
        src = grid[sx[1], sy[1]].copy()
        grid[sx[0], sy[0]] -= s * src


def geom_sweep(grid: np.ndarray, da: int, dw: int, s: int, k: int) -> None:
    """Divide the grid by (1 - s q^da g^dw)^k in place; (da, dw) > (0, 0)."""
    if not (da > 0 or (da == 0 and dw > 0)):
        raise ValueError("geom_sweep needs a lexicographically positive step")
    nx, ny = grid.shape
    sy = _slices(ny, dw)
    if sy is None:
        return
    for _ in range(k):
        if da > 0:
            for x in range(da, nx):
                grid[x, sy[0]] += s * grid[x - da, sy[1]]
        else:
            for y in range(dw, ny):
                grid[:, y] += s * grid[:, y - dw]
