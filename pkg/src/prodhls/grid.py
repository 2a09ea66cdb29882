"""Cell-centered product grids, sampled functions, and quadrature norms.

The computational domain is the box [-L, L]^(m+n), viewed as the product
of an x-block of dimension ``m`` and a y-block of dimension ``n``.  All
integrals are midpoint sums over the N^(m+n) cells, and functions are
treated as compactly supported in the box, so box sums stand in for
whole-space integrals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ProductGrid",
    "GridFunction",
    "lp_norm",
    "slice_lp_norm_x",
    "slice_lp_norm_y",
    "slice_lp_norms_x",
    "slice_lp_norms_y",
    "dilate",
    "sample_function",
    "save_grid_function",
    "load_grid_function",
]


@dataclass(frozen=True)
class ProductGrid:
    """Uniform cell-centered discretization of [-L, L]^(m+n).

    Cell centers along every axis sit at ``-L + (i + 1/2) h`` with
    ``h = 2 L / N``.  ``N`` must be even so that no center lies on the
    coordinate origin of either block; power-law kernels evaluated at
    cell centers are therefore always finite.

    Attributes
    ----------
    m, n : int
        Dimensions of the x-block and the y-block (1 or 2 each).
    half_width : float
        L, half the side length of the box.
    points_per_axis : int
        N, the number of cells per axis (even).
    """

    m: int
    n: int
    half_width: float
    points_per_axis: int

    def __post_init__(self) -> None:
        if self.m not in (1, 2):
            raise ValueError(f"x-block dimension m must be 1 or 2, got {self.m}")
        if self.n not in (1, 2):
            raise ValueError(f"y-block dimension n must be 1 or 2, got {self.n}")
        if not (isinstance(self.half_width, (int, float)) and math.isfinite(self.half_width)
                and self.half_width > 0):
            raise ValueError(f"half_width must be a positive finite number, got {self.half_width}")
        N = self.points_per_axis
        if not isinstance(N, int) or N < 2 or N % 2 != 0:
            raise ValueError(f"points_per_axis must be an even integer >= 2, got {N}")

    @property
    def spacing(self) -> float:
        """Cell width h = 2 L / N."""
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def rank(self) -> int:
        return self.m + self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.rank

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.rank

    def axis_centers(self) -> np.ndarray:
        """Coordinates of the cell centers along one axis, ascending."""
        N = self.points_per_axis
        return (np.arange(N) + 0.5) * self.spacing - self.half_width

    def x_norms(self) -> np.ndarray:
        """Euclidean norm |x| at the cell centers of the x-block, shape (N,)*m."""
        return _block_norms(self.axis_centers(), self.m)

    def y_norms(self) -> np.ndarray:
        """Euclidean norm |y| at the cell centers of the y-block, shape (N,)*n."""
        return _block_norms(self.axis_centers(), self.n)

    def point_coordinates(self, point: Sequence[int]) -> tuple[float, ...]:
        """Coordinates of a grid node given as a multi-index."""
        idx = normalize_point(point, self.rank, self.points_per_axis)
        centers = self.axis_centers()
        return tuple(float(centers[i]) for i in idx)


def _block_norms(centers: np.ndarray, dim: int) -> np.ndarray:
    if dim == 1:
        return np.abs(centers)
    return np.hypot(centers[:, None], centers[None, :])


def normalize_block_index(index, dim: int, points_per_axis: int) -> tuple[int, ...]:
    """Validate a per-block multi-index (int for 1-d blocks, pair for 2-d)."""
    if isinstance(index, (int, np.integer)):
        idx = (int(index),)
    else:
        idx = tuple(int(i) for i in index)
    if len(idx) != dim:
        raise ValueError(f"index {index!r} does not address a {dim}-dimensional block")
    for i in idx:
        if not 0 <= i < points_per_axis:
            raise ValueError(f"index {index!r} lies outside the grid")
    return idx


def normalize_point(point, rank: int, points_per_axis: int) -> tuple[int, ...]:
    """Validate a full grid-node multi-index."""
    return normalize_block_index(point, rank, points_per_axis)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nonnegative finite samples on a :class:`ProductGrid`, one per cell.

    The value array is copied to contiguous float64 storage and frozen,
    so instances are safe to share between threads.
    """

    grid: ProductGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.shape != self.grid.shape:
            raise ValueError(
                f"values shape {vals.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must all be finite")
        if np.any(vals < 0.0):
            raise ValueError("values must be nonnegative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def values_2d(self) -> np.ndarray:
        """The samples reshaped to (N^m, N^n): x-block rows, y-block columns."""
        N = self.grid.points_per_axis
        return self.values.reshape(N ** self.grid.m, N ** self.grid.n)


def sample_function(grid: ProductGrid, fn: Callable[..., np.ndarray]) -> GridFunction:
    """Sample ``fn`` at the cell centers.

    ``fn`` receives one broadcastable coordinate array per axis (x-block
    axes first) and must return nonnegative values.
    """
    centers = grid.axis_centers()
    mesh = np.meshgrid(*([centers] * grid.rank), indexing="ij", sparse=True)
    vals = np.broadcast_to(np.asarray(fn(*mesh), dtype=np.float64), grid.shape)
    return GridFunction(grid, vals)


def lp_norm(f: GridFunction, p: float) -> float:
    """Discrete L^p norm: (sum of f^p times the cell volume) ** (1/p).

    Exact for cell-constant functions; zero iff ``f`` vanishes identically.
    """
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    total = float(np.sum(f.values ** p))
    return (total * f.grid.cell_volume) ** (1.0 / p)


def slice_lp_norm_x(g: GridFunction, p: float, x) -> float:
    """L^p norm in the y-variables of the slice of ``g`` at x-node ``x``.

    Realizes the norm-as-a-function-of-x construction: the y-block is
    integrated out by midpoint quadrature while ``x`` stays frozen.
    """
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    idx = normalize_block_index(x, g.grid.m, g.grid.points_per_axis)
    sub = g.values[idx]
    return float((np.sum(sub ** p) * g.grid.spacing ** g.grid.n) ** (1.0 / p))


def slice_lp_norm_y(g: GridFunction, p: float, y) -> float:
    """Mirror of :func:`slice_lp_norm_x`: integrates the x-block at fixed y."""
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    idx = normalize_block_index(y, g.grid.n, g.grid.points_per_axis)
    sub = g.values[(slice(None),) * g.grid.m + idx]
    return float((np.sum(sub ** p) * g.grid.spacing ** g.grid.m) ** (1.0 / p))


def slice_lp_norms_x(g: GridFunction, p: float) -> np.ndarray:
    """Vector of y-slice norms over all x-nodes, shape (N,)*m."""
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    grid = g.grid
    y_axes = tuple(range(grid.m, grid.rank))
    return (np.sum(g.values ** p, axis=y_axes) * grid.spacing ** grid.n) ** (1.0 / p)


def slice_lp_norms_y(g: GridFunction, p: float) -> np.ndarray:
    """Vector of x-slice norms over all y-nodes, shape (N,)*n."""
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    grid = g.grid
    x_axes = tuple(range(grid.m))
    return (np.sum(g.values ** p, axis=x_axes) * grid.spacing ** grid.m) ** (1.0 / p)


def dilate(f: GridFunction, s: float, t: float) -> GridFunction:
    """Resample ``f(s x, t y)`` on the same grid.

    Nearest-cell lookup (the cell containing the scaled coordinate) with
    zero extension outside the box.  Deterministic; ``s = t = 1`` is the
    identity.
    """
    if not (s > 0 and math.isfinite(s)):
        raise ValueError(f"x-dilation must be positive and finite, got {s}")
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"y-dilation must be positive and finite, got {t}")
    grid = f.grid
    out = f.values
    scales = (s,) * grid.m + (t,) * grid.n
    for axis, scale in enumerate(scales):
        out = _resample_axis(out, axis, scale, grid)
    return GridFunction(grid, out)


def _resample_axis(vals: np.ndarray, axis: int, scale: float, grid: ProductGrid) -> np.ndarray:
    N = grid.points_per_axis
    target = scale * grid.axis_centers()
    idx = np.floor((target + grid.half_width) / grid.spacing).astype(np.int64)
    valid = (idx >= 0) & (idx < N)
    taken = np.take(vals, np.clip(idx, 0, N - 1), axis=axis)
    shape = [1] * vals.ndim
    shape[axis] = N
    return np.where(valid.reshape(shape), taken, 0.0)


def save_grid_function(f: GridFunction, base_path) -> Path:
    """Write ``<base>.json`` (header) and ``<base>.bin`` (row-major float64).

    The header carries the grid geometry under the keys m, n, L, N; the
    payload is the raw value bytes, so the round trip is bit exact.
    Returns the header path.
    """
    base = Path(base_path)
    base.parent.mkdir(parents=True, exist_ok=True)
    json_path = base.with_suffix(".json")
    bin_path = base.with_suffix(".bin")
    header = {
        "schema": 1,
        "m": f.grid.m,
        "n": f.grid.n,
        "L": f.grid.half_width,
        "N": f.grid.points_per_axis,
        "dtype": "<f8",
        "order": "C",
        "data_file": bin_path.name,
    }
    bin_path.write_bytes(np.ascontiguousarray(f.values, dtype="<f8").tobytes())
    json_path.write_text(json.dumps(header, sort_keys=True, indent=2) + "\n")
    return json_path


def load_grid_function(path) -> GridFunction:
    """Inverse of :func:`save_grid_function`; accepts the header or base path."""
    p = Path(path)
    if p.suffix != ".json":
        p = p.with_suffix(".json")
    header = json.loads(p.read_text())
    grid = ProductGrid(m=int(header["m"]), n=int(header["n"]),
                       half_width=float(header["L"]), points_per_axis=int(header["N"]))
    data = np.frombuffer((p.parent / header["data_file"]).read_bytes(), dtype=header["dtype"])
    return GridFunction(grid, data.reshape(grid.shape))
