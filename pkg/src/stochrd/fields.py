"""Truncated-domain grids, Dirichlet fields, and their discrete calculus.

The unbounded spatial domain is truncated to the box [-L, L]^d with
homogeneous Dirichlet boundary values.  Fields store all grid values
including the (zero) boundary ring; constructors enforce the ring so a
Field is always an admissible Dirichlet state.

Quadrature conventions are chosen so the discrete summation-by-parts
identity holds exactly: with the node measure h^d (equal to the
trapezoid rule for fields vanishing on the boundary) and the squared
gradient accumulated over cells by forward differences,

    (-laplacian(v), v) = h1 seminorm of v, squared,

with no quadrature slack.  The energy certificates rely on this.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-L, L]^dim with Dirichlet boundary.

    Parameters
    ----------
    dim : int
        Spatial dimension, 1 or 2.
    half_width : float
        Box half-width L.
    n : int
        Points per axis including both boundary points, at least 3.
    """

    dim: int
    half_width: float
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.n < 3:
            raise ValueError("need at least 3 points per axis")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n)

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def cell_measure(self) -> float:
        return self.h**self.dim

    def coords(self):
        """Coordinate array(s): x for dim 1, (x, y) meshgrid for dim 2."""
        if self.dim == 1:
            return self.axis
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def radius(self) -> np.ndarray:
        """Euclidean distance of every node from the origin."""
        if self.dim == 1:
            return np.abs(self.axis)
        x, y = self.coords()
        return np.sqrt(x * x + y * y)


class Field:
    """Real-valued Dirichlet state on a Grid.

    The boundary ring is zeroed on construction and the value array is
    frozen; all-zero boundary and finiteness are invariants.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        values = np.array(values, dtype=float)
        if values.shape != grid.shape:
            raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        _zero_boundary(values)
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    @classmethod
    def zeros(cls, grid: Grid) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable) -> "Field":
        if grid.dim == 1:
            return cls(grid, fn(grid.axis))
        x, y = grid.coords()
        return cls(grid, fn(x, y))

    def __repr__(self) -> str:
        return f"Field(grid={self.grid}, sup={np.abs(self.values).max():.4g})"


def _zero_boundary(values: np.ndarray) -> None:
    if values.ndim == 1:
        values[0] = 0.0
        values[-1] = 0.0
    else:
        values[0, :] = 0.0
        values[-1, :] = 0.0
        values[:, 0] = 0.0
        values[:, -1] = 0.0


def laplacian(field: Field) -> Field:
    """Second-order central Laplacian; output boundary ring is zero.

    The stencil reproduces the Laplacian of polynomials of degree <= 3
    exactly (up to roundoff) at nodes whose full stencil lies in the
    stored data.
    """
    g = field.grid
    v = field.values
    out = np.zeros_like(v)
    h2 = g.h * g.h
    if g.dim == 1:
        out[1:-1] = (v[:-2] - 2.0 * v[1:-1] + v[2:]) / h2
    else:
        out[1:-1, 1:-1] = (
            v[:-2, 1:-1] + v[2:, 1:-1] + v[1:-1, :-2] + v[1:-1, 2:] - 4.0 * v[1:-1, 1:-1]
        ) / h2
    return Field(g, out)


@dataclass(frozen=True)
class FieldNorms:
    l2: float
    h1_semi: float
    lp: float
    p: float


def _l2_sq(values: np.ndarray, grid: Grid) -> float:
    return float(grid.cell_measure * np.sum(values * values))


def _h1_sq(values: np.ndarray, grid: Grid) -> float:
    h = grid.h
    if grid.dim == 1:
        d = np.diff(values)
        return float(np.dot(d, d) / h)
    dx = np.diff(values, axis=0)
    dy = np.diff(values, axis=1)
    return float((np.sum(dx * dx) + np.sum(dy * dy)))  # h^2 / h^2 = 1


def _lp_p(values: np.ndarray, grid: Grid, p: float) -> float:
    return float(grid.cell_measure * np.sum(np.abs(values) ** p))


def norms(field: Field, p: float = 2.0) -> FieldNorms:
    """L2 norm, H1 seminorm, and Lp norm of a field.

    L2 and Lp use the node measure h^dim (the trapezoid rule for
    Dirichlet fields); the H1 seminorm accumulates forward differences
    over cells, which pairs exactly with the discrete Laplacian.
    """
    if not p >= 1:
        raise ValueError("p must be >= 1")
    g = field.grid
    v = field.values
    return FieldNorms(
        l2=float(np.sqrt(_l2_sq(v, g))),
        h1_semi=float(np.sqrt(_h1_sq(v, g))),
        lp=float(_lp_p(v, g, p) ** (1.0 / p)),
        p=p,
    )


def l2_distance(a: Field, b: Field) -> float:
    """Grid L2 distance; both fields must share a grid."""
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")
    d = a.values - b.values
    return float(np.sqrt(_l2_sq(d, a.grid)))


def tail_mass(field: Field, k: float) -> float:
    """Squared L2 mass of the field outside the ball of radius k.

    Sharp node indicator |x| >= k; nonincreasing in k by construction
    and equal to the full squared L2 norm as k -> 0+ (up to the single
    excluded origin node).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    g = field.grid
    mask = g.radius() >= k
    v = field.values
    return float(g.cell_measure * np.sum((v * v)[mask]))


# -- serialization --------------------------------------------------------

_HEADER = struct.Struct("<IId")  # dims, n per axis, half-width


def write_field_block(field: Field, path) -> None:
    """Binary field block: header (uint32 dims, uint32 N, float64 L,
    little-endian) followed by the N^dims float64 payload in C order."""
    g = field.grid
    payload = np.ascontiguousarray(field.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(g.dim, g.n, g.half_width))
        fh.write(payload.tobytes())


def read_field_block(path) -> Field:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        dim, n, half_width = _HEADER.unpack(raw)
        grid = Grid(dim, half_width, n)
        payload = np.frombuffer(fh.read(), dtype="<f8").astype(float)
    return Field(grid, payload.reshape(grid.shape))


def field_to_csv(field: Field, path) -> None:
    """CSV export: columns x,value (dim 1) or x,y,value (dim 2)."""
    g = field.grid
    with open(path, "w") as fh:
        if g.dim == 1:
            fh.write("x,value\n")
            for xi, vi in zip(g.axis, field.values):
                fh.write(f"{float(xi)!r},{float(vi)!r}\n")
        else:
            fh.write("x,y,value\n")
            x, y = g.coords()
            for xi, yi, vi in zip(x.ravel(), y.ravel(), field.values.ravel()):
                fh.write(f"{float(xi)!r},{float(yi)!r},{float(vi)!r}\n")
