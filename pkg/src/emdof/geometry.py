"""Point-element array geometries.

All lengths are in units of the free-space wavelength, so the free-space
wavenumber is ``2*pi`` everywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.spatial.distance import cdist

from .errors import GeometryError

GRID_CONVENTIONS = ("cell", "edge")


class Vec3(NamedTuple):
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class PlaneSpec:
    """Square N x N grid of point elements in a plane normal to z.

    ``grid`` selects the sampling convention:

    ``"cell"``
        points sit at the centres of N x N equal cells, spacing L/N.
    ``"edge"``
        points include the aperture edges, spacing L/(N-1).

    For ``N == 1`` both conventions give the single centre point.
    """

    side_length: float
    grid_count: int
    center: Vec3 = Vec3(0.0, 0.0, 0.0)
    grid: str = "cell"

    def __post_init__(self):
        object.__setattr__(self, "center", Vec3(*map(float, self.center)))
        if not np.isfinite(self.side_length) or self.side_length <= 0:
            raise GeometryError(f"side length must be positive, got {self.side_length!r}")
        if isinstance(self.grid_count, bool) or int(self.grid_count) != self.grid_count:
            raise GeometryError(f"grid count must be an integer, got {self.grid_count!r}")
        if self.grid_count < 1:
            raise GeometryError(f"grid count must be >= 1, got {self.grid_count!r}")
        if self.grid not in GRID_CONVENTIONS:
            raise GeometryError(f"unknown grid convention {self.grid!r}")
        if not all(np.isfinite(self.center)):
            raise GeometryError("center must be finite")

    @property
    def area(self) -> float:
        return float(self.side_length) ** 2

    def axis_offsets(self) -> np.ndarray:
        n = int(self.grid_count)
        L = float(self.side_length)
        if n == 1:
            return np.zeros(1)
        if self.grid == "edge":
            return np.linspace(-L / 2, L / 2, n)
        return (np.arange(n) - (n - 1) / 2) * (L / n)


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Ordered set of point elements.

    ``positions`` is an ``(n, 3)`` float array; it is made read-only on
    construction.
    """

    positions: np.ndarray
    label: str = ""
    provenance: Optional[PlaneSpec] = field(default=None)

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float, copy=True)
        if pos.ndim == 1 and pos.size == 3:
            pos = pos.reshape(1, 3)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise GeometryError(f"positions must have shape (n, 3), got {pos.shape}")
        if pos.shape[0] == 0:
            raise GeometryError("an array needs at least one element")
        if not np.all(np.isfinite(pos)):
            raise GeometryError("positions must be finite")
        if pos.shape[0] > 1 and _min_self_separation(pos) <= 0:
            raise GeometryError("element positions within one array must be distinct")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    def __len__(self):
        return self.positions.shape[0]

    def __getitem__(self, i) -> Vec3:
        return Vec3(*self.positions[i])

    @property
    def elements(self) -> list[Vec3]:
        return [Vec3(*p) for p in self.positions]


def _min_self_separation(pos):
    d = cdist(pos, pos)
    np.fill_diagonal(d, np.inf)
    return d.min()


def make_planar_array(spec: PlaneSpec, label: str = "") -> ArrayGeometry:
    """Uniform square grid in the plane ``z = spec.center.z``.

    Ordering is row-major with x varying fastest.
    """
    off = spec.axis_offsets()
    X, Y = np.meshgrid(off, off)  # rows follow y, so x varies fastest on ravel
    cx, cy, cz = spec.center
    pos = np.column_stack([X.ravel() + cx, Y.ravel() + cy, np.full(X.size, cz)])
    return ArrayGeometry(pos, label=label, provenance=spec)


def make_paired_planes(L: float, N: int, D: float, grid: str = "cell"):
    """Source plane at the origin and receiver plane at ``(0, 0, D)``.

    Returns ``(source, receiver)``; both share the same element ordering.
    """
    if not np.isfinite(D) or D <= 0:
        raise GeometryError(f"plane separation D must be positive, got {D!r}")
    src = make_planar_array(PlaneSpec(L, N, Vec3(0.0, 0.0, 0.0), grid), label="source")
    rx = make_planar_array(PlaneSpec(L, N, Vec3(0.0, 0.0, float(D)), grid), label="receiver")
    return src, rx


def min_cross_separation(a: ArrayGeometry, b: ArrayGeometry) -> float:
    return float(cdist(a.positions, b.positions).min())
