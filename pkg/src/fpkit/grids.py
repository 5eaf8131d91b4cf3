"""Uniform cell-centered grids and discrete probability densities.

The truncated computational domain is the box [-R, R]^d split into n cells
per axis (n a power of two, so refinement studies halve h exactly). All
discrete integrals in the package are midpoint cell quadrature: sum of cell
values times h^d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDensityError, GridMismatchError


def default_radius(beta2: float) -> float:
    """Default truncation radius 8/sqrt(beta2), floored at the minimum box size."""
    if beta2 <= 0:
        raise ValueError("beta2 must be positive")
    return max(4.0, 8.0 / np.sqrt(beta2))


@dataclass(frozen=True)
class GridSpec:
    """Cell-centered uniform grid on [-radius, radius]^dim with zero-flux walls."""

    dim: int
    radius: float
    n: int
    boundary: str = "zero-flux"

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"grid dimension must be 1 or 2, got {self.dim}")
        if self.radius < 4.0:
            raise ValueError(f"truncation radius must be >= 4, got {self.radius}")
        n = self.n
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError(f"n must be a power of two >= 16, got {n}")
        if self.boundary != "zero-flux":
            raise ValueError(f"only zero-flux boundaries are supported, got {self.boundary!r}")

    @property
    def h(self) -> float:
        return 2.0 * self.radius / self.n

    @property
    def cell_volume(self) -> float:
        return self.h ** self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def n_cells(self) -> int:
        return self.n ** self.dim

    def axis_centers(self) -> np.ndarray:
        return -self.radius + (np.arange(self.n) + 0.5) * self.h

    def cell_centers(self) -> np.ndarray:
        """All cell centers as an (n^dim, dim) array in row-major (ij) order."""
        c = self.axis_centers()
        if self.dim == 1:
            return c[:, None]
        X, Y = np.meshgrid(c, c, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=1)

    def center_radii(self) -> np.ndarray:
        pts = self.cell_centers()
        return np.sqrt(np.sum(pts * pts, axis=1))

    def boundary_mask(self) -> np.ndarray:
        """Boolean mask (grid shape) marking cells that touch the outer wall."""
        m = np.zeros(self.shape, dtype=bool)
        if self.dim == 1:
            m[0] = m[-1] = True
        else:
            m[0, :] = m[-1, :] = True
            m[:, 0] = m[:, -1] = True
        return m

    def refine(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.dim, self.radius, self.n * factor, self.boundary)


class GridDensity:
    """A probability density on a grid: nonnegative cells, unit mass.

    `values` has the grid shape and is frozen after construction. `info`
    optionally carries solver metadata (residual, clipped mass, ...).
    """

    def __init__(self, spec: GridSpec, values: np.ndarray, info: dict | None = None):
        values = np.asarray(values, dtype=float)
        if values.shape != spec.shape:
            raise ValueError(f"values shape {values.shape} does not match grid {spec.shape}")
        if float(values.min(initial=0.0)) < -1e-12:
            raise ValueError(f"density has negative cells (min {values.min():.3e})")
        values = np.maximum(values, 0.0)
        mass = float(values.sum()) * spec.cell_volume
        if abs(mass - 1.0) > 1e-8:
            raise ValueError(f"density mass {mass!r} is not 1 within 1e-8")
        values = values.copy()
        values.setflags(write=False)
        self.spec = spec
        self.values = values
        self.info = dict(info or {})

    @property
    def mass(self) -> float:
        return float(self.values.sum()) * self.spec.cell_volume

    @property
    def boundary_mass(self) -> float:
        """Mass fraction sitting in cells that touch the outer wall."""
        return float(self.values[self.spec.boundary_mask()].sum()) * self.spec.cell_volume

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    @classmethod
    def from_samples(cls, spec: GridSpec, samples: np.ndarray, info: dict | None = None) -> "GridDensity":
        """Normalize nonnegative samples on the grid into a density."""
        samples = np.asarray(samples, dtype=float).reshape(spec.shape)
        samples = np.maximum(samples, 0.0)
        total = samples.sum() * spec.cell_volume
        if not np.isfinite(total) or total <= 0:
            raise DegenerateDensityError("cannot normalize: total mass is zero or non-finite")
        return cls(spec, samples / total, info)

    @classmethod
    def from_function(cls, spec: GridSpec, fn, info: dict | None = None) -> "GridDensity":
        """Sample a pointwise density formula at cell centers and normalize."""
        vals = np.asarray(fn(spec.cell_centers()), dtype=float).reshape(spec.shape)
        return cls.from_samples(spec, vals, info)


def require_same_grid(a: GridDensity, b: GridDensity):
    if a.spec != b.spec:
        raise GridMismatchError(f"grids differ: {a.spec} vs {b.spec}")


def coarsen(rho: GridDensity, factor: int = 2) -> GridDensity:
    """Conservative block-average restriction onto a factor-coarser grid."""
    n = rho.spec.n
    if factor < 2 or n % factor != 0:
        raise ValueError(f"factor {factor} does not divide n={n}")
    m = n // factor
    coarse = GridSpec(rho.spec.dim, rho.spec.radius, m, rho.spec.boundary)
    v = rho.values
    if rho.spec.dim == 1:
        cv = v.reshape(m, factor).mean(axis=1)
    else:
        cv = v.reshape(m, factor, m, factor).mean(axis=(1, 3))
    return GridDensity(coarse, cv)


@dataclass(frozen=True)
class MomentReport:
    """Radial moments of a density: entries of (order, value)."""

    entries: tuple[tuple[float, float], ...]

    def value(self, k: float) -> float:
        for kk, vv in self.entries:
            if kk == k:
                return vv
        raise KeyError(f"moment of order {k} not in report")
