"""Quadrature helpers shared by the solvers and the oscillation sampler.

Everything here is deterministic: node layouts depend only on the requested
orders, never on global state.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_simpson


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the Gauss-Legendre rule on [-1, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def gauss_interval(a: float, b: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    z, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    return a + half * (z + 1.0), w * half


def interval_rule(center: np.ndarray, radius: float, n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint rule for averaging over the interval [c - r, c + r] (d = 1).

    Returns points of shape (n_points, 1) and weights summing to 1, so that
    weights @ f(points) is the interval average.
    """
    # midpoints of n_points equal subintervals
    t = (np.arange(n_points) + 0.5) / n_points * 2.0 - 1.0
    pts = (center[0] + radius * t)[:, None]
    w = np.full(n_points, 1.0 / n_points)
    return pts, w


def disk_rule(center: np.ndarray, radius: float, n_radial: int, n_angular: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint product rule for averaging over the disk B(c, r) (d = 2).

    Radial midpoints with area-element weights, uniform angular midpoints.
    Weights sum to 1 so that weights @ f(points) is the disk average.
    """
    rr = (np.arange(n_radial) + 0.5) / n_radial  # scaled radii midpoints
    th = (np.arange(n_angular) + 0.5) / n_angular * 2.0 * np.pi
    Rg, Tg = np.meshgrid(rr, th, indexing="ij")
    px = center[0] + radius * Rg * np.cos(Tg)
    py = center[1] + radius * Rg * np.sin(Tg)
    pts = np.stack([px.ravel(), py.ravel()], axis=1)
    # area weight proportional to r dr dtheta; normalize to average
    w = Rg.ravel()
    w = w / w.sum()
    return pts, w


def ball_average_rule(center: np.ndarray, radius: float, n_radial: int, n_angular: int) -> tuple[np.ndarray, np.ndarray]:
    """Dispatch the ball-average rule by dimension of `center`."""
    d = len(center)
    if d == 1:
        return interval_rule(center, radius, 2 * n_radial)
    if d == 2:
        return disk_rule(center, radius, n_radial, n_angular)
    raise ValueError(f"ball averages implemented for d in {{1, 2}}, got d={d}")


def cumulative_integral(values: np.ndarray, dx: float) -> np.ndarray:
    """Cumulative integral of uniformly sampled values, starting at 0.

    Composite Simpson accumulation, O(dx^4). `values` is sampled on a uniform
    mesh of spacing dx; the result has the same length with result[0] = 0.
    """
    out = cumulative_simpson(values, dx=dx, initial=0.0)
    return np.asarray(out)


def fine_mesh(radius: float, n_cells: int, subdiv: int) -> tuple[np.ndarray, float]:
    """Uniform quadrature mesh over [-radius, radius] aligned with cell centers.

    Cells have width h = 2*radius/n_cells; each is split into `subdiv` equal
    pieces (subdiv must be even so cell centers land on mesh points). Returns
    (mesh_points, fine_spacing); mesh has n_cells*subdiv + 1 points.
    """
    if subdiv % 2 != 0:
        raise ValueError("subdiv must be even so cell centers are mesh points")
    m = n_cells * subdiv
    pts = np.linspace(-radius, radius, m + 1)
    return pts, 2.0 * radius / m


def center_indices(n_cells: int, subdiv: int) -> np.ndarray:
    """Indices of cell centers inside the fine_mesh point array."""
    return np.arange(n_cells) * subdiv + subdiv // 2
