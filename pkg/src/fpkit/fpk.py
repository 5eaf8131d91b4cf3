"""Stationary Kolmogorov solvers and density diagnostics.

Two routes to the stationary density rho of the operator
L u = sum_ij a^ij d_i d_j u + sum_i b^i d_i u (equivalently, rho solves the
formal adjoint equation sum_ij d_i d_j (a^ij rho) - sum_i d_i (b^i rho) = 0):

* solve_exact_1d: in one dimension the zero-flux first integral gives the
  closed form rho(x) = C / a(x) * exp(integral_0^x b/a), evaluated by
  cumulative composite quadrature on a fine mesh and normalized by cell
  quadrature on the truncated grid.

* solve_grid: flux-form finite volumes in d = 1, 2. The flux through a face
  in direction i is d_j(a^ij rho) - b^i rho with second-order centered
  differences; cross-derivative terms average the four cells around each
  interior corner, coefficients are evaluated pointwise at faces and corners.
  Outer walls carry zero flux, so row sums telescope and the singular system
  is closed by swapping the equation of the center-most cell for the
  normalization constraint sum rho h^d = 1.

The scheme is second order but not monotone; tiny negative cells can appear
and are clipped with the removed mass recorded (escalated to an error in
strict mode when it exceeds 1e-6).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (ConfinementError, ConvergenceError, DegenerateDensityError,
                     EllipticityError, SchemePositivityError, SupportError, TruncationError)
from .fields import (ClosureField, ConstantField, DiffusionMatrixField, DriftField,
                     ScalarField, linear_drift, make_example_field)
from .grids import GridDensity, GridSpec
from .quadrature import center_indices, cumulative_integral, fine_mesh
from .testfunctions import SmoothTestFunction

BOUNDARY_MASS_LIMIT = 1e-4
RESIDUAL_LIMIT = 1e-10
CLIP_MASS_LIMIT = 1e-6


def _scalar_diffusion(a) -> ScalarField:
    if isinstance(a, DiffusionMatrixField):
        if a.dim != 1:
            raise ValueError("solve_exact_1d needs a one-dimensional diffusion")
        return a.entry(0, 0)
    return a


def _fine_profile_1d(a, b: DriftField, spec: GridSpec, subdiv: int = 8) -> dict:
    """Fine-mesh data for the 1D closed form: log-density and normalization.

    Returns the fine mesh, the cumulative integral of b/a anchored at 0, the
    normalized fine density, and the cell-quadrature normalizer. Shared with
    the 1D Poisson quadrature solver, which integrates against the same
    profile.
    """
    if spec.dim != 1:
        raise ValueError("1D solver called on a non-1D grid")
    af = _scalar_diffusion(a)
    pts, hf = fine_mesh(spec.radius, spec.n, subdiv)
    X = pts[:, None]
    a_vals = af.values(X)
    if (a_vals <= 0.0).any():
        i = int(np.argmin(a_vals))
        raise EllipticityError(f"diffusion coefficient nonpositive at x={pts[i]:.6g} "
                               f"(value {a_vals[i]:.6g})")
    b_vals = b.values(X)[:, 0]
    integ = cumulative_integral(b_vals / a_vals, hf)
    integ = integ - integ[len(pts) // 2]  # anchor the antiderivative at x = 0
    log_rho = integ - np.log(a_vals)
    shift = float(log_rho.max())
    unnorm = np.exp(log_rho - shift)
    cidx = center_indices(spec.n, subdiv)
    z_cells = float(unnorm[cidx].sum()) * spec.h
    if not np.isfinite(z_cells) or z_cells <= 0.0:
        raise ConfinementError("stationary normalization diverged; drift does not confine")
    rho_fine = unnorm / z_cells
    return {"pts": pts, "hf": hf, "subdiv": subdiv, "integral_b_over_a": integ,
            "rho_fine": rho_fine, "center_idx": cidx, "a_fine": a_vals, "b_fine": b_vals,
            "log_normalizer": shift + math.log(z_cells)}


def solve_exact_1d(a, b: DriftField, spec: GridSpec, subdiv: int = 8,
                   check_truncation: bool = True) -> GridDensity:
    """Stationary density in d = 1 from the zero-flux closed form.

    rho(x) = exp(integral_0^x b/a ds) / (a(x) Z), with the cumulative integral
    computed by composite Simpson quadrature on a mesh `subdiv` times finer
    than the grid and Z fixed by unit cell-quadrature mass on the truncated
    grid. Pass check_truncation=False when the box is the actual domain (a
    zero-flux problem on a bounded interval) rather than a truncation of the
    line; boundary mass is then expected.
    """
    prof = _fine_profile_1d(a, b, spec, subdiv)
    rho_c = prof["rho_fine"][prof["center_idx"]]
    dens = GridDensity(spec, rho_c / (rho_c.sum() * spec.h),
                       info={"method": "exact-1d", "log_normalizer": prof["log_normalizer"]})
    if check_truncation and dens.boundary_mass >= BOUNDARY_MASS_LIMIT:
        raise TruncationError(
            f"under-truncation: boundary cells hold mass {dens.boundary_mass:.3e} "
            f">= {BOUNDARY_MASS_LIMIT:g}; enlarge the radius")
    return dens


# ---------------------------------------------------------------------------
# finite-volume assembly
# ---------------------------------------------------------------------------


class _Triplets:
    def __init__(self):
        self.rows: list[np.ndarray] = []
        self.cols: list[np.ndarray] = []
        self.vals: list[np.ndarray] = []

    def add(self, r, c, v):
        r, c, v = np.broadcast_arrays(r, c, v)
        self.rows.append(np.asarray(r).ravel())
        self.cols.append(np.asarray(c).ravel())
        self.vals.append(np.asarray(v, dtype=float).ravel())

    def matrix(self, n_rows: int, drop_row: int | None = None) -> sp.csr_matrix:
        r = np.concatenate(self.rows)
        c = np.concatenate(self.cols)
        v = np.concatenate(self.vals)
        if drop_row is not None:
            keep = r != drop_row
            r, c, v = r[keep], c[keep], v[keep]
        return sp.coo_matrix((v, (r, c)), shape=(n_rows, n_rows)).tocsr()


def _flux_divergence_triplets(A: DiffusionMatrixField, b: DriftField, spec: GridSpec) -> _Triplets:
    """Triplets of the flux-form divergence operator M with zero-flux walls.

    Face flux along axis i: [(a^ii rho)_hi - (a^ii rho)_lo]/h
    + [corner(a^i,oth rho)_up - corner(a^i,oth rho)_down]/h
    - b^i(face) (rho_lo + rho_hi)/2, corners averaging the 4 surrounding
    cells (2 at the wall). Divergence row: sum over the cell's faces of
    +-F/h; wall faces carry zero flux and are skipped.
    """
    n, h, R = spec.n, spec.h, spec.radius
    centers = spec.axis_centers()
    edges = -R + np.arange(1, n) * h  # interior face positions
    trip = _Triplets()

    if spec.dim == 1:
        cells = np.arange(n)
        lo, hi = cells[:-1], cells[1:]
        a_cc = A.entry(0, 0).values(centers[:, None])
        b_f = b.values(edges[:, None])[:, 0]
        # face flux F = (a_hi rho_hi - a_lo rho_lo)/h - b_f (rho_lo + rho_hi)/2
        for cell, coef in ((lo, -a_cc[lo] / h - b_f / 2.0), (hi, a_cc[hi] / h - b_f / 2.0)):
            trip.add(lo, cell, coef / h)   # divergence: +F/h into the lower cell
            trip.add(hi, cell, -coef / h)  # and -F/h into the upper cell
        return trip

    idx = np.arange(n * n).reshape(n, n)
    cell_pts = spec.cell_centers()
    a_diag = [A.entry(0, 0).values(cell_pts).reshape(n, n),
              A.entry(1, 1).values(cell_pts).reshape(n, n)]
    a_off_field = A.entry(0, 1)
    off_is_zero = isinstance(a_off_field, ConstantField) and a_off_field.value == 0.0
    all_edges = np.concatenate([[-R], edges, [R]])  # n+1 positions including walls

    # face indices: fi along the face axis (0..n-2), ci across it (0..n-1)
    FI, CI = np.meshgrid(np.arange(n - 1), np.arange(n), indexing="ij")

    for ax in (0, 1):
        def cell_pair(fi, ci):
            """Flat ids of the (lo, hi) cells straddling face (fi+1/2, ci)."""
            if ax == 0:
                return idx[fi, ci], idx[fi + 1, ci]
            return idx[ci, fi], idx[ci, fi + 1]

        def cell_grid(arr, fi, ci):
            return arr[fi, ci] if ax == 0 else arr[ci, fi]

        row_lo, row_hi = cell_pair(FI, CI)
        if ax == 0:
            f_pts = np.stack([edges[FI].ravel(), centers[CI].ravel()], axis=1)
        else:
            f_pts = np.stack([centers[CI].ravel(), edges[FI].ravel()], axis=1)
        b_f = b.values(f_pts)[:, ax].reshape(FI.shape)
        a_lo = cell_grid(a_diag[ax], FI, CI)
        a_hi = cell_grid(a_diag[ax], FI + 1, CI)

        def scatter(col, coef):
            trip.add(row_lo, col, coef / h)
            trip.add(row_hi, col, -coef / h)

        scatter(row_lo, -a_lo / h - b_f / 2.0)
        scatter(row_hi, a_hi / h - b_f / 2.0)

        if off_is_zero:
            continue

        # corner values of a^{01} for this face set, indexed (fi, level) with
        # level l = 0..n at cross-positions all_edges[l]
        if ax == 0:
            c_pts = np.stack([np.repeat(edges, n + 1), np.tile(all_edges, n - 1)], axis=1)
            a01 = a_off_field.values(c_pts).reshape(n - 1, n + 1)
        else:
            c_pts = np.stack([np.tile(all_edges, n - 1), np.repeat(edges, n + 1)], axis=1)
            a01 = a_off_field.values(c_pts).reshape(n - 1, n + 1)

        # cross flux at face (fi, ci): [V(level ci+1) - V(level ci)]/h where
        # V(l) = a01(corner l) * mean of the cells around that corner
        for sign, lshift in ((+1.0, 1), (-1.0, 0)):
            L = CI + lshift  # corner level per face, 0..n
            aL = a01[FI, L]
            interior = (L >= 1) & (L <= n - 1)
            fi_i, ci_i = FI[interior], CI[interior]
            w4 = sign * aL[interior] / (4.0 * h * h)
            rl, rh = cell_pair(fi_i, ci_i)
            for oth in (L[interior] - 1, L[interior]):
                ca, cb = cell_pair(fi_i, oth)
                for cc in (ca, cb):
                    trip.add(rl, cc, w4)
                    trip.add(rh, cc, -w4)
            wall = ~interior
            if wall.any():
                fi_w, ci_w = FI[wall], CI[wall]
                touch = np.where(L[wall] == 0, 0, n - 1)
                w2 = sign * aL[wall] / (2.0 * h * h)
                rl, rh = cell_pair(fi_w, ci_w)
                ca, cb = cell_pair(fi_w, touch)
                for cc in (ca, cb):
                    trip.add(rl, cc, w2)
                    trip.add(rh, cc, -w2)
    return trip


def solve_grid(A, b: DriftField, spec: GridSpec, strict: bool = False,
               ellipticity_tol: float = 1e-6, check_truncation: bool = True) -> GridDensity:
    """Stationary density by flux-form finite volumes on the truncated box.

    Builds the singular divergence operator, swaps the center-most cell's
    equation for the mass constraint, and solves with a sparse direct
    factorization. The solution is validated: relative residual of the full
    singular system below 1e-10 (else ConvergenceError with the history),
    clipped negative mass recorded (SchemePositivityError in strict mode above
    1e-6), boundary-cell mass below 1e-4 (else TruncationError; disabled by
    check_truncation=False for problems posed on the box itself).
    """
    if isinstance(A, ScalarField):
        if spec.dim != A.dim:
            raise ValueError("diffusion dimension does not match grid")
        samp = A.values(spec.cell_centers())
        lam = min(1.0, float(samp.min()), 1.0 / float(samp.max()))
        if lam <= 0:
            raise EllipticityError("scalar diffusion must be positive")
        A = DiffusionMatrixField.isotropic(A, lam)
    A.check_ellipticity(spec.cell_centers(), tol=ellipticity_tol)

    N = spec.n_cells
    trip = _flux_divergence_triplets(A, b, spec)
    M = trip.matrix(N)

    radii = spec.center_radii()
    pin = int(np.argmin(radii))
    M_pinned = trip.matrix(N, drop_row=pin).tolil()
    M_pinned[pin, :] = spec.cell_volume
    M_pinned = M_pinned.tocsc()
    rhs = np.zeros(N)
    rhs[pin] = 1.0

    raw = spla.spsolve(M_pinned, rhs)
    if not np.all(np.isfinite(raw)):
        raise ConvergenceError("sparse direct solve produced non-finite values", history=[np.inf])

    # relative residual of the full singular system, measured against the
    # cancellation-free magnitude |M| |rho|
    denom = float((abs(M) @ np.abs(raw)).max())
    residual = float(np.abs(M @ raw).max()) / max(denom, 1e-300)
    history = [residual]
    if residual > RESIDUAL_LIMIT:
        raise ConvergenceError(
            f"linear solve residual {residual:.3e} exceeds {RESIDUAL_LIMIT:g}", history=history)

    neg = raw < 0.0
    clipped_mass = float(-raw[neg].sum()) * spec.cell_volume
    if clipped_mass > CLIP_MASS_LIMIT and strict:
        raise SchemePositivityError(
            f"clipped negative mass {clipped_mass:.3e} exceeds {CLIP_MASS_LIMIT:g} in strict mode",
            clipped_mass=clipped_mass)
    raw = np.maximum(raw, 0.0)
    total = raw.sum() * spec.cell_volume
    if total <= 0 or not np.isfinite(total):
        raise DegenerateDensityError("solution mass vanished after clipping")
    rho = GridDensity(spec, (raw / total).reshape(spec.shape),
                      info={"method": "fv-direct", "residual": residual,
                            "residual_history": history, "clipped_mass": clipped_mass,
                            "pinned_cell": pin})
    if check_truncation and rho.boundary_mass >= BOUNDARY_MASS_LIMIT:
        raise TruncationError(
            f"under-truncation: boundary cells hold mass {rho.boundary_mass:.3e} "
            f">= {BOUNDARY_MASS_LIMIT:g}; enlarge the radius")
    return rho


# ---------------------------------------------------------------------------
# density diagnostics
# ---------------------------------------------------------------------------


def moment(rho: GridDensity, k: float) -> float:
    """Radial moment: integral of |x|^k rho by cell quadrature."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    r = rho.spec.center_radii()
    return float((r ** k) @ rho.flat()) * rho.spec.cell_volume


def moment_report(rho: GridDensity, orders: Sequence[float] = (0.0, 1.0, 2.0)):
    from .grids import MomentReport
    entries = tuple((float(k), moment(rho, float(k))) for k in orders)
    for k, v in entries:
        if k == 0.0 and abs(v - 1.0) > 1e-8:
            raise ValueError(f"zeroth moment {v!r} violates unit mass")
    return MomentReport(entries)


def weighted_lp_norm(rho: GridDensity, k: float, p: float) -> float:
    """(integral (1+|x|)^{k p} rho^p)^{1/p} by cell quadrature.

    p must exceed 1. p = math.inf requests the essential-sup variant
    max (1+|x|)^k rho explicitly; in d = 1 that is the degenerate analogue of
    the d/(d-1) integrability estimate and is provided as a diagnostic only.
    """
    if k < 0:
        raise ValueError("weight order k must be nonnegative")
    r = rho.spec.center_radii()
    if p == math.inf:
        return float(((1.0 + r) ** k * rho.flat()).max())
    if p <= 1.0:
        raise ValueError(f"exponent p must exceed 1 (got {p}); "
                         "request p=math.inf explicitly for the sup variant")
    w = (1.0 + r) ** (k * p)
    return float((w @ rho.flat() ** p) * rho.spec.cell_volume) ** (1.0 / p)


def harnack_ratio(rho: GridDensity, radius: float) -> float:
    """max/min of the density over cells with centers in B(0, radius)."""
    if radius <= 0 or radius > rho.spec.radius:
        raise ValueError(f"ball radius {radius} must lie in (0, {rho.spec.radius}]")
    sel = rho.spec.center_radii() <= radius
    vals = rho.flat()[sel]
    lo = float(vals.min())
    if lo <= 0.0:
        raise DegenerateDensityError(f"density vanishes inside B(0, {radius:g})")
    return float(vals.max()) / lo


def check_support(phi: SmoothTestFunction, spec: GridSpec):
    reach = float(np.max(np.abs(phi.center))) + phi.support_radius
    if reach > spec.radius:
        raise SupportError(
            f"test function support reaches {reach:.4g}, outside the box of radius {spec.radius:g}")


def apply_generator(A: DiffusionMatrixField, b: DriftField, phi: SmoothTestFunction,
                    pts: np.ndarray) -> np.ndarray:
    """L phi = tr(A D^2 phi) + <b, grad phi> at the given points."""
    a_val = A.values(pts)
    b_val = b.values(pts)
    return (np.einsum("nij,nij->n", a_val, phi.hess(pts))
            + np.einsum("ni,ni->n", b_val, phi.grad(pts)))


def weak_residual(rho: GridDensity, A: DiffusionMatrixField, b: DriftField,
                  phis: Sequence[SmoothTestFunction]) -> np.ndarray:
    """|integral rho L phi| for each test function, by cell quadrature.

    For the exact stationary density these vanish (that is the definition of
    a probability solution); for a discrete solution they measure the weak
    defect and should stay within a small multiple of the discretization
    error once phi is normalized.
    """
    pts = rho.spec.cell_centers()
    vol = rho.spec.cell_volume
    out = np.empty(len(phis))
    flat = rho.flat()
    for i, phi in enumerate(phis):
        check_support(phi, rho.spec)
        out[i] = abs(float((apply_generator(A, b, phi, pts) @ flat) * vol))
    return out


def normalized_against_generator(phi: SmoothTestFunction, A: DiffusionMatrixField,
                                 b: DriftField, spec: GridSpec) -> SmoothTestFunction:
    """Scale phi so that max |L phi| over the grid equals 1."""
    pts = spec.cell_centers()
    scale = float(np.abs(apply_generator(A, b, phi, pts)).max())
    if scale <= 0:
        raise ValueError("test function is annihilated by the generator on this grid")
    return phi.scaled(1.0 / scale)


# ---------------------------------------------------------------------------
# built-in model catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    """A named coefficient pair with an independent reference density."""

    name: str
    dim: int
    A: DiffusionMatrixField
    b: DriftField
    _reference: Callable[[GridSpec], GridDensity]

    def reference(self, spec: GridSpec) -> GridDensity:
        """Reference stationary density on the given grid (closed form or 1D quadrature)."""
        return self._reference(spec)


def _gaussian_density(cov_inv: np.ndarray):
    def fn(pts):
        quad = np.einsum("ni,ij,nj->n", pts, cov_inv, pts)
        return np.exp(-0.5 * quad)
    return fn


def builtin_models() -> tuple[ModelSpec, ...]:
    """The model catalog used by the weak-form and convergence checks.

    ou-1d: unit diffusion, linear drift (exact: standard Gaussian via the 1D
    closed form). dini-1d: rough isotropic diffusion built from the
    log-modulus field, linear drift (reference: 1D closed form). ou-2d: unit
    diffusion, linear drift (exact: product Gaussian). anisotropic-2d:
    constant rotated anisotropic matrix, linear drift (exact: Gaussian with
    covariance equal to the diffusion matrix); this one exercises the
    cross-derivative stencil.
    """
    models = []

    a1 = ConstantField(1.0, 1)
    b1 = linear_drift(1)
    models.append(ModelSpec("ou-1d", 1, DiffusionMatrixField.isotropic(a1, 1.0), b1,
                            lambda spec, a=a1, b=b1: solve_exact_1d(a, b, spec)))

    logmod = make_example_field("log-modulus", gamma=0.5, d=1)
    a_rough = ClosureField(lambda x, f=logmod: 0.75 + 0.5 * f.values(x), 1,
                           logmod.tag, "0.75 + 0.5 log-modulus")
    b2 = linear_drift(1)
    models.append(ModelSpec("dini-1d", 1, DiffusionMatrixField.isotropic(a_rough, 0.7), b2,
                            lambda spec, a=a_rough, b=b2: solve_exact_1d(a, b, spec)))

    b3 = linear_drift(2)
    A3 = DiffusionMatrixField.from_constant(np.eye(2), lam=1.0, name="I2")
    ref3 = _gaussian_density(np.eye(2))
    models.append(ModelSpec("ou-2d", 2, A3, b3,
                            lambda spec, f=ref3: GridDensity.from_function(spec, f)))

    th = math.pi / 6.0
    Q = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    mat = Q @ np.diag([1.3, 0.7]) @ Q.T
    A4 = DiffusionMatrixField.from_constant(mat, lam=0.7, name="rotated-anisotropic")
    b4 = linear_drift(2)
    ref4 = _gaussian_density(np.linalg.inv(mat))
    models.append(ModelSpec("anisotropic-2d", 2, A4, b4,
                            lambda spec, f=ref4: GridDensity.from_function(spec, f)))

    return tuple(models)


def discretization_error(model: ModelSpec, spec: GridSpec) -> float:
    """Plain L1 gap between the grid solve and the model's reference density."""
    sol = solve_grid(model.A, model.b, spec)
    ref = model.reference(spec)
    return float(np.abs(sol.flat() - ref.flat()).sum()) * spec.cell_volume
