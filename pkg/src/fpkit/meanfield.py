"""Self-consistent stationary densities for distribution-dependent coefficients.

The coefficients depend on the density through interaction kernels,

    A_rho(x) = A0(x) + eps * integral q(x, y) rho(y) dy,
    b_rho(x) = b0(x) + eps * integral h(x, y) rho(y) dy,

and a stationary density of the pair frozen at rho defines the map
Phi(rho). A fixed point of Phi is a stationary solution of the nonlinear
(McKean-Vlasov) equation. For small coupling eps the map is a contraction in
the weighted total-variation metric: the contraction factor scales like
eps * N * C_hat * (sqrt(M_hat) + M_hat), with N the declared kernel bound,
C_hat the empirical stability ratio of the frozen problems, and M_hat the
largest weighted moment integral (1 + |x|)^{2m + beta + k} along the
iteration. The toolkit measures every piece of that product rather than
assuming it.

Kernels that do not depend on x reduce the nonlocal coefficient to a
constant offset (one quadrature per iteration); the general case assembles
the offset pointwise in x with the same quadrature in y.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (ConvergenceError, DegenerateDensityError, EllipticityMarginError,
                     NonContractionError)
from .fields import ClosureField, DiffusionMatrixField, DriftField, GrowthParams, SMOOTH, ScalarField
from .fpk import solve_exact_1d, solve_grid
from .grids import GridDensity, GridSpec
from .oscillation import _fit_line
from .stability import weighted_l1_distance

_EVAL_CHUNK = 4096


class InteractionKernel:
    """One interaction kernel: drift-valued h(x, y) or matrix-valued q(x, y).

    The declared envelope is |k(x, y)| <= sup_bound * (1 + |y|)^growth_order
    (Euclidean norm for drift kernels, operator norm for diffusion kernels);
    it feeds the contraction threshold, so declare it honestly. Diffusion
    kernels must be bounded (growth_order 0) and symmetric-matrix valued so
    the perturbed diffusion stays admissible. Kernels with depends_on_x=False
    are functions of y alone; their nonlocal coefficient is a constant
    offset, computed once per iteration.
    """

    def __init__(self, kind: str, fn: Callable, dim: int, sup_bound: float,
                 growth_order: float = 0.0, depends_on_x: bool = True,
                 name: str = "kernel"):
        if kind not in ("drift", "diffusion"):
            raise ValueError(f"kernel kind must be 'drift' or 'diffusion', got {kind!r}")
        if dim not in (1, 2):
            raise ValueError("kernels support d in {1, 2}")
        if sup_bound <= 0:
            raise ValueError("declared kernel bound must be positive")
        if growth_order < 0:
            raise ValueError("kernel growth order must be nonnegative")
        if kind == "diffusion" and growth_order != 0.0:
            raise ValueError("diffusion kernels must be bounded (growth order 0)")
        self.kind, self.fn, self.dim = kind, fn, int(dim)
        self.sup_bound, self.growth_order = float(sup_bound), float(growth_order)
        self.depends_on_x, self.name = bool(depends_on_x), name

    def _value_shape(self) -> tuple[int, ...]:
        d = self.dim
        return (d,) if self.kind == "drift" else (d, d)

    def convolve(self, rho: GridDensity):
        """integral k(., y) rho(y) dy: an ndarray offset, or a callable of x."""
        y = rho.spec.cell_centers()
        wts = rho.flat() * rho.spec.cell_volume
        shape = self._value_shape()
        if not self.depends_on_x:
            vals = np.asarray(self.fn(y), dtype=float)
            if vals.shape != (len(y),) + shape:
                raise ValueError(f"kernel {self.name!r} returned shape {vals.shape}, "
                                 f"expected {(len(y),) + shape}")
            out = np.tensordot(wts, vals, axes=(0, 0))
            self._check_symmetry(out)
            return out

        def offset(x: np.ndarray) -> np.ndarray:
            x = np.asarray(x, dtype=float)
            res = np.zeros((x.shape[0],) + shape)
            for lo in range(0, x.shape[0], _EVAL_CHUNK):
                xc = x[lo:lo + _EVAL_CHUNK]
                vals = np.asarray(self.fn(xc, y), dtype=float)
                if vals.shape != (xc.shape[0], len(y)) + shape:
                    raise ValueError(f"kernel {self.name!r} returned shape {vals.shape}")
                res[lo:lo + _EVAL_CHUNK] = np.tensordot(vals, wts, axes=(1, 0))
            return res

        return offset

    def _check_symmetry(self, mat: np.ndarray, tol: float = 1e-10):
        if self.kind == "diffusion" and np.abs(mat - mat.T).max() > tol:
            raise ValueError(f"diffusion kernel {self.name!r} produced a non-symmetric offset")


@dataclass(frozen=True, eq=False)
class MeanFieldModel:
    """Base coefficient pair plus interaction kernels and coupling strength."""

    a0: DiffusionMatrixField
    b0: DriftField
    eps: float
    drift_kernel: InteractionKernel | None = None
    diffusion_kernel: InteractionKernel | None = None
    weight_order: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.eps <= 1.0):
            raise ValueError(f"coupling strength must lie in [0, 1], got {self.eps}")
        if self.weight_order < 1.0:
            raise ValueError("weight order must be >= 1")
        if self.a0.dim != self.b0.dim:
            raise ValueError("base pair dimensions differ")
        for ker in (self.drift_kernel, self.diffusion_kernel):
            if ker is not None and ker.dim != self.a0.dim:
                raise ValueError(f"kernel {ker.name!r} dimension does not match the base pair")
        if self.drift_kernel is not None and self.drift_kernel.kind != "drift":
            raise ValueError("drift_kernel must have kind 'drift'")
        if self.diffusion_kernel is not None and self.diffusion_kernel.kind != "diffusion":
            raise ValueError("diffusion_kernel must have kind 'diffusion'")

    @property
    def dim(self) -> int:
        return self.a0.dim

    @property
    def kernel_bound(self) -> float:
        """N: the largest declared kernel envelope constant."""
        return max([k.sup_bound for k in (self.drift_kernel, self.diffusion_kernel)
                    if k is not None], default=0.0)

    @property
    def kernel_growth(self) -> float:
        """m: the largest declared kernel growth order."""
        return max([k.growth_order for k in (self.drift_kernel, self.diffusion_kernel)
                    if k is not None], default=0.0)

    def with_eps(self, eps: float) -> "MeanFieldModel":
        return dataclasses.replace(self, eps=float(eps))


def _shifted_scalar(base: ScalarField, shift, dim: int, name: str) -> ScalarField:
    if np.isscalar(shift):
        return ClosureField(lambda x, b=base, c=float(shift): b.values(x) + c, dim,
                            SMOOTH if base.tag.kind == "smooth" else base.tag, name=name)
    return ClosureField(lambda x, b=base, f=shift: b.values(x) + f(x), dim,
                        base.tag, name=name)


def nonlocal_coefficients(model: MeanFieldModel,
                          rho: GridDensity) -> tuple[DiffusionMatrixField, DriftField]:
    """Coefficients frozen at rho, with an audited ellipticity margin.

    The diffusion offset may eat at most half the declared ellipticity:
    eps * sup|q| >= lambda / 2 raises EllipticityMarginError before any
    solve. The drift growth envelope is re-derived from the declared kernel
    envelope: with D = eps * N_h * integral (1 + |y|)^m rho the perturbed
    drift satisfies <b, x> <= (beta1 + D^2 / (2 beta2)) - (beta2 / 2) |x|^2
    and |b| <= (beta3 + D)(1 + |x|)^beta.
    """
    d = model.dim
    eps = model.eps
    a_eff, lam_eff = model.a0, model.a0.lam
    if model.diffusion_kernel is not None and eps > 0.0:
        ker = model.diffusion_kernel
        if eps * ker.sup_bound >= model.a0.lam / 2.0:
            raise EllipticityMarginError(
                f"coupling eats the ellipticity margin: eps * sup|q| = "
                f"{eps * ker.sup_bound:.6g} >= lambda/2 = {model.a0.lam / 2.0:.6g}")
        off = ker.convolve(rho)
        lam_eff = max(model.a0.lam - eps * ker.sup_bound, 1e-12)
        entries = {}
        for i in range(d):
            for j in range(i, d):
                base = model.a0.entry(i, j)
                if isinstance(off, np.ndarray):
                    shift = eps * off[i, j]
                else:
                    shift = (lambda x, f=off, i0=i, j0=j, e=eps: e * f(x)[:, i0, j0])
                entries[(i, j)] = _shifted_scalar(base, shift, d, f"{base.name}+offset")
        a_eff = DiffusionMatrixField(entries, d, min(lam_eff, 1.0),
                                     name=f"{model.a0.name}+eps*conv")

    b_eff = model.b0
    if model.drift_kernel is not None and eps > 0.0:
        ker = model.drift_kernel
        off = ker.convolve(rho)
        g = model.b0.growth
        r = rho.spec.center_radii()
        mom = float(np.sum((1.0 + r) ** ker.growth_order * rho.flat()) * rho.spec.cell_volume)
        drift_bound = eps * ker.sup_bound * mom
        growth = GrowthParams(beta=g.beta,
                              beta1=g.beta1 + drift_bound ** 2 / (2.0 * g.beta2),
                              beta2=g.beta2 / 2.0,
                              beta3=g.beta3 + drift_bound)
        comps = []
        for i in range(d):
            base = model.b0.components[i]
            if isinstance(off, np.ndarray):
                shift = eps * off[i]
            else:
                shift = (lambda x, f=off, i0=i, e=eps: e * f(x)[:, i0])
            comps.append(_shifted_scalar(base, shift, d, f"{base.name}+offset"))
        b_eff = DriftField(comps, growth, name=f"{model.b0.name}+eps*conv")
    return a_eff, b_eff


def apply_phi(model: MeanFieldModel, rho: GridDensity) -> GridDensity:
    """One application of the self-consistency map Phi."""
    a_eff, b_eff = nonlocal_coefficients(model, rho)
    if model.dim == 1:
        return solve_exact_1d(a_eff, b_eff, rho.spec)
    return solve_grid(a_eff, b_eff, rho.spec)


@dataclass(frozen=True, eq=False)
class FixedPointTrace:
    """Record of a Picard iteration of Phi.

    gaps[t] is the weighted distance between iterates t and t+1; factors are
    consecutive air ratios gap[t+1]/gap[t]. threshold_scale is the measured
    eps * N * (sqrt(M_hat) + M_hat); multiplying it by an externally
    estimated stability ratio C_hat gives the contraction threshold.
    """

    iterates: tuple[GridDensity, ...]
    gaps: tuple[float, ...]
    factors: tuple[float, ...]
    converged: bool
    eps: float
    kernel_bound: float
    m_hat: float
    threshold_scale: float
    tol: float

    @property
    def fixed_point(self) -> GridDensity:
        return self.iterates[-1]

    @property
    def n_steps(self) -> int:
        return len(self.gaps)


def _weighted_moment(rho: GridDensity, power: float) -> float:
    r = rho.spec.center_radii()
    return float(np.sum((1.0 + r) ** power * rho.flat()) * rho.spec.cell_volume)


def picard_iterate(model: MeanFieldModel, rho0: GridDensity, tol: float = 1e-8,
                   max_iter: int = 60) -> FixedPointTrace:
    """Iterate Phi from rho0 until the weighted gap drops below tol.

    Raises NonContractionError (with the gap sequence) when the iteration
    budget is exhausted and the gaps were not monotonically decreasing, and
    ConvergenceError when they were decreasing but have not yet crossed tol.
    """
    k = model.weight_order
    beta = model.b0.growth.beta
    mom_power = 2.0 * model.kernel_growth + beta + k
    iterates = [rho0]
    gaps: list[float] = []
    m_hat = _weighted_moment(rho0, mom_power)
    converged = False
    for _ in range(max_iter):
        nxt = apply_phi(model, iterates[-1])
        m_hat = max(m_hat, _weighted_moment(nxt, mom_power))
        gaps.append(weighted_l1_distance(nxt, iterates[-1], k))
        iterates.append(nxt)
        if gaps[-1] <= tol:
            converged = True
            break
    factors = tuple(gaps[t + 1] / gaps[t] for t in range(len(gaps) - 1) if gaps[t] > 0.0)
    scale = model.eps * model.kernel_bound * (np.sqrt(m_hat) + m_hat)
    trace = FixedPointTrace(iterates=tuple(iterates), gaps=tuple(gaps), factors=factors,
                            converged=converged, eps=model.eps,
                            kernel_bound=model.kernel_bound, m_hat=m_hat,
                            threshold_scale=float(scale), tol=float(tol))
    if not converged:
        if any(f > 1.0 for f in factors):
            raise NonContractionError(
                f"gaps not decreasing after {max_iter} iterations", gaps=gaps)
        raise ConvergenceError(
            f"contraction too slow: gap {gaps[-1]:.3e} > tol {tol:g} after {max_iter} steps",
            history=gaps)
    return trace


def gaussian_probe(spec: GridSpec, mean, std: float) -> GridDensity:
    """Grid restriction of an isotropic Gaussian, for probing Phi."""
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    if mean.shape != (spec.dim,):
        raise ValueError(f"mean must have shape ({spec.dim},)")
    if std <= 0:
        raise ValueError("std must be positive")
    pts = spec.cell_centers()
    z = np.sum((pts - mean) ** 2, axis=1) / (2.0 * std ** 2)
    return GridDensity.from_samples(spec, np.exp(-z))


@dataclass(frozen=True, eq=False)
class ContractionEstimate:
    """Sampled Lipschitz data for Phi on a probe family."""

    eps: float
    k: float
    factors: tuple[float, ...]

    @property
    def factor(self) -> float:
        return max(self.factors)


def default_probes(spec: GridSpec) -> tuple[GridDensity, ...]:
    """Gaussian location-scale probes spanning shifted and dilated inputs."""
    d = spec.dim
    combos = [(0.5, 1.0), (-0.5, 1.0), (0.0, 1.25), (0.25, 0.8)]
    return tuple(gaussian_probe(spec, np.full(d, m), s) for m, s in combos)


def contraction_estimate(model: MeanFieldModel, spec: GridSpec,
                         probes: Sequence[GridDensity] | None = None) -> ContractionEstimate:
    """Sampled contraction factor of Phi: max over probe pairs of the ratio
    ||Phi(p) - Phi(q)||_k / ||p - q||_k.

    Probe pairs must be distinguishable on the grid; a coincident pair makes
    the ratio undefined and raises DegenerateDensityError.
    """
    k = model.weight_order
    probes = tuple(probes) if probes is not None else default_probes(spec)
    if len(probes) < 2:
        raise ValueError("need at least two probe densities")
    images = [apply_phi(model, p) for p in probes]
    factors = []
    for i in range(len(probes)):
        for j in range(i + 1, len(probes)):
            den = weighted_l1_distance(probes[i], probes[j], k)
            if den < 1e-13:
                raise DegenerateDensityError(
                    f"probe densities {i} and {j} coincide; contraction ratio undefined")
            factors.append(weighted_l1_distance(images[i], images[j], k) / den)
    return ContractionEstimate(eps=model.eps, k=k, factors=tuple(factors))


def epsilon_threshold(model: MeanFieldModel, spec: GridSpec, eps_max: float = 1.0,
                      tol: float = 1e-3, probes: Sequence[GridDensity] | None = None) -> float:
    """Largest coupling (up to eps_max) with sampled contraction factor < 1.

    Bisects on eps, using the sampled factor as a monotone surrogate. When
    even eps_max contracts on the probes, eps_max itself is returned.
    """
    if contraction_estimate(model.with_eps(eps_max), spec, probes).factor < 1.0:
        return eps_max
    lo, hi = 0.0, eps_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if contraction_estimate(model.with_eps(mid), spec, probes).factor < 1.0:
            lo = mid
        else:
            hi = mid
    return lo


def linear_response(model: MeanFieldModel, spec: GridSpec,
                    eps_grid: Sequence[float]) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Sampled contraction factor along an eps grid with its linear fit.

    Returns (eps values, factors, slope, r_squared). The factor of the
    decoupled model (eps = 0) is exactly zero, so the fit is anchored near
    the origin and r_squared measures how linear the response is.
    """
    eps_arr = np.asarray(list(eps_grid), dtype=float)
    facs = np.array([contraction_estimate(model.with_eps(e), spec).factor for e in eps_arr])
    slope, intercept, sse = _fit_line(eps_arr, facs)
    tot = float(np.sum((facs - facs.mean()) ** 2))
    r2 = 1.0 - sse / tot if tot > 0 else 1.0
    return eps_arr, facs, float(slope), float(r2)
