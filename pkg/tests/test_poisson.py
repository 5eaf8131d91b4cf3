"""Poisson equations for the generator: constants, closed forms, grids, bounds."""

import math

import numpy as np
import pytest

from fpkit.errors import ConfinementError, IncompatibilityError, TruncationError
from fpkit.fields import (
    SMOOTH,
    ClosureField,
    ConstantField,
    DiffusionMatrixField,
    DriftField,
    GrowthParams,
    linear_drift,
)
from fpkit.fpk import builtin_models, solve_exact_1d, solve_grid
from fpkit.grids import GridDensity, GridSpec
from fpkit.poisson import (
    PoissonProblem,
    builtin_poisson_cases,
    lyapunov_constants,
    radial_power_generator_values,
    solve_poisson,
    solve_poisson_1d,
    solve_poisson_grid,
    verify_growth_bounds,
)

SCAN_STEP = 8.0 / 800.0  # default radius grid spacing in lyapunov_constants


def source(fn, dim, name):
    return ClosureField(fn, dim, SMOOTH, name)


@pytest.fixture(scope="module")
def ou_problem_parts(ou_1d, grid_1d):
    A, b = ou_1d
    rho = solve_exact_1d(ConstantField(1.0, 1), b, grid_1d)
    return A, b, rho


class TestLyapunovConstants:
    def test_ou_sampled_radius_near_sqrt3(self, ou_1d):
        # L(1+x^2) = 2 - 2x^2 <= -(1+x^2) exactly when x^2 >= 3
        A, b = ou_1d
        wit = lyapunov_constants(A, b, 1.0)
        assert abs(wit.r0 - math.sqrt(3.0)) <= SCAN_STEP
        assert 1.0 <= wit.m0 <= 1.01
        assert wit.pin_radius == 2.0 * wit.r0

    def test_formula_radius_near_sqrt5(self, ou_1d):
        # formula branch: 2(d/lam + beta1 - beta2 r^2) <= -(1+r^2) at r^2 >= 5
        A, b = ou_1d
        wit = lyapunov_constants(A, b, 1.0)
        assert abs(wit.r0_formula - math.sqrt(5.0)) <= SCAN_STEP
        assert wit.m0_formula >= 1.0

    def test_formula_constants_depend_only_on_parameters(self, ou_1d):
        A, b = ou_1d
        perturbed = DriftField(
            [ClosureField(lambda x: -x[:, 0] - 0.2 * np.tanh(x[:, 0]), 1, SMOOTH, "bt")],
            GrowthParams(beta=1.0, beta1=1.0, beta2=1.0, beta3=2.0),
            "perturbed-linear",
        )
        wit = lyapunov_constants(A, b, 1.0)
        wit_p = lyapunov_constants(A, perturbed, 1.0)
        assert wit_p.m0_formula == wit.m0_formula
        assert wit_p.r0_formula == wit.r0_formula
        # the sampled branch sees the actual coefficients
        assert wit_p.r0 != wit.r0

    def test_certified_inequality_holds_past_r0(self, ou_1d):
        A, b = ou_1d
        wit = lyapunov_constants(A, b, 1.0)
        radii = np.arange(wit.r0 + SCAN_STEP, 2.0 * wit.r0 + 1e-12, SCAN_STEP)
        vals = radial_power_generator_values(A, b, radii[:, None], 1.0)
        assert (vals + wit.m0 * (1.0 + radii ** 2) <= 1e-9).all()

    def test_outward_drift_has_no_radius(self, ou_1d):
        A, _ = ou_1d
        outward = DriftField(
            [ClosureField(lambda x: x[:, 0], 1, SMOOTH, "x1")],
            GrowthParams(beta=1.0, beta1=1.0, beta2=1.0, beta3=1.0),
            "outward",
        )
        with pytest.raises(ConfinementError, match="does not confine"):
            lyapunov_constants(A, outward, 1.0)

    def test_weight_order_below_one_rejected(self, ou_1d):
        A, b = ou_1d
        with pytest.raises(ValueError, match=">= 1"):
            lyapunov_constants(A, b, 0.5)

    def test_radial_action_closed_form(self, ou_1d):
        A, b = ou_1d
        r = np.array([0.5, 1.0, 2.0, 3.0])
        vals = radial_power_generator_values(A, b, r[:, None], 1.0)
        assert vals == pytest.approx(2.0 - 2.0 * r ** 2, rel=1e-14)
        with pytest.raises(ValueError, match="nonzero"):
            radial_power_generator_values(A, b, np.zeros((1, 1)), 1.0)


class TestPoissonProblem:
    def test_centering_removes_the_mean(self, ou_problem_parts):
        A, b, rho = ou_problem_parts
        prob = PoissonProblem(A, b, source(lambda z: z[:, 0] ** 2, 1, "x2"), 2.0, rho)
        assert prob.center_constant == pytest.approx(1.0, abs=1e-8)
        assert prob.centering_defect() <= 1e-14

    def test_hessian_weight_defaults(self, ou_problem_parts):
        A, b, rho = ou_problem_parts
        prob = PoissonProblem(A, b, source(lambda z: z[:, 0], 1, "x"), 1.0, rho)
        # p = 2d and s = (2 beta + k) p + d + 1 with beta = 1
        assert prob.p == 2.0
        assert prob.s == 8.0
        prob2 = PoissonProblem(A, b, source(lambda z: z[:, 0], 1, "x"), 2.0, rho, p=4.0)
        assert prob2.s == (2.0 + 2.0) * 4.0 + 2.0

    def test_parameter_validation(self, ou_problem_parts):
        A, b, rho = ou_problem_parts
        psi = source(lambda z: z[:, 0], 1, "x")
        with pytest.raises(ValueError, match="k must be >= 1"):
            PoissonProblem(A, b, psi, 0.5, rho)
        with pytest.raises(ValueError, match="must exceed d"):
            PoissonProblem(A, b, psi, 1.0, rho, p=1.0)
        with pytest.raises(ValueError, match="dimensions"):
            PoissonProblem(A, b, source(lambda z: z[:, 0], 2, "x1"), 1.0, rho)


class TestQuadratureSolver:
    def test_linear_source_recovers_minus_x(self, ou_problem_parts, grid_1d):
        A, b, rho = ou_problem_parts
        sol = solve_poisson_1d(PoissonProblem(A, b, source(lambda z: z[:, 0], 1, "x"), 1.0, rho))
        x = grid_1d.axis_centers()
        core = np.abs(x) <= 4.0
        assert np.abs(sol.u + x)[core].max() <= 1e-6

    def test_quadratic_source_recovers_parabola(self, ou_problem_parts, grid_1d):
        A, b, rho = ou_problem_parts
        sol = solve_poisson_1d(
            PoissonProblem(A, b, source(lambda z: z[:, 0] ** 2 - 1.0, 1, "x2-1"), 2.0, rho)
        )
        x = grid_1d.axis_centers()
        exact = -0.5 * x ** 2
        # both sides carry the same pin-ball normalization
        mask = grid_1d.center_radii() <= sol.pin_radius
        exact = exact - exact[mask].mean()
        core = np.abs(x) <= 4.0
        assert np.abs(sol.u - exact)[core].max() <= 1e-6

    def test_bounded_source_interior_residual(self, ou_problem_parts):
        A, b, rho = ou_problem_parts
        sol = solve_poisson_1d(
            PoissonProblem(A, b, source(lambda z: np.tanh(z[:, 0]), 1, "tanh"), 1.0, rho)
        )
        assert sol.residual_interior <= 1e-6
        assert sol.info["method"] == "quadrature-1d"

    def test_skipping_the_centering_breaks_the_tail(self, ou_problem_parts):
        A, b, rho = ou_problem_parts
        prob = PoissonProblem(A, b, source(lambda z: z[:, 0] ** 2, 1, "x2"), 2.0, rho)
        with pytest.raises(TruncationError, match="tail integral"):
            solve_poisson_1d(prob, center=False)

    def test_constant_source_centers_to_zero_solution(self, ou_problem_parts):
        A, b, rho = ou_problem_parts
        sol = solve_poisson_1d(PoissonProblem(A, b, ConstantField(1.0, 1), 1.0, rho))
        assert np.abs(sol.u).max() == 0.0
        assert np.abs(sol.du).max() == 0.0

    def test_quotients_divide_by_source_sup(self, ou_problem_parts):
        A, b, rho = ou_problem_parts
        sol = solve_poisson_1d(
            PoissonProblem(A, b, source(lambda z: np.tanh(z[:, 0]), 1, "tanh"), 1.0, rho)
        )
        assert sol.g0_quotient == pytest.approx(sol.g0 / sol.psi_sup, rel=1e-14)
        assert sol.g1_quotient == pytest.approx(sol.g1 / sol.psi_sup, rel=1e-14)
        assert sol.h_quotient == pytest.approx(sol.h_norm / sol.psi_sup, rel=1e-14)
        assert sol.psi_sup > 0


class TestGridSolver:
    @pytest.mark.parametrize(
        "fn,k,exact_fn",
        [
            (lambda z: z[:, 0], 1.0, lambda x: -x),
            (lambda z: z[:, 0] ** 2 - 1.0, 2.0, lambda x: -0.5 * x ** 2),
        ],
        ids=["linear", "quadratic"],
    )
    def test_polynomial_sources_within_h_squared(self, ou_problem_parts, grid_1d, fn, k, exact_fn):
        A, b, rho = ou_problem_parts
        sol = solve_poisson_grid(PoissonProblem(A, b, source(fn, 1, "psi"), k, rho))
        x = grid_1d.axis_centers()
        exact = exact_fn(x)
        mask = grid_1d.center_radii() <= sol.pin_radius
        exact = exact - exact[mask].mean()
        core = np.abs(x) <= 4.0
        assert np.abs(sol.u.ravel() - exact)[core].max() <= grid_1d.h ** 2

    def test_bounded_source_is_second_order(self, ou_1d):
        """Against the quadrature solution, halving h cuts the core error 4x."""
        A, b = ou_1d
        psi = source(lambda z: np.tanh(z[:, 0]), 1, "tanh")
        errs = {}
        for n in (512, 1024):
            spec = GridSpec(1, 8.0, n)
            rho = solve_exact_1d(ConstantField(1.0, 1), b, spec)
            prob = PoissonProblem(A, b, psi, 1.0, rho)
            core = np.abs(spec.axis_centers()) <= 4.0
            gap = solve_poisson_grid(prob).u.ravel() - solve_poisson_1d(prob).u
            errs[n] = np.abs(gap)[core].max()
        assert 3.0 < errs[512] / errs[1024] < 5.0

    def test_2d_linear_source(self, ou_2d):
        A, b = ou_2d
        spec = GridSpec(2, 8.0, 128)
        rho = solve_grid(A, b, spec)
        sol = solve_poisson(PoissonProblem(A, b, source(lambda z: z[:, 0], 2, "x1"), 1.0, rho))
        pts = spec.cell_centers()
        core = spec.center_radii() <= 4.0
        assert np.abs(sol.u.ravel() + pts[:, 0])[core].max() <= spec.h ** 2
        assert sol.residual_interior <= 1e-9

    def test_wrong_reference_density_is_incompatible(self, ou_1d, grid_1d):
        A, b = ou_1d
        uniform = GridDensity(grid_1d, np.full(grid_1d.n, 1.0 / 16.0))
        prob = PoissonProblem(A, b, source(lambda z: z[:, 0] ** 2, 1, "x2"), 2.0, uniform)
        with pytest.raises(IncompatibilityError, match="disagrees") as exc:
            solve_poisson_grid(prob)
        assert exc.value.projection_magnitude > 1.0


class TestGrowthBounds:
    @pytest.mark.parametrize("k", [1.0, 2.0])
    @pytest.mark.parametrize("case", builtin_poisson_cases(), ids=lambda c: c.name)
    def test_quotients_stable_under_radius_doubling(self, case, k):
        if case.model.dim == 2 and k == 2.0:
            pytest.skip("2d k=2 runs in the acceptance suite")
        n_base = 512 if case.model.dim == 1 else 128
        report = verify_growth_bounds(case.model.A, case.model.b, case.psi, k, n_base=n_base)
        assert report.all_finite
        assert report.max_drift < 0.05
        assert report.radii == (8.0, 16.0)
        assert all(q > 0 for row in report.quotients for q in row)
