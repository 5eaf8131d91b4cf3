import math

import numpy as np
import pytest

from fpkit import (ClosureField, ConstantField, DiffusionMatrixField, DriftField,
                   ExpressionField, GridField, GrowthParams, MollifierSpec,
                   linear_drift, make_example_field, mollify, polynomial_drift)


def _box_points(dim, radius=4.0, n=41):
    ax = np.linspace(-radius, radius, n)
    if dim == 1:
        return ax[:, None]
    g = np.meshgrid(ax, ax, indexing="ij")
    return np.stack([t.ravel() for t in g], axis=1)


# ---------------------------------------------------------------------------
# scalar fields
# ---------------------------------------------------------------------------


class TestScalarFields:
    def test_constant_field_evaluates_everywhere(self):
        f = ConstantField(5.0, 2)
        vals = f.values(_box_points(2))
        assert (vals == 5.0).all()

    def test_expression_field_matches_closed_form(self):
        f = ExpressionField("tanh(x1) + 0.5*x2**2", 2)
        pts = _box_points(2, 3.0, 17)
        expect = np.tanh(pts[:, 0]) + 0.5 * pts[:, 1] ** 2
        assert np.abs(f.values(pts) - expect).max() < 1e-14

    def test_expression_field_rejects_unknown_names(self):
        with pytest.raises(Exception):
            ExpressionField("__import__('os')", 1).values(np.zeros((1, 1)))

    @pytest.mark.parametrize("name", ["constant", "log-modulus", "weierstrass-holder"])
    def test_builtin_fields_are_finite_on_a_box(self, name):
        f = make_example_field(name)
        vals = f.values(_box_points(1, 6.0, 401))
        assert np.isfinite(vals).all()

    def test_grid_field_interpolates_its_own_samples_exactly(self):
        rng = np.random.default_rng(3)
        n = 64
        samples = rng.uniform(0.5, 2.0, n)
        f = GridField(4.0, samples)
        centers = (-4.0 + (np.arange(n) + 0.5) * 8.0 / n)[:, None]
        assert np.abs(f.values(centers) - samples).max() < 1e-14

    def test_closure_field_wraps_a_callable(self):
        f = ClosureField(lambda p: np.cos(p[:, 0]), 1)
        x = _box_points(1, 2.0, 9)
        assert np.abs(f.values(x) - np.cos(x[:, 0])).max() == 0.0


class TestExampleCatalog:
    def test_constant_example(self):
        f = make_example_field("constant", value=1.0)
        assert f.values(np.array([[0.7]]))[0] == 1.0

    def test_log_modulus_value_at_one_half(self):
        # |ln(1/2)|^(-1/2) = (ln 2)^(-1/2)
        f = make_example_field("log-modulus", gamma=0.5)
        expect = math.log(2.0) ** -0.5
        assert f.values(np.array([[0.5]]))[0] == pytest.approx(expect, rel=1e-12)

    def test_ou_drift_is_minus_x(self):
        b = make_example_field("ou-drift")
        assert b.values(np.array([[2.0]]))[0, 0] == pytest.approx(-2.0)

    def test_polynomial_drift_cubes_its_argument(self):
        b = make_example_field("polynomial-confining-drift", beta=3.0)
        assert b.values(np.array([[2.0]]))[0, 0] == pytest.approx(-8.0)

    def test_weierstrass_field_stays_inside_the_ellipticity_window(self):
        lam = 0.5
        f = make_example_field("weierstrass-holder", alpha=0.3, lam=lam)
        vals = f.values(_box_points(1, 8.0, 4001))
        assert vals.min() >= lam - 1e-12
        assert vals.max() <= 1.0 / lam + 1e-12

    def test_unknown_name_lists_the_catalog(self):
        with pytest.raises(ValueError, match="log-modulus"):
            make_example_field("no-such-field")


# ---------------------------------------------------------------------------
# diffusion matrices
# ---------------------------------------------------------------------------


class TestDiffusionMatrixField:
    def test_entries_share_storage_across_the_diagonal(self):
        mat = np.array([[2.0, 0.5], [0.5, 1.0]])
        A = DiffusionMatrixField.from_constant(mat)
        assert A.entry(0, 1) is A.entry(1, 0)

    def test_values_are_symmetric_matrices(self):
        mat = np.array([[2.0, 0.5], [0.5, 1.0]])
        A = DiffusionMatrixField.from_constant(mat)
        V = A.values(_box_points(2, 2.0, 5))
        assert np.abs(V - np.swapaxes(V, 1, 2)).max() == 0.0

    def test_eigenvalues_live_in_the_declared_window(self):
        f = make_example_field("weierstrass-holder", alpha=0.5, lam=0.7)
        A = DiffusionMatrixField.isotropic(f, 0.7)
        lo, hi = A.eigenvalue_range(_box_points(1, 6.0, 801))
        assert lo >= 0.7 - 1e-9
        assert hi <= 1.0 / 0.7 + 1e-9

    def test_ellipticity_check_rejects_a_degenerate_matrix(self):
        mat = np.array([[1.0, 1.0], [1.0, 1.0]])  # eigenvalues 0 and 2
        with pytest.raises(Exception):
            A = DiffusionMatrixField.from_constant(mat, lam=0.5)
            A.check_ellipticity(_box_points(2, 1.0, 3))

    def test_from_constant_derives_the_tightest_lambda(self):
        A = DiffusionMatrixField.from_constant(np.diag([0.5, 2.0]))
        assert A.lam == pytest.approx(0.5)


# ---------------------------------------------------------------------------
# drifts
# ---------------------------------------------------------------------------


class TestDriftField:
    @pytest.mark.parametrize("dim", [1, 2])
    def test_linear_drift_satisfies_its_growth_envelope(self, dim):
        b = linear_drift(dim, 1.0)
        pts = _box_points(dim, 6.0, 25)
        vals = b.values(pts)
        r = np.linalg.norm(pts, axis=1)
        inner = np.einsum("ni,ni->n", vals, pts)
        g = b.growth
        assert (inner <= g.beta1 - g.beta2 * r**2 + 1e-9).all()
        assert (np.linalg.norm(vals, axis=1) <= g.beta3 * (1 + r) ** g.beta + 1e-9).all()

    def test_cubic_drift_declares_beta_three(self):
        b = polynomial_drift(1, beta=3.0)
        assert b.growth.beta == 3.0
        pts = _box_points(1, 4.0, 101)
        vals = np.abs(b.values(pts)[:, 0])
        r = np.abs(pts[:, 0])
        assert (vals <= b.growth.beta3 * (1 + r) ** 3 + 1e-9).all()

    def test_component_count_must_match_dimension(self):
        with pytest.raises(ValueError):
            DriftField([ConstantField(0.0, 2)], GrowthParams())


# ---------------------------------------------------------------------------
# mollification
# ---------------------------------------------------------------------------


class TestMollify:
    def test_kernel_weights_are_a_probability_rule_on_the_unit_ball(self):
        for dim in (1, 2):
            spec = MollifierSpec.standard_bump(dim)
            assert (spec.weights >= 0).all()
            assert abs(spec.weights.sum() - 1.0) < 1e-12
            assert (np.linalg.norm(spec.points, axis=1) <= 1.0 + 1e-12).all()
            assert spec.quadrature_defect <= 1e-8

    def test_constants_are_fixed_points(self):
        spec = MollifierSpec.standard_bump(1)
        g = mollify(ConstantField(3.0, 1), spec, 0.1)
        assert np.abs(g.values(_box_points(1, 2.0, 9)) - 3.0).max() < 1e-12

    def test_linear_fields_are_fixed_points_of_a_symmetric_kernel(self):
        spec = MollifierSpec.standard_bump(1)
        g = mollify(ExpressionField("x1", 1), spec, 0.25)
        x = _box_points(1, 2.0, 17)
        assert np.abs(g.values(x) - x[:, 0]).max() < 1e-12

    def test_mollified_field_is_tagged_smooth(self):
        spec = MollifierSpec.standard_bump(1)
        f = make_example_field("weierstrass-holder", alpha=0.4)
        assert mollify(f, spec, 0.1).tag.kind == "smooth"

    def test_sup_gap_shrinks_with_the_kernel_scale(self):
        # uniform convergence of mollifications for a continuous field
        spec = MollifierSpec.standard_bump(1)
        f = make_example_field("weierstrass-holder", alpha=0.5)
        x = _box_points(1, 2.0, 301)
        base = f.values(x)
        gaps = [np.abs(mollify(f, spec, e).values(x) - base).max()
                for e in (0.1, 0.01, 0.001)]
        assert gaps[0] > gaps[1] > gaps[2]
