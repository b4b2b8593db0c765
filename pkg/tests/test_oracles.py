"""Closed-form oracle library: values, normalizations, operator
consistency, and heat kernels."""

import math

import numpy as np
import pytest
from scipy import integrate

from fracops.errors import SingularityError
from fracops.evaluate import apply_operator
from fracops.kernels import FractionalLaplacian
from fracops.oracles import (
    FIELD_NAMES,
    ball_torsion,
    fundamental_solution,
    halfspace_harmonic,
    heat_kernel,
    heat_kernel_grid,
    mean_value_weight,
    named_field,
    poisson_ball_total_mass,
    poisson_halfspace_total_mass,
    poisson_kernel_ball,
    poisson_kernel_halfspace,
)
from fracops.special import constants


class TestHalfspaceHarmonic:
    def test_values(self):
        f = halfspace_harmonic(1, 0.5)
        assert f([4.0]) == pytest.approx(2.0)
        assert f([-1.0]) == 0.0

    def test_operator_zero(self):
        f = halfspace_harmonic(1, 0.5)
        val, _ = apply_operator(FractionalLaplacian(1, 0.5), f.field, [0.5])
        assert abs(val) < 1e-3

    def test_known_value_matches(self):
        f = halfspace_harmonic(1, 0.3)
        assert f.known_operator_value(np.array([0.5])) == 0.0
        assert f.validity_region(np.array([0.5]))
        assert not f.validity_region(np.array([-0.5]))


class TestBallTorsion:
    def test_boundary_zero(self):
        f = ball_torsion(1, 0.5)
        assert f([1.0]) == 0.0

    def test_q_values(self):
        assert constants(1, 0.5).q_ns == pytest.approx(1.0, rel=1e-13)
        assert constants(2, 0.5).q_ns == pytest.approx(math.pi / 2.0, rel=1e-13)

    def test_oracle_consistency_5_points(self):
        for n, s in [(1, 0.5), (1, 0.3)]:
            f = ball_torsion(n, s)
            q = constants(n, s).q_ns
            for x in (-0.6, -0.25, 0.0, 0.35, 0.7):
                val, _ = apply_operator(FractionalLaplacian(n, s), f.field, [x])
                assert val == pytest.approx(q, rel=1e-3)


class TestFundamentalSolution:
    def test_kappa_value_n3(self):
        f = fundamental_solution(3, 0.5)
        assert f([1.0, 0.0, 0.0]) == pytest.approx(1.0 / (2 * math.pi**2), rel=1e-12)

    def test_log_case(self):
        f = fundamental_solution(1, 0.5)
        assert f([1.0]) == pytest.approx(0.0, abs=1e-14)
        assert f([0.5]) == pytest.approx(-math.log(0.5) / math.pi, rel=1e-12)

    def test_homogeneity(self):
        f = fundamental_solution(3, 0.5)
        x = np.array([0.3, -0.4, 0.2])
        assert f(2.0 * x) == pytest.approx(2.0 ** (1.0 - 3.0) * f(x), rel=1e-12)

    def test_singularity(self):
        f = fundamental_solution(3, 0.5)
        with pytest.raises(SingularityError):
            f(np.zeros(3))


class TestPoissonKernels:
    def test_ball_value(self):
        # n=1, s=1/2, x=0, z=2: a * 1 * 3^{-1/2} * 2^{-1}
        val = poisson_kernel_ball(1, 0.5, 0.0, 2.0)
        assert val == pytest.approx((1 / math.pi) * 3.0**-0.5 * 0.5, rel=1e-12)

    def test_ball_vanishes_at_boundary(self):
        assert poisson_kernel_ball(1, 0.5, 0.999999, 2.0) < 1e-2

    def test_ball_domain_errors(self):
        with pytest.raises(ValueError):
            poisson_kernel_ball(1, 0.5, 1.5, 2.0)
        with pytest.raises(ValueError):
            poisson_kernel_ball(1, 0.5, 0.0, 0.5)

    def test_ball_mass(self):
        for x in (0.0, 0.5):
            assert poisson_ball_total_mass(1, 0.5, x) == pytest.approx(1.0, abs=1e-4)

    def test_halfspace_value(self):
        val = poisson_kernel_halfspace(1, 1.0, -1.0)
        assert val == pytest.approx(1.0 / (2 * math.pi), rel=1e-12)

    def test_halfspace_mass(self):
        for x in (0.5, 1.0, 2.0):
            assert poisson_halfspace_total_mass(1, x) == pytest.approx(1.0, abs=1e-4)

    def test_halfspace_boundary_limit(self):
        assert poisson_kernel_halfspace(1, 1e-12, -1.0) < 1e-5

    def test_halfspace_domain_error(self):
        with pytest.raises(ValueError):
            poisson_kernel_halfspace(1, -1.0, -2.0)


class TestMeanValueWeight:
    def test_constant_branch(self):
        assert mean_value_weight(0.0, 1, 0.5) == pytest.approx(
            mean_value_weight(1.0, 1, 0.5), rel=1e-12
        )

    def test_total_mass(self):
        for s in (0.3, 0.7):
            total, _ = integrate.quad(
                lambda t: 2.0 * mean_value_weight(t, 1, s), 0.0, np.inf, limit=300
            )
            assert total == pytest.approx(1.0, abs=1e-4)

    def test_monotone_nonincreasing(self):
        ts = np.linspace(0.0, 8.0, 50)
        vals = [mean_value_weight(float(t), 1, 0.4) for t in ts]
        assert all(v1 >= v2 - 1e-12 for v1, v2 in zip(vals, vals[1:]))

    def test_two_sided_bound_shape(self):
        # positive and decaying no faster than t^{-n-2s}
        for t in (2.0, 4.0, 8.0):
            w = mean_value_weight(t, 1, 0.5)
            assert w > 0.0
            assert w < 1.0 / t**2  # upper envelope ~ C t^{-(1+2s)}

    def test_domain_error(self):
        with pytest.raises(ValueError):
            mean_value_weight(-1.0, 1, 0.5)


class TestHeatKernel:
    def test_closed_form_value(self):
        assert heat_kernel(1, 0.5, 1.0, [0.0]) == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_fft_matches_closed_form(self):
        xg, pg = heat_kernel_grid(0.5, 1.0)
        for x in np.linspace(-5, 5, 41):
            num = float(np.interp(x, xg, pg))
            ref = (1.0 / math.pi) / (x * x + 1.0)
            assert abs(num - ref) / ref < 1e-3

    def test_mass_general_s(self):
        for s in (0.3, 0.7):
            xg, pg = heat_kernel_grid(s, 1.0)
            mass = float(np.sum(pg) * (xg[1] - xg[0]))
            assert mass == pytest.approx(1.0, abs=1e-6)

    def test_nonnegative(self):
        xg, pg = heat_kernel_grid(0.3, 1.0)
        assert pg.min() > -1e-12

    def test_semigroup(self):
        s, t, tau = 0.4, 0.7, 0.5
        x1, p1 = heat_kernel_grid(s, t)
        x2, p2 = heat_kernel_grid(s, tau)
        x3, p3 = heat_kernel_grid(s, t + tau)
        dx1 = x1[1] - x1[0]
        for x in (0.0, 0.5, 1.0, 2.0, 3.0):
            conv = float(np.sum(p1 * np.interp(x - x1, x2, p2)) * dx1)
            ref = float(np.interp(x, x3, p3))
            assert abs(conv - ref) / ref < 1e-3

    def test_time_domain_error(self):
        with pytest.raises(ValueError):
            heat_kernel(1, 0.5, 0.0, [0.0])


class TestNamedFields:
    def test_registry_complete(self):
        for name in FIELD_NAMES:
            f = named_field(name, 1, 0.5)
            assert np.isfinite(f([0.5]))

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            named_field("nope", 1, 0.5)
