"""Pointwise operator evaluation: identities, extremal operators,
mean-value integral, and structural invariants."""

import math

import numpy as np
import pytest
from scipy import integrate

from fracops.errors import NonIntegrableTailError, UnsupportedDensityError
from fracops.evaluate import (
    QuadConfig,
    ScalarField,
    apply_extremal,
    apply_operator,
    mean_value,
)
from fracops.kernels import Comparable, FractionalLaplacian, Stable
from fracops.oracles import (
    ball_torsion,
    halfspace_harmonic,
    named_field,
    poisson_kernel_ball,
)
from fracops.special import constants


def random_bump_field(rng, n=1):
    """Smooth compactly supported random field: sum of C^inf bumps."""
    k = rng.integers(2, 5)
    centers = rng.uniform(-1.5, 1.5, size=(k, n))
    amps = rng.uniform(-1.0, 1.0, size=k)
    widths = rng.uniform(0.3, 0.8, size=k)

    def func(pts):
        pts = np.atleast_2d(pts)
        out = np.zeros(len(pts))
        for c, a, w in zip(centers, amps, widths):
            d2 = np.sum((pts - c) ** 2, axis=-1) / w**2
            mask = d2 < 1.0
            vals = np.zeros(len(pts))
            vals[mask] = a * np.exp(-1.0 / (1.0 - d2[mask]))
            out += vals
        return out

    c2 = float(np.max(np.abs(amps) / widths**2)) * 20.0
    return ScalarField(
        n=n, func=func, decay_exponent=0.0, c2_const=c2,
        c2_radius=lambda x: 1.0, support_radius=3.0,
    )


class TestApplyOperator:
    def test_torsion_identity(self):
        for s in (0.3, 0.5, 0.7):
            q = constants(1, s).q_ns
            u = ball_torsion(1, s).field
            for x in (0.0, 0.3, 0.6):
                val, err = apply_operator(FractionalLaplacian(1, s), u, [x])
                assert abs(val - q) / q < 1e-3
                assert abs(val - q) <= max(err * 5.0, 1e-8)

    def test_constant_is_zero(self):
        u = named_field("constant", 1, 0.5)
        val, err = apply_operator(FractionalLaplacian(1, 0.5), u, [0.2])
        assert abs(val) < 1e-8

    def test_halfspace_harmonic(self):
        q = constants(1, 0.5).q_ns
        u = named_field("shifted_halfspace", 1, 0.5)
        for x in (-0.5, 0.0, 0.5):
            val, _ = apply_operator(FractionalLaplacian(1, 0.5), u, [x])
            assert abs(val) < 1e-3 * q

    def test_torsion_2d(self):
        u = ball_torsion(2, 0.5).field
        val, err = apply_operator(FractionalLaplacian(2, 0.5), u, [0.0, 0.0])
        assert val == pytest.approx(math.pi / 2.0, rel=1e-4)

    def test_stable_kernel_rejected(self):
        st = Stable(1, 0.5, (((1.0,), 1.0), ((-1.0,), 1.0)))
        with pytest.raises(UnsupportedDensityError):
            apply_operator(st, named_field("gaussian", 1, 0.5), [0.0])

    def test_tail_growth_rejected(self):
        u = ScalarField(n=1, func=lambda p: np.sum(p**2, axis=-1),
                        decay_exponent=2.0, c2_radius=lambda x: 1.0)
        with pytest.raises(NonIntegrableTailError):
            apply_operator(FractionalLaplacian(1, 0.5), u, [0.0])

    def test_linearity(self):
        rng = np.random.default_rng(5)
        k = FractionalLaplacian(1, 0.6)
        for _ in range(5):
            u = random_bump_field(rng)
            v = random_bump_field(rng)
            a, b = rng.uniform(-2, 2, size=2)
            w = ScalarField(
                n=1,
                func=lambda p, u=u, v=v, a=a, b=b: a * u.func(p) + b * v.func(p),
                c2_const=abs(a) * u.c2_const + abs(b) * v.c2_const,
                c2_radius=lambda x: 1.0,
                support_radius=3.0,
            )
            lw, ew = apply_operator(k, w, [0.1])
            lu, eu = apply_operator(k, u, [0.1])
            lv, ev = apply_operator(k, v, [0.1])
            tol = ew + abs(a) * eu + abs(b) * ev + 1e-10
            assert abs(lw - (a * lu + b * lv)) < max(tol * 10.0, 1e-8)

    def test_translation_invariance(self):
        rng = np.random.default_rng(7)
        u = random_bump_field(rng)
        h = 0.37
        ush = ScalarField(
            n=1, func=lambda p: u.func(p + h), c2_const=u.c2_const,
            c2_radius=lambda x: 1.0, support_radius=4.0,
        )
        k = FractionalLaplacian(1, 0.5)
        v1, e1 = apply_operator(k, u, [0.2])
        v2, e2 = apply_operator(k, ush, [0.2 - h])
        assert v1 == pytest.approx(v2, abs=max(10 * (e1 + e2), 1e-8))

    def test_scale_covariance(self):
        rng = np.random.default_rng(9)
        u = random_bump_field(rng)
        t = 1.7
        s = 0.4
        ut = ScalarField(
            n=1, func=lambda p: u.func(t * p), c2_const=u.c2_const * t**2,
            c2_radius=lambda x: 1.0, support_radius=3.0,
        )
        k = FractionalLaplacian(1, s)
        v1, e1 = apply_operator(k, ut, [0.2])
        v2, e2 = apply_operator(k, u, [t * 0.2])
        assert v1 == pytest.approx(t ** (2 * s) * v2, abs=max(10 * (e1 + e2), 1e-7))

    def test_barrier_sign(self):
        # (x+1)^{s+eps} is a subsolution: L u < 0 left of the far boundary
        s = 0.5
        eps = 0.1 * s
        u = ScalarField(
            n=1,
            func=lambda p: np.clip(p[:, 0] + 1.0, 0.0, None) ** (s + eps),
            decay_exponent=s + eps,
            c2_radius=lambda x: abs(float(x[0]) + 1.0),
            kink_radii_fn=lambda x: np.array([abs(float(x[0]) + 1.0)]),
        )
        for x in (-0.5, 0.0, 0.9):
            val, err = apply_operator(FractionalLaplacian(1, s), u, [x])
            assert val < 0.0
            assert abs(val) > 3.0 * err

    def test_comparable_kernel_evaluation(self):
        # density equal to 2 c |y|^{-1-2s}: operator doubles exactly
        s = 0.5
        c = constants(1, s).c_ns
        k = Comparable(1, s, 2 * c, 2 * c,
                       lambda y: 2.0 * c * float(np.linalg.norm(y)) ** -2.0)
        u = named_field("gaussian", 1, s)
        v1, e1 = apply_operator(FractionalLaplacian(1, s), u, [0.3])
        v2, e2 = apply_operator(k, u, [0.3])
        assert v2 == pytest.approx(2.0 * v1, rel=1e-5)


class TestExtremal:
    def test_zero_field(self):
        u = ScalarField(n=1, func=lambda p: np.zeros(len(p)),
                        c2_radius=lambda x: 1.0, support_radius=1.0)
        val, _ = apply_extremal(1.0, 2.0, "plus", 0.5, u, [0.0])
        assert val == pytest.approx(0.0, abs=1e-12)

    def test_minus_of_negation(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            u = random_bump_field(rng)
            neg = ScalarField(n=1, func=lambda p, u=u: -u.func(p),
                              c2_const=u.c2_const, c2_radius=lambda x: 1.0,
                              support_radius=3.0)
            x = [float(rng.uniform(-0.5, 0.5))]
            p1, e1 = apply_extremal(1.0, 2.5, "plus", 0.5, neg, x)
            m1, e2 = apply_extremal(1.0, 2.5, "minus", 0.5, u, x)
            assert p1 == pytest.approx(-m1, abs=max(10 * (e1 + e2), 1e-8))

    def test_ordering(self):
        rng = np.random.default_rng(13)
        s = 0.5
        c = constants(1, s).c_ns
        lam, Lam = 0.8 * c, 1.3 * c
        k = Comparable(1, s, lam, Lam,
                       lambda y: 1.1 * c * float(np.linalg.norm(y)) ** -2.0)
        for _ in range(5):
            u = random_bump_field(rng)
            x = [float(rng.uniform(-0.5, 0.5))]
            lu, el = apply_operator(k, u, x)
            mp, ep = apply_extremal(lam, Lam, "plus", s, u, x)
            mm, em = apply_extremal(lam, Lam, "minus", s, u, x)
            slack = 10 * (el + ep + em) + 1e-8
            assert mm <= -lu + slack
            assert -lu <= mp + slack

    def test_collapse_lam_eq_Lam(self):
        u = ball_torsion(1, 0.5).field
        c = constants(1, 0.5).c_ns
        mp, _ = apply_extremal(1.0, 1.0, "plus", 0.5, u, [0.0])
        # d2bar <= 0 everywhere for the concave-type torsion profile
        assert mp == pytest.approx(-1.0 / c, rel=1e-6)


class TestMeanValue:
    def test_constant(self):
        u = named_field("constant", 1, 0.5)
        assert mean_value(u, 1.0, 1, 0.5) == pytest.approx(1.0, abs=1e-4)

    def test_harmonic_field(self):
        u = named_field("shifted_halfspace", 1, 0.5)
        assert mean_value(u, 0.5, 1, 0.5) == pytest.approx(1.0, abs=1e-3)

    def test_indicator_shell_vs_poisson(self):
        u = named_field("indicator_shell", 1, 0.5)
        val = mean_value(u, 1.0, 1, 0.5)
        ref, _ = integrate.quad(
            lambda z: poisson_kernel_ball(1, 0.5, 0.0, z), 2.0, 3.0, limit=200,
        )
        assert val == pytest.approx(2.0 * ref, rel=1e-6)

    def test_nonintegrable_rejected(self):
        u = ScalarField(n=1, func=lambda p: np.abs(p[:, 0]) ** 1.5,
                        decay_exponent=1.5, c2_radius=lambda x: 1.0)
        with pytest.raises(NonIntegrableTailError):
            mean_value(u, 1.0, 1, 0.5)


class TestQuadConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            QuadConfig(target_rel_err=0.5)
        with pytest.raises(ValueError):
            QuadConfig(angular_order=0)
