"""Kernel classes, Fourier symbols, and ellipticity certificates."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fracops.errors import SingularityError, UnsupportedDensityError
from fracops.kernels import (
    Comparable,
    FractionalLaplacian,
    Stable,
    ellipticity_certificate,
    fourier_symbol,
    fraclap_normalization_integral,
    kernel_density,
    kernel_from_record,
    validate_kernel,
)
from fracops.special import constants


def axis_stable(n, s):
    atoms = []
    for i in range(n):
        for sgn in (1.0, -1.0):
            d = np.zeros(n)
            d[i] = sgn
            atoms.append((tuple(d), 1.0))
    return Stable(n, s, tuple(atoms))


class TestKernelDensity:
    def test_fraclap_value(self):
        k = FractionalLaplacian(1, 0.5)
        assert kernel_density(k, [1.0]) == pytest.approx(1.0 / math.pi, rel=1e-13)

    def test_fraclap_homogeneity(self):
        k = FractionalLaplacian(1, 0.5)
        assert kernel_density(k, [2.0]) == pytest.approx(1.0 / (4 * math.pi), rel=1e-13)

    def test_comparable_scaling(self):
        c = constants(1, 0.5).c_ns
        k = Comparable(1, 0.5, 1.0, 3.0,
                       lambda y: 2.0 * c * float(np.linalg.norm(y)) ** -2.0)
        assert kernel_density(k, [1.0]) == pytest.approx(2.0 / math.pi, rel=1e-13)

    def test_singularity_error(self):
        with pytest.raises(SingularityError):
            kernel_density(FractionalLaplacian(1, 0.5), [0.0])

    def test_stable_unsupported(self):
        with pytest.raises(UnsupportedDensityError):
            kernel_density(axis_stable(2, 0.5), [1.0, 0.0])


class TestFourierSymbol:
    def test_fraclap_exact(self):
        k = FractionalLaplacian(2, 0.3)
        xi = np.array([0.6, -0.8])
        assert fourier_symbol(k, xi) == pytest.approx(1.0, rel=1e-14)
        assert fourier_symbol(k, 3.0 * xi) == pytest.approx(3.0**0.6, rel=1e-14)

    def test_stable_axis(self):
        k = axis_stable(2, 0.5)
        xi = np.array([0.3, -0.7])
        expected = abs(xi[0]) + abs(xi[1])
        assert fourier_symbol(k, xi) == pytest.approx(expected, rel=1e-13)

    def test_zero_frequency(self):
        for k in (FractionalLaplacian(1, 0.5), axis_stable(2, 0.3)):
            assert fourier_symbol(k, np.zeros(k.n)) == 0.0

    @given(st.floats(min_value=0.1, max_value=0.9),
           st.floats(min_value=-3.0, max_value=3.0),
           st.floats(min_value=-3.0, max_value=3.0))
    @settings(max_examples=40, deadline=None)
    def test_symmetry_and_scale_covariance(self, s, x1, x2):
        xi = np.array([x1, x2])
        k = FractionalLaplacian(2, s)
        a1 = fourier_symbol(k, xi)
        assert a1 == fourier_symbol(k, -xi)
        assert fourier_symbol(k, 2.0 * xi) == pytest.approx(2.0 ** (2 * s) * a1, rel=1e-12)
        ks = axis_stable(2, s)
        assert fourier_symbol(ks, xi) == pytest.approx(fourier_symbol(ks, -xi), rel=1e-13)

    def test_comparable_quadrature_vs_direct(self):
        # oracle: direct adaptive quadrature of (1 - cos(xi y)) K(y) in 1D
        c = constants(1, 0.4).c_ns

        def dens(y):
            r = float(np.linalg.norm(y))
            return (1.0 + 0.5 * math.sin(math.log(r))) * c * r ** (-1.8)

        k = Comparable(1, 0.4, 0.5 * c, 1.5 * c, dens)
        for xi in (0.7, 1.0, 3.0):
            val = fourier_symbol(k, [xi])

            ref, _ = integrate.quad(
                lambda y: 2.0 * (1.0 - math.cos(xi * y)) * dens([y]),
                0.0, 200.0, limit=400, points=[1.0 / xi],
            )
            tail, _ = integrate.quad(
                lambda y: dens([y]), 200.0, np.inf, limit=200,
            )
            cos_tail, _ = integrate.quad(
                lambda y: dens([y]), 200.0, np.inf, weight="cos", wvar=xi,
            )
            ref += 2.0 * (tail - cos_tail)
            assert val == pytest.approx(ref, rel=2e-4)


class TestEllipticity:
    def test_fraclap_certificate(self):
        lam, Lam = ellipticity_certificate(FractionalLaplacian(2, 0.5))
        assert lam == pytest.approx(1.0, abs=1e-10)
        assert Lam == pytest.approx(1.0, abs=1e-10)

    def test_stable_axis_certificate(self):
        lam, Lam = ellipticity_certificate(axis_stable(2, 0.5), samples=720)
        assert lam == pytest.approx(1.0, abs=1e-6)
        assert Lam == pytest.approx(math.sqrt(2.0), abs=1e-6)

    def test_comparable_certificate_bounds(self):
        c = constants(1, 0.5).c_ns

        def dens(y):
            r = float(np.linalg.norm(y))
            return (1.0 + 0.5 * math.sin(math.log(r))) * c * r ** (-2.0)

        k = Comparable(1, 0.5, 0.5 * c, 1.5 * c, dens)
        lam, Lam = ellipticity_certificate(k)
        assert 0.5 <= lam <= Lam <= 2.0


class TestNormalization:
    @pytest.mark.parametrize("n,s", [(1, 0.25), (1, 0.5), (1, 0.75), (2, 0.5)])
    def test_identity(self, n, s):
        val = fraclap_normalization_integral(n, s)
        ref = 1.0 / constants(n, s).c_ns
        assert val == pytest.approx(ref, rel=1e-4)


class TestValidationAndRecords:
    def test_from_record_fraclap(self):
        k = kernel_from_record({"variant": "fractional_laplacian", "n": "1", "s": "0.5"})
        assert isinstance(k, FractionalLaplacian)
        assert k.s == 0.5

    def test_from_record_stable(self):
        k = kernel_from_record({
            "variant": "stable", "n": "2", "s": "0.5",
            "atoms": "(1 0 1.0);(-1 0 1.0);(0 1 1.0);(0 -1 1.0)",
        })
        assert isinstance(k, Stable)
        assert fourier_symbol(k, [1.0, 1.0]) == pytest.approx(2.0, rel=1e-12)

    def test_from_record_comparable(self):
        k = kernel_from_record({
            "variant": "comparable", "n": "1", "s": "0.5",
            "density": "logsin",
        })
        assert isinstance(k, Comparable)
        validate_kernel(k)

    def test_stable_requires_antipodal_symmetry(self):
        with pytest.raises(ValueError):
            Stable(2, 0.5, (((1.0, 0.0), 1.0),))

    def test_stable_requires_positive_weights(self):
        with pytest.raises(ValueError):
            Stable(1, 0.5, (((1.0,), -1.0), ((-1.0,), -1.0)))

    def test_validate_rejects_bound_violation(self):
        c = constants(1, 0.5).c_ns
        k = Comparable(1, 0.5, 0.9 * c, 1.1 * c,
                       lambda y: 2.0 * c * float(np.linalg.norm(y)) ** -2.0)
        with pytest.raises(ValueError):
            validate_kernel(k)
