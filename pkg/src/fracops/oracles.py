"""Closed-form reference objects: explicit s-harmonic functions, the ball
torsion function, fundamental solutions, Poisson kernels, the mean-value
weight, and heat kernels.

Each oracle carries its exact operator value on a validity region, so the
pointwise evaluator can be cross-checked against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import SingularityError
from .evaluate import ScalarField
from .special import beta_inc_reg, constants, log_gamma

__all__ = [
    "OracleField",
    "halfspace_harmonic",
    "ball_torsion",
    "fundamental_solution",
    "poisson_kernel_ball",
    "poisson_ball_total_mass",
    "poisson_kernel_halfspace",
    "poisson_halfspace_total_mass",
    "mean_value_weight",
    "heat_kernel",
    "heat_kernel_grid",
    "named_field",
    "FIELD_NAMES",
]


@dataclass
class OracleField:
    """A ScalarField with a known exact operator value on a region."""

    field: ScalarField
    known_operator_value: Callable[[np.ndarray], float]
    validity_region: Callable[[np.ndarray], bool]

    def __call__(self, pts):
        return self.field(pts)


def halfspace_harmonic(n: int, s: float, e=None) -> OracleField:
    """u(x) = (x.e)_+^s, s-harmonic on the half-space {x.e > 0}."""
    constants(n, s)
    if e is None:
        e = np.zeros(n)
        e[0] = 1.0
    e = np.asarray(e, dtype=float)
    if abs(np.linalg.norm(e) - 1.0) > 1e-12:
        raise ValueError("direction e must be a unit vector")

    def func(pts):
        return np.clip(pts @ e, 0.0, None) ** s

    field = ScalarField(
        n=n,
        func=func,
        decay_exponent=s,
        decay_const=1.0,
        c2_const=max(s * abs(1.0 - s), 0.25),
        c2_radius=lambda x: abs(float(x @ e)),
        kink_radii_fn=lambda x: np.array([abs(float(x @ e))]),
    )
    return OracleField(
        field=field,
        known_operator_value=lambda x: 0.0,
        validity_region=lambda x: float(np.atleast_1d(x) @ e) > 0.0,
    )


def ball_torsion(n: int, s: float) -> OracleField:
    """u(x) = (1-|x|^2)_+^s with (-Delta)^s u = q_{n,s} in B_1."""
    q = constants(n, s).q_ns

    def func(pts):
        return np.clip(1.0 - np.sum(pts * pts, axis=-1), 0.0, None) ** s

    field = ScalarField(
        n=n,
        func=func,
        decay_exponent=0.0,
        c2_const=8.0,
        c2_radius=lambda x: max(1.0 - float(np.linalg.norm(x)), 1e-12),
        kink_radii_fn=lambda x: np.array(
            [1.0 - np.linalg.norm(x), 1.0 + np.linalg.norm(x)]
        ),
        support_radius=1.0,
    )
    return OracleField(
        field=field,
        known_operator_value=lambda x: q,
        validity_region=lambda x: float(np.linalg.norm(x)) < 1.0,
    )


def fundamental_solution(n: int, s: float) -> OracleField:
    """Fundamental solution of (-Delta)^s: kappa |x|^{2s-n}, or the log
    form -(1/pi) log|x| in the boundary case n = 1, s = 1/2."""
    cst = constants(n, s)
    log_case = cst.kappa_ns is None
    if log_case and not (n == 1 and abs(s - 0.5) < 1e-14):
        raise ValueError("power-form fundamental solution needs n > 2s")

    def func(pts):
        r = np.linalg.norm(np.atleast_2d(pts), axis=-1)
        if np.any(r == 0.0):
            raise SingularityError("fundamental solution is singular at the origin")
        if log_case:
            return -np.log(r) / math.pi
        return cst.kappa_ns * r ** (2.0 * s - n)

    field = ScalarField(
        n=n,
        func=func,
        decay_exponent=0.05 if log_case else 0.0,
        c2_const=50.0,
        c2_radius=lambda x: 0.5 * float(np.linalg.norm(x)),
        kink_radii_fn=lambda x: np.array([float(np.linalg.norm(x))]),
    )
    return OracleField(
        field=field,
        known_operator_value=lambda x: 0.0,
        validity_region=lambda x: float(np.linalg.norm(x)) > 0.0,
    )


def poisson_kernel_ball(n: int, s: float, x, z) -> float:
    """Poisson kernel of the unit ball for (-Delta)^s at interior x,
    exterior z."""
    a = constants(n, s).a_ns
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    rx, rz = np.linalg.norm(x), np.linalg.norm(z)
    if rx >= 1.0:
        raise ValueError(f"x must be interior to the unit ball, |x|={rx}")
    if rz <= 1.0:
        raise ValueError(f"z must be exterior to the unit ball, |z|={rz}")
    return float(
        a * (1.0 - rx * rx) ** s * (rz * rz - 1.0) ** (-s) * np.linalg.norm(x - z) ** (-n)
    )


def poisson_ball_total_mass(n: int, s: float, x) -> float:
    """Numerical integral of the ball Poisson kernel over |z| > 1 (n = 1)."""
    if n != 1:
        raise ValueError("total-mass quadrature implemented for n = 1")
    x = float(np.atleast_1d(x)[0])

    def one_side(sign: float) -> float:
        # z = sign (1 + w^2) removes the (z^2-1)^{-s} endpoint singularity
        def integrand(w):
            z = sign * (1.0 + w * w)
            return poisson_kernel_ball(1, s, [x], [z]) * 2.0 * w

        val, _ = integrate.quad(integrand, 0.0, np.inf, limit=300)
        return val

    return one_side(1.0) + one_side(-1.0)


def poisson_kernel_halfspace(n: int, x, z, e=None) -> float:
    """Poisson kernel of the half-space {x.e > 0} for sqrt(-Delta)
    (order s = 1/2 only, as stated for that operator)."""
    if e is None:
        e = np.zeros(n)
        e[0] = 1.0
    e = np.asarray(e, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    xe, ze = float(x @ e), float(z @ e)
    if xe <= 0.0:
        raise ValueError("x must satisfy x.e > 0")
    if ze > 0.0:
        raise ValueError("z must satisfy z.e <= 0")
    a_n = math.exp(log_gamma(n / 2.0)) * math.pi ** (-n / 2.0 - 1.0)
    return float(a_n * math.sqrt(xe) / (math.sqrt(abs(ze)) * np.linalg.norm(x - z) ** n))


def poisson_halfspace_total_mass(n: int, x, e=None) -> float:
    """Numerical integral of the half-space Poisson kernel over {z.e <= 0}
    (n = 1)."""
    if n != 1:
        raise ValueError("total-mass quadrature implemented for n = 1")
    x = float(np.atleast_1d(x)[0])

    def integrand(w):
        z = -w * w  # removes the 1/sqrt(|z|) endpoint singularity
        return poisson_kernel_halfspace(1, [x], [z]) * 2.0 * w

    val, _ = integrate.quad(integrand, 0.0, np.inf, limit=300)
    return val


def mean_value_weight(t: float, n: int, s: float) -> float:
    """Radial mean-value weight w_s(t) for the unit ball.

    Computed through the regularized incomplete beta after the substitution
    u = rho^2, which removes the (1-rho^2)^{-s} endpoint singularity.
    """
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    cst = constants(n, s)
    alpha = (n + 2.0 * s) / 2.0
    beta = 1.0 - s
    full_beta = math.exp(log_gamma(alpha) + log_gamma(beta) - log_gamma(alpha + beta))
    cut = 1.0 if t <= 1.0 else 1.0 / (t * t)
    return 0.5 * cst.a_ns * full_beta * beta_inc_reg(alpha, beta, cut)


@lru_cache(maxsize=8)
def heat_kernel_grid(s: float, t: float, alias_target: float = 1e-7):
    """FFT inversion of exp(-t |xi|^{2s}) on a uniform 1D grid.

    Grid extent is chosen so the heavy-tail aliasing at the window edge is
    below alias_target; frequency extent so the truncated symbol mass is
    below 1e-12.  Returns (x, p) arrays.
    """
    if t <= 0.0:
        raise ValueError("time t must be positive")
    xi_max = (12.0 * math.log(10.0) / t) ** (1.0 / (2.0 * s)) * 1.1
    dx = min(0.02, math.pi / xi_max)
    half_len = (2.0 * max(t, 1.0) / alias_target) ** (1.0 / (1.0 + 2.0 * s))
    half_len = max(half_len, 50.0)
    npts = 1 << int(math.ceil(math.log2(2.0 * half_len / dx)))
    npts = min(npts, 1 << 24)
    xi = 2.0 * math.pi * np.fft.fftfreq(npts, d=dx)
    phat = np.exp(-t * np.abs(xi) ** (2.0 * s))
    p = np.fft.fftshift(np.fft.ifft(phat)).real / dx
    x = (np.arange(npts) - npts // 2) * dx
    return x, p


def heat_kernel(n: int, s: float, t: float, x) -> float:
    """Heat kernel p(t, x) of (-Delta)^s.

    Closed form for s = 1/2 in any dimension; numerical Fourier inversion
    for general s (restricted to n = 1).
    """
    if t <= 0.0:
        raise ValueError("time t must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    r = float(np.linalg.norm(x))
    if abs(s - 0.5) < 1e-14:
        c_n = math.exp(log_gamma((n + 1) / 2.0)) * math.pi ** (-(n + 1) / 2.0)
        return c_n * t / (r * r + t * t) ** ((n + 1) / 2.0)
    if n != 1:
        raise ValueError("general-s heat kernel implemented for n = 1 only")
    xs, ps = heat_kernel_grid(s, t)
    return float(np.interp(r, xs, ps))


def _indicator_shell(pts):
    r = np.linalg.norm(np.atleast_2d(pts), axis=-1)
    return ((r > 2.0) & (r < 3.0)).astype(float)


def named_field(name: str, n: int, s: float) -> ScalarField:
    """Registry of fields usable from the CLI and the exterior-data tests."""
    if name == "halfspace":
        return halfspace_harmonic(n, s).field
    if name == "shifted_halfspace":
        e = np.zeros(n)
        e[0] = 1.0

        def func(pts):
            return np.clip(np.atleast_2d(pts) @ e + 1.0, 0.0, None) ** s

        return ScalarField(
            n=n,
            func=func,
            decay_exponent=s,
            c2_radius=lambda x: abs(float(x @ e) + 1.0),
            kink_radii_fn=lambda x: np.array([abs(float(x @ e) + 1.0)]),
        )
    if name == "ball_torsion":
        return ball_torsion(n, s).field
    if name == "fundamental":
        return fundamental_solution(n, s).field
    if name == "constant":
        return ScalarField(
            n=n,
            func=lambda pts: np.ones(len(np.atleast_2d(pts))),
            decay_exponent=0.0,
            c2_radius=lambda x: 1.0,
        )
    if name == "indicator_shell":
        return ScalarField(
            n=n,
            func=_indicator_shell,
            decay_exponent=0.0,
            c2_radius=lambda x: max(2.0 - float(np.linalg.norm(x)), 1e-12),
            kink_radii_fn=lambda x: np.array(
                [
                    abs(2.0 - np.linalg.norm(x)),
                    2.0 + np.linalg.norm(x),
                    abs(3.0 - np.linalg.norm(x)),
                    3.0 + np.linalg.norm(x),
                ]
            ),
            support_radius=3.0,
        )
    if name == "gaussian":
        return ScalarField(
            n=n,
            func=lambda pts: np.exp(-np.sum(np.atleast_2d(pts) ** 2, axis=-1)),
            decay_exponent=0.0,
            c2_const=4.0,
            c2_radius=lambda x: 1.0,
        )
    raise ValueError(f"unknown field {name!r}; known: {sorted(FIELD_NAMES)}")


FIELD_NAMES = {
    "halfspace",
    "shifted_halfspace",
    "ball_torsion",
    "fundamental",
    "constant",
    "indicator_shell",
    "gaussian",
}
