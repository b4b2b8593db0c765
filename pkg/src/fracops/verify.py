"""Self-verification suite: fast, named consistency checks against the
closed-form identities the library is built on.  Driven by the `verify`
CLI command; every check reports its measured error and threshold."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import discrete, evaluate, kernels, oracles, special, wos
from .errors import AccuracyWarning


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""


def _check_constants() -> CheckResult:
    worst = 0.0
    for n in (1, 2, 3):
        c = special.constants(n, 0.5).c_ns
        ref = math.exp(special.log_gamma((n + 1) / 2.0)) * math.pi ** (-(n + 1) / 2.0)
        worst = max(worst, abs(c - ref) / ref)
    return CheckResult("constants_half_s_crosscheck", worst < 1e-12, worst, 1e-12)


def _check_beta_roundtrip() -> CheckResult:
    a, b = 0.5, 0.5
    xs = np.linspace(0.01, 0.99, 25)
    worst = max(
        abs(special.beta_inverse(a, b, special.beta_inc_reg(a, b, x)) - x) for x in xs
    )
    return CheckResult("beta_inverse_roundtrip", worst < 1e-10, worst, 1e-10)


def _check_symbol_normalization() -> CheckResult:
    val = kernels.fraclap_normalization_integral(1, 0.5)
    ref = 1.0 / special.constants(1, 0.5).c_ns
    err = abs(val - ref) / ref
    return CheckResult("symbol_normalization_1d", err < 1e-4, err, 1e-4)


def _check_torsion() -> CheckResult:
    field = oracles.ball_torsion(1, 0.5)
    val, _ = evaluate.apply_operator(kernels.FractionalLaplacian(1, 0.5), field.field, [0.0])
    err = abs(val - 1.0)
    return CheckResult("torsion_identity_s_half", err < 1e-3, err, 1e-3)


def _check_halfspace() -> CheckResult:
    field = oracles.halfspace_harmonic(1, 0.5)
    val, _ = evaluate.apply_operator(kernels.FractionalLaplacian(1, 0.5), field.field, [0.5])
    q = special.constants(1, 0.5).q_ns
    err = abs(val) / q
    return CheckResult("halfspace_harmonicity", err < 1e-3, err, 1e-3)


def _check_poisson_mass() -> CheckResult:
    worst = max(
        abs(oracles.poisson_ball_total_mass(1, 0.5, x) - 1.0) for x in (0.0, 0.5)
    )
    return CheckResult("poisson_ball_mass", worst < 1e-4, worst, 1e-4)


def _check_meanvalue_mass() -> CheckResult:
    from scipy import integrate

    worst = 0.0
    for s in (0.3, 0.7):
        total, _ = integrate.quad(
            lambda t: oracles.mean_value_weight(t, 1, s) * 2.0, 0.0, np.inf, limit=300
        )
        worst = max(worst, abs(total - 1.0))
    return CheckResult("mean_value_weight_mass", worst < 1e-4, worst, 1e-4)


def _check_exit_law() -> CheckResult:
    from ._backend import core

    m = 20_000
    rho = core.exit_radius_factors(12345, np.arange(m, dtype=np.uint64), np.zeros(m, dtype=np.uint64), 0.5)
    p_hat = float(np.mean(rho > 2.0))
    sigma = math.sqrt((1.0 / 3.0) * (2.0 / 3.0) / m)
    err = abs(p_hat - 1.0 / 3.0)
    return CheckResult("exit_law_tail_point", err < 3.0 * sigma, err, 3.0 * sigma)


def _check_wos_constant() -> CheckResult:
    dom = wos.ball([0.0], 1.0)
    g = wos.ExteriorData(lambda pts: np.full(len(pts), 0.75))
    est = wos.wos_solve(dom, g, [0.0], 0.5, wos.WosConfig(n_samples=2000, master_seed=3))
    err = abs(est.mean - 0.75) + est.stderr
    return CheckResult("wos_constant_data", err < 1e-12, err, 1e-12)


def _check_wos_halfspace() -> CheckResult:
    dom = wos.ball([0.0], 1.0)
    field = oracles.named_field("shifted_halfspace", 1, 0.5)
    g = wos.ExteriorData(lambda pts: field(pts), decay_exponent=0.5)
    est = wos.wos_solve(dom, g, [0.0], 0.5, wos.WosConfig(n_samples=20_000, master_seed=11))
    err = abs(est.mean - 1.0)
    thr = 4.0 * est.stderr
    return CheckResult("wos_halfspace_harmonic", err < thr, err, thr,
                       detail=f"stderr={est.stderr:.2e}")


def _check_fd_rowsum() -> CheckResult:
    grid = discrete.Grid1D(-1.0, 1.0, 128)
    op = discrete.assemble_operator(0.5, grid)
    ones = np.ones(grid.N)
    g = lambda z: np.ones_like(np.asarray(z, dtype=float))
    resid = float(np.max(np.abs(op.matrix @ ones + op.exterior_load(g))))
    return CheckResult("fd_constant_row_sum", resid < 1e-10, resid, 1e-10)


def _check_fd_torsion() -> CheckResult:
    grid = discrete.Grid1D(-1.0, 1.0, 256)
    op = discrete.assemble_operator(0.5, grid)
    sol = discrete.solve_dirichlet(op, lambda x: np.ones_like(x), None)
    exact = np.clip(1.0 - grid.nodes ** 2, 0.0, None) ** 0.5
    mask = np.abs(grid.nodes) <= 0.5
    err = float(np.max(np.abs(sol.values - exact)[mask]))
    return CheckResult("fd_torsion_interior_error", err < 2e-2, err, 2e-2)


def _check_obstacle() -> CheckResult:
    grid = discrete.Grid1D(-1.0, 1.0, 512)
    op = discrete.assemble_operator(0.5, grid)
    phi = 0.5 - grid.nodes ** 2
    sol = discrete.solve_obstacle(op, phi, None, tol=1e-9)
    viol = float(np.max(phi - sol.solution.values))
    ok = sol.residual < 1e-8 and viol <= 1e-12 and sol.contact.any()
    return CheckResult("obstacle_complementarity", ok, sol.residual, 1e-8,
                       detail=f"contact nodes={int(sol.contact.sum())}")


def _check_heat_kernel() -> CheckResult:
    xs = np.linspace(-5.0, 5.0, 41)
    worst = 0.0
    for x in xs:
        num = oracles.heat_kernel_grid(0.5, 1.0)
        p_num = float(np.interp(x, num[0], num[1]))
        p_ref = (1.0 / math.pi) / (x * x + 1.0)
        worst = max(worst, abs(p_num - p_ref) / p_ref)
    return CheckResult("heat_kernel_closed_form", worst < 1e-3, worst, 1e-3)


def _check_extremal_collapse() -> CheckResult:
    field = oracles.named_field("gaussian", 1, 0.5)
    x = [0.3]
    lu, err1 = evaluate.apply_operator(kernels.FractionalLaplacian(1, 0.5), field, x)
    mp, err2 = evaluate.apply_extremal(1.0, 1.0, "plus", 0.5, field, x)
    c = special.constants(1, 0.5).c_ns
    err = abs(mp + lu / c)
    thr = max((err1 / c + err2) * 10.0, 1e-6)
    return CheckResult("extremal_collapse_lam_eq_Lam", err < thr, err, thr)


_CHECKS: List[Callable[[], CheckResult]] = [
    _check_constants,
    _check_beta_roundtrip,
    _check_symbol_normalization,
    _check_torsion,
    _check_halfspace,
    _check_poisson_mass,
    _check_meanvalue_mass,
    _check_exit_law,
    _check_wos_constant,
    _check_wos_halfspace,
    _check_fd_rowsum,
    _check_fd_torsion,
    _check_obstacle,
    _check_heat_kernel,
    _check_extremal_collapse,
]


def run_all() -> List[CheckResult]:
    """Run every named check, never raising: failures are reported."""
    results = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        warnings.simplefilter("ignore", UserWarning)
        for check in _CHECKS:
            try:
                results.append(check())
            except Exception as exc:  # pragma: no cover - defensive
                results.append(
                    CheckResult(check.__name__.lstrip("_"), False, math.nan, math.nan,
                                detail=f"raised {type(exc).__name__}: {exc}")
                )
    return results
