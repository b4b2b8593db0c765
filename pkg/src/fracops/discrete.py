"""Finite-difference discretization of the 1D fractional Laplacian on an
interval, with Dirichlet and obstacle solvers.

The scheme applies the operator exactly to a piecewise profile built from
the nodal values: piecewise linear on every grid cell except the two cells
adjacent to the evaluation node, where a quadratic profile (y/h)^2 is used
so that the singular integral over [0, h] stays finite for all s (a linear
kink at the node would make it diverge for s >= 1/2).  Cell integrals of
y^{-1-2s} and y * y^{-1-2s} have closed forms, so the stiffness matrix is
an exact symmetric Toeplitz-plus-diagonal M-matrix.  Outside the last
interior cell on each side the profile is the exterior datum g, handled by
an analytic tail for the diagonal and adaptive quadrature for g.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.linalg import cho_factor, cho_solve, toeplitz

from ._backend import core
from .errors import NonConvergenceError
from .special import constants

__all__ = [
    "Grid1D",
    "GridFunction1D",
    "DiscreteOperator",
    "ObstacleSolution",
    "assemble_operator",
    "solve_dirichlet",
    "energy",
    "solve_obstacle",
    "free_boundary_point",
    "GrowthFit",
    "fit_growth_exponent",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on (a, b) with N interior nodes and spacing h."""

    a: float
    b: float
    N: int

    def __post_init__(self):
        if self.b <= self.a:
            raise ValueError("grid needs a < b")
        if self.N < 2:
            raise ValueError("grid needs at least 2 interior nodes")

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.N + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(1, self.N + 1)


@dataclass
class GridFunction1D:
    """Interior nodal values plus the exterior datum they extend to.

    exterior is a vectorized callable defined for |points| outside (a, b);
    None means g identically zero.
    """

    grid: Grid1D
    values: np.ndarray
    exterior: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.N,):
            raise ValueError("values must have shape (N,)")

    def exterior_at(self, z):
        z = np.asarray(z, dtype=float)
        if self.exterior is None:
            return np.zeros_like(z)
        return np.asarray(self.exterior(z), dtype=float)

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "value"])
            for x, v in zip(self.grid.nodes, self.values):
                w.writerow([f"{x:.17g}", f"{v:.17g}"])

    def to_json(self, path: str, **metadata) -> None:
        payload = {
            "grid": {"a": self.grid.a, "b": self.grid.b, "N": self.grid.N},
            "x": self.grid.nodes.tolist(),
            "values": self.values.tolist(),
        }
        payload.update(metadata)
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)

    @classmethod
    def from_csv(cls, path: str) -> "GridFunction1D":
        xs, vs = [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                xs.append(float(row["x"]))
                vs.append(float(row["value"]))
        xs = np.asarray(xs)
        vs = np.asarray(vs)
        N = len(xs)
        h = xs[1] - xs[0]
        grid = Grid1D(a=xs[0] - h, b=xs[-1] + h, N=N)
        if not np.allclose(grid.nodes, xs, rtol=0, atol=1e-9 * max(1.0, abs(h))):
            raise ValueError("csv nodes are not a uniform interior grid")
        return cls(grid=grid, values=vs)


@dataclass
class DiscreteOperator:
    """Dense stiffness matrix A with (L_h u)_i = (A u)_i + load(g)_i."""

    grid: Grid1D
    s: float
    matrix: np.ndarray
    c_ns: float
    _bc_coef: np.ndarray = field(repr=False, default=None)  # (N, 2): g(a), g(b) weights
    _cho: tuple = field(repr=False, default=None)

    def exterior_load(self, g: Optional[Callable[[np.ndarray], np.ndarray]]) -> np.ndarray:
        """Contribution of the exterior datum g to L_h u at each node.

        Covers both the boundary-cell couplings to g(a), g(b) and the
        integrals of g over (-inf, a] and [b, inf).
        """
        N, h = self.grid.N, self.grid.h
        a, b = self.grid.a, self.grid.b
        if g is None:
            return np.zeros(N)
        ga = float(np.asarray(g(np.array([a]))).ravel()[0])
        gb = float(np.asarray(g(np.array([b]))).ravel()[0])
        load = -self.c_ns * (self._bc_coef[:, 0] * ga + self._bc_coef[:, 1] * gb)
        nodes = self.grid.nodes
        ex = 1.0 + 2.0 * self.s
        for i, xi in enumerate(nodes):
            y_right = b - xi
            val_r, _ = integrate.quad(
                lambda y: float(np.asarray(g(np.array([xi + y]))).ravel()[0]) * y ** (-ex),
                y_right, np.inf, limit=200,
            )
            y_left = xi - a
            val_l, _ = integrate.quad(
                lambda y: float(np.asarray(g(np.array([xi - y]))).ravel()[0]) * y ** (-ex),
                y_left, np.inf, limit=200,
            )
            load[i] -= self.c_ns * (val_r + val_l)
        return load

    def apply(self, u: GridFunction1D) -> np.ndarray:
        return self.matrix @ u.values + self.exterior_load(u.exterior)

    def factor(self):
        if self._cho is None:
            self._cho = cho_factor(self.matrix)
        return self._cho


def _cell_weights(s: float, h: float, N: int):
    """Closed-form integrals over cells [kh, (k+1)h], k = 1..N.

    J0[k-1] = int y^{-1-2s} dy, J1[k-1] = (1/h) int (y - kh) y^{-1-2s} dy.
    """
    k = np.arange(1, N + 1, dtype=float)
    scale = h ** (-2.0 * s)
    J0 = (k ** (-2.0 * s) - (k + 1.0) ** (-2.0 * s)) * scale / (2.0 * s)
    if abs(s - 0.5) < 1e-13:
        # int_{kh}^{(k+1)h} y^{-2} y dy = log((k+1)/k); divide by h^{2s} = h
        Iy_over_h = np.log((k + 1.0) / k) / h
    else:
        Iy_over_h = ((k + 1.0) ** (1.0 - 2.0 * s) - k ** (1.0 - 2.0 * s)) / (
            1.0 - 2.0 * s
        ) * h ** (-2.0 * s)
    J1 = Iy_over_h - k * J0
    return J0, J1


def assemble_operator(s: float, grid: Grid1D) -> DiscreteOperator:
    """Build the dense symmetric stiffness matrix for (-d^2/dx^2)^s."""
    if not 0.05 <= s <= 0.95:
        raise ValueError("assemble_operator supports s in [0.05, 0.95]")
    N, h = grid.N, grid.h
    c = constants(1, s).c_ns
    B = h ** (-2.0 * s) / (2.0 - 2.0 * s)  # quadratic first-cell weight
    J0, J1 = _cell_weights(s, h, N)

    off = np.zeros(N)  # off[k] = coupling weight to neighbor at distance k
    off[1] = B + J0[0] - J1[0]
    if N > 2:
        ks = np.arange(2, N)
        off[ks] = J0[ks - 1] - J1[ks - 1] + J1[ks - 2]

    A = -c * toeplitz(off)

    i = np.arange(1, N + 1)
    cumJ0 = np.concatenate([[0.0], np.cumsum(J0)])
    tail_right = ((N + 1 - i) * h) ** (-2.0 * s) / (2.0 * s)
    tail_left = (i * h) ** (-2.0 * s) / (2.0 * s)
    diag = c * (2.0 * B + cumJ0[N - i] + cumJ0[i - 1] + tail_right + tail_left)
    A[np.arange(N), np.arange(N)] = diag

    # couplings to the boundary values g(a), g(b) (moved to the load)
    bc = np.zeros((N, 2))
    bc[0, 0] = B  # node 1 touches a through the near cell
    bc[1:, 0] = J1[i[1:] - 2]  # J1(i-1)
    bc[-1, 1] = B
    bc[:-1, 1] = J1[N - i[:-1] - 1]  # J1(N-i)
    return DiscreteOperator(grid=grid, s=s, matrix=A, c_ns=c, _bc_coef=bc)


def solve_dirichlet(
    op: DiscreteOperator,
    f,
    g: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> GridFunction1D:
    """Solve L_h u = f in the interior with exterior datum g.

    f may be a vectorized callable on the nodes or a length-N vector.
    """
    nodes = op.grid.nodes
    fv = np.asarray(f(nodes) if callable(f) else f, dtype=float)
    if fv.shape == ():
        fv = np.full(op.grid.N, float(fv))
    rhs = fv - op.exterior_load(g)
    u = cho_solve(op.factor(), rhs)
    return GridFunction1D(grid=op.grid, values=u, exterior=g)


def energy(op: DiscreteOperator, u: GridFunction1D, v: GridFunction1D) -> float:
    """Symmetrized discrete bilinear form including exterior couplings.

    E(u, v) = (u . (Av + load_v) + v . (Au + load_u)) / 2.  The purely
    exterior-exterior interaction of the data is a constant independent of
    the interior values and is omitted; with that convention E(1, 1) = 0
    when both data are identically one.
    """
    Eu = float(u.values @ (op.matrix @ v.values + op.exterior_load(v.exterior)))
    Ev = float(v.values @ (op.matrix @ u.values + op.exterior_load(u.exterior)))
    return 0.5 * (Eu + Ev)


@dataclass
class ObstacleSolution:
    solution: GridFunction1D
    obstacle: np.ndarray
    contact: np.ndarray  # boolean mask of nodes in contact
    sweeps: int
    residual: float

    @property
    def contact_set(self) -> np.ndarray:
        return self.solution.grid.nodes[self.contact]


def _psor_initial_guess(op, phi, g, tol, depth=0):
    """Cascadic initial guess: solve a coarsened obstacle problem and
    interpolate the result up."""
    grid = op.grid
    if grid.N <= 256 or depth >= 6:
        return np.maximum(phi, 0.0)
    coarse = Grid1D(a=grid.a, b=grid.b, N=grid.N // 2)
    phi_c = np.interp(coarse.nodes, grid.nodes, phi)
    op_c = assemble_operator(op.s, coarse)
    sol_c = solve_obstacle(op_c, phi_c, g, tol=max(tol, 1e-8), _depth=depth + 1)
    ga = float(np.asarray(sol_c.solution.exterior_at(np.array([grid.a]))).ravel()[0]) if g is not None else 0.0
    gb = float(np.asarray(sol_c.solution.exterior_at(np.array([grid.b]))).ravel()[0]) if g is not None else 0.0
    xs = np.concatenate([[grid.a], coarse.nodes, [grid.b]])
    vs = np.concatenate([[ga], sol_c.solution.values, [gb]])
    return np.maximum(np.interp(grid.nodes, xs, vs), phi)


def solve_obstacle(
    op: DiscreteOperator,
    phi,
    g: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    tol: float = 1e-10,
    omega: float = 1.8,
    max_sweeps: int = 50_000,
    _depth: int = 0,
) -> ObstacleSolution:
    """Solve the discrete obstacle problem min(L_h v, v - phi) = 0 by
    projected SOR, initialized from a coarsened solve."""
    nodes = op.grid.nodes
    phi_v = np.asarray(phi(nodes) if callable(phi) else phi, dtype=float)
    if phi_v.shape != (op.grid.N,):
        raise ValueError("obstacle must have shape (N,)")
    b = -op.exterior_load(g)
    v0 = _psor_initial_guess(op, phi_v, g, tol, depth=_depth)
    scale = max(float(np.max(np.abs(b))) if len(b) else 0.0, 1.0)
    v, sweeps, residual = core.psor(
        op.matrix, b, phi_v, v0, omega, tol * scale, max_sweeps
    )
    if residual >= tol * scale:
        raise NonConvergenceError(
            f"PSOR stalled at residual {residual:.3e} after {sweeps} sweeps"
        )
    contact = (v - phi_v) <= 10.0 * tol * max(1.0, float(np.max(np.abs(v))))
    return ObstacleSolution(
        solution=GridFunction1D(grid=op.grid, values=v, exterior=g),
        obstacle=phi_v,
        contact=contact,
        sweeps=sweeps,
        residual=residual,
    )


def free_boundary_point(sol: ObstacleSolution, side: str = "right") -> float:
    """Locate the free boundary (edge of the contact set) by linear
    interpolation of v - phi between the last contact node and the first
    detached node on the given side."""
    gap = sol.solution.values - sol.obstacle
    idx = np.nonzero(sol.contact)[0]
    if len(idx) == 0:
        raise ValueError("empty contact set; no free boundary to locate")
    nodes = sol.solution.grid.nodes
    if side == "right":
        i_last = idx[-1]
        if i_last + 1 >= len(nodes):
            return float(nodes[i_last])
        g0, g1 = gap[i_last], gap[i_last + 1]
    elif side == "left":
        i_last = idx[0]
        if i_last == 0:
            return float(nodes[i_last])
        g0, g1 = gap[i_last], gap[i_last - 1]
    else:
        raise ValueError("side must be 'left' or 'right'")
    # between x_{last} (gap ~ 0) and the neighbor (gap g1 > 0), the zero
    # of the linear interpolant of the gap:
    if g1 <= g0:
        return float(nodes[i_last])
    t = (0.0 - g0) / (g1 - g0)
    x_next = nodes[i_last + 1] if side == "right" else nodes[i_last - 1]
    return float(nodes[i_last] + t * (x_next - nodes[i_last]))


@dataclass
class GrowthFit:
    exponent: float
    intercept: float
    r_squared: float
    x_star: float
    distances: np.ndarray
    gaps: np.ndarray


def fit_growth_exponent(
    sol: ObstacleSolution,
    side: str = "right",
    window: Optional[tuple] = None,
) -> GrowthFit:
    """Least-squares fit of log(v - phi) ~ beta log(dist to free boundary).

    window = (i0, i1) selects absolute node indices [i0, i1); by default
    all detached nodes on the given side farther than 2h from the free
    boundary are used.  Requires at least 6 points.
    """
    x_star = free_boundary_point(sol, side=side)
    nodes = sol.solution.grid.nodes
    gap = sol.solution.values - sol.obstacle
    h = sol.solution.grid.h
    if window is not None:
        i0, i1 = window
        sel = np.zeros(len(nodes), dtype=bool)
        sel[i0:i1] = True
    else:
        sel = np.ones(len(nodes), dtype=bool)
    if side == "right":
        sel &= nodes > x_star
    else:
        sel &= nodes < x_star
    sel &= ~sol.contact
    sel &= np.abs(nodes - x_star) > 2.0 * h
    sel &= gap > 0.0
    if np.count_nonzero(sel) < 6:
        raise ValueError("growth-exponent fit needs at least 6 usable nodes")
    d = np.abs(nodes[sel] - x_star)
    w = gap[sel]
    logd, logw = np.log(d), np.log(w)
    slope, intercept = np.polyfit(logd, logw, 1)
    pred = slope * logd + intercept
    ss_res = float(np.sum((logw - pred) ** 2))
    ss_tot = float(np.sum((logw - np.mean(logw)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return GrowthFit(
        exponent=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        x_star=x_star,
        distances=d,
        gaps=w,
    )
