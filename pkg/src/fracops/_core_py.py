"""Pure-Python (numpy) implementations of the hot kernels.

Same call signatures as the compiled extension fracops._core; selected by
fracops._backend when the extension is unavailable or explicitly disabled.
The random stream is a counter-based hash (three rounds of the splitmix64
finalizer over seed, walker id, and draw counter), so results are
reproducible and independent of scheduling or chunking.
"""

from __future__ import annotations

import numpy as np
from scipy import special as sp_special

BACKEND = "python"

_U64 = np.uint64
_M1 = _U64(0xBF58476D1CE4E5B9)
_M2 = _U64(0x94D049BB133111EB)
_GOLD = _U64(0x9E3779B97F4A7C15)


def _mix(z):
    # uint64 wraparound is intended; silence the overflow warning
    with np.errstate(over="ignore"):
        z = (z + _GOLD) & _U64(0xFFFFFFFFFFFFFFFF)
        z ^= z >> _U64(30)
        z = (z * _M1) & _U64(0xFFFFFFFFFFFFFFFF)
        z ^= z >> _U64(27)
        z = (z * _M2) & _U64(0xFFFFFFFFFFFFFFFF)
        z ^= z >> _U64(31)
    return z


def counter_uniform(seed: int, walker, counter):
    """Uniform(0, 1) doubles keyed by (seed, walker, counter)."""
    walker = np.asarray(walker, dtype=np.uint64)
    counter = np.asarray(counter, dtype=np.uint64)
    z = _mix(_mix(_mix(_U64(seed & 0xFFFFFFFFFFFFFFFF)) ^ walker) ^ counter)
    return (z >> _U64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


# domain codes shared with the compiled backend
BALL, BOX, HALFSPACE = 0, 1, 2


def _dist(code, params, pts):
    if code == BALL:
        n = pts.shape[1]
        center, radius = params[:n], params[n]
        return radius - np.linalg.norm(pts - center, axis=1)
    if code == BOX:
        n = pts.shape[1]
        lo, hi = params[:n], params[n : 2 * n]
        return np.minimum((pts - lo).min(axis=1), (hi - pts).min(axis=1))
    if code == HALFSPACE:
        n = pts.shape[1]
        e, off = params[:n], params[n]
        return off - pts @ e
    raise ValueError(f"unknown domain code {code}")


def _project_exterior(code, params, pts):
    """Move points still inside the domain to its nearest exterior point."""
    out = pts.copy()
    n = pts.shape[1]
    if code == BALL:
        center, radius = params[:n], params[n]
        rel = out - center
        nrm = np.linalg.norm(rel, axis=1)
        nrm = np.where(nrm == 0.0, 1.0, nrm)
        out = center + rel * (radius / nrm)[:, None] * (1.0 + 1e-12)
    elif code == BOX:
        lo, hi = params[:n], params[n : 2 * n]
        gap_lo = out - lo
        gap_hi = hi - out
        for i in range(len(out)):
            jl, jh = np.argmin(gap_lo[i]), np.argmin(gap_hi[i])
            if gap_lo[i, jl] <= gap_hi[i, jh]:
                out[i, jl] = lo[jl] - 1e-12 * max(1.0, abs(lo[jl]))
            else:
                out[i, jh] = hi[jh] + 1e-12 * max(1.0, abs(hi[jh]))
    elif code == HALFSPACE:
        e, off = params[:n], params[n]
        d = off - out @ e
        out += (d + 1e-12)[:, None] * e
    return out


def _directions(seed, wid, base_counter, n):
    if n == 1:
        u = counter_uniform(seed, wid, base_counter + 1)
        return np.where(u < 0.5, -1.0, 1.0)[:, None]
    if n == 2:
        ang = 2.0 * np.pi * counter_uniform(seed, wid, base_counter + 1)
        return np.column_stack([np.cos(ang), np.sin(ang)])
    z = 2.0 * counter_uniform(seed, wid, base_counter + 1) - 1.0
    ang = 2.0 * np.pi * counter_uniform(seed, wid, base_counter + 2)
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack([rho * np.cos(ang), rho * np.sin(ang), z])


def exit_radius_factors(seed: int, walker, counter, s: float):
    """Exit radius rho >= 1 (in units of the ball radius) for the
    2s-stable exit law: rho = (1 - V)^{-1/2}, V ~ Beta(1-s, s)."""
    u = counter_uniform(seed, walker, counter)
    v = sp_special.betaincinv(1.0 - s, s, u)
    return 1.0 / np.sqrt(1.0 - v)


def walk_exit(x0, code, params, s, radius_safety, max_steps, seed, walker_offset):
    """Run walk-on-spheres until each walker leaves the domain.

    Returns (exit_points, steps, hit_max).  Walkers hitting max_steps are
    projected to the nearest exterior point and flagged.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    m, n = x0.shape
    params = np.asarray(params, dtype=float)
    pos = x0.copy()
    steps = np.zeros(m, dtype=np.int64)
    active = np.ones(m, dtype=bool)
    wid = np.uint64(walker_offset) + np.arange(m, dtype=np.uint64)
    for step in range(max_steps):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        d = _dist(code, params, pos[idx])
        r = radius_safety * d
        base = np.uint64(4 * step)
        rho = exit_radius_factors(seed, wid[idx], base, s)
        theta = _directions(seed, wid[idx], base, n)
        pos[idx] += (r * rho)[:, None] * theta
        steps[idx] += 1
        active[idx] = _dist(code, params, pos[idx]) > 0.0
    hit_max = active.copy()
    if hit_max.any():
        pos[hit_max] = _project_exterior(code, params, pos[hit_max])
    return pos, steps, hit_max


def psor(A, b, phi, v0, omega, tol, max_sweeps, check_every=4):
    """Projected SOR for the complementarity problem
    min(Av - b, v - phi) = 0, v >= phi.

    Returns (v, sweeps, residual); residual is the max-norm complementarity
    residual at exit.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    phi = np.asarray(phi, dtype=float)
    v = np.array(v0, dtype=float, copy=True)
    N = len(b)
    diag = np.diag(A)
    residual = np.inf
    for sweep in range(1, max_sweeps + 1):
        for i in range(N):
            r = b[i] - A[i] @ v
            v[i] = max(phi[i], v[i] + omega * r / diag[i])
        if sweep % check_every == 0 or sweep == max_sweeps:
            res_vec = np.minimum(A @ v - b, v - phi)
            residual = float(np.max(np.abs(res_vec)))
            if residual < tol:
                return v, sweep, residual
    return v, max_sweeps, residual
