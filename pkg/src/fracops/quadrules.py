"""Quadrature rules shared by the symbol and operator evaluators."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["gauss_interval", "sphere_rule", "sphere_area"]


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} (counting measure for n=1)."""
    if n == 1:
        return 2.0
    if n == 2:
        return 2.0 * np.pi
    if n == 3:
        return 4.0 * np.pi
    raise ValueError(f"dimension n must be 1, 2 or 3, got {n}")


@lru_cache(maxsize=256)
def _gl(npts: int):
    x, w = np.polynomial.legendre.leggauss(npts)
    return x, w


def gauss_interval(a: float, b: float, npts: int):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _gl(npts)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return mid + half * x, half * w


@lru_cache(maxsize=64)
def sphere_rule(n: int, m: int):
    """Nodes and weights on S^{n-1} with weights summing to its measure.

    m controls resolution: number of angles (n=2) or polar nodes (n=3).
    """
    if n == 1:
        pts = np.array([[1.0], [-1.0]])
        wts = np.array([1.0, 1.0])
    elif n == 2:
        ang = (np.arange(m) + 0.5) * (2.0 * np.pi / m)
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
        wts = np.full(m, 2.0 * np.pi / m)
    elif n == 3:
        z, wz = _gl(m)
        mphi = 2 * m
        phi = (np.arange(mphi) + 0.5) * (2.0 * np.pi / mphi)
        rho = np.sqrt(1.0 - z**2)
        pts = np.empty((m * mphi, 3))
        wts = np.empty(m * mphi)
        k = 0
        for i in range(m):
            pts[k : k + mphi, 0] = rho[i] * np.cos(phi)
            pts[k : k + mphi, 1] = rho[i] * np.sin(phi)
            pts[k : k + mphi, 2] = z[i]
            wts[k : k + mphi] = wz[i] * (2.0 * np.pi / mphi)
            k += mphi
    else:
        raise ValueError(f"dimension n must be 1, 2 or 3, got {n}")
    pts.setflags(write=False)
    wts.setflags(write=False)
    return pts, wts
