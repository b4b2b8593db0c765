# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: walk-on-spheres inner loop and projected SOR.

Mirrors the API of fracops._core_py.  The random stream is the same
counter-based splitmix64 hash, so runs are reproducible for a fixed seed
regardless of chunking; the beta quantile uses a local continued-fraction
incomplete beta, so exit points agree with the numpy backend statistically
(not bitwise).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, cos, exp, fabs, lgamma, log, log1p, sin, sqrt
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

BACKEND = "cython"

BALL, BOX, HALFSPACE = 0, 1, 2

cdef enum:
    C_BALL = 0
    C_BOX = 1
    C_HALFSPACE = 2


cdef inline uint64_t _mix(uint64_t z) nogil:
    z += <uint64_t>0x9E3779B97F4A7C15
    z ^= z >> 30
    z *= <uint64_t>0xBF58476D1CE4E5B9
    z ^= z >> 27
    z *= <uint64_t>0x94D049BB133111EB
    z ^= z >> 31
    return z


cdef inline double _uniform(uint64_t seed, uint64_t walker, uint64_t counter) nogil:
    cdef uint64_t z = _mix(_mix(_mix(seed) ^ walker) ^ counter)
    return (z >> 11) * (1.0 / 9007199254740992.0)


cdef double _betacf(double a, double b, double x) nogil:
    cdef double tiny = 1e-300
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, de
    cdef int m, m2
    if fabs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 500):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if fabs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if fabs(c) < tiny:
            c = tiny
        d = 1.0 / d
        de = d * c
        h *= de
        if fabs(de - 1.0) < 1e-16:
            break
    return h


cdef double _betainc(double a, double b, double x) nogil:
    cdef double lbeta, front
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    lbeta = lgamma(a) + lgamma(b) - lgamma(a + b)
    front = exp(a * log(x) + b * log1p(-x) - lbeta)
    if x < a / (a + b):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


cdef double _betaincinv(double a, double b, double p) nogil:
    cdef double lo = 0.0
    cdef double hi = 1.0
    cdef double x = a / (a + b)
    cdef double lbeta = lgamma(a) + lgamma(b) - lgamma(a + b)
    cdef double f, dpdx, xn
    cdef int i
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    for i in range(200):
        f = _betainc(a, b, x) - p
        if f > 0.0:
            hi = x
        else:
            lo = x
        if hi - lo < 1e-15:
            break
        dpdx = exp((a - 1.0) * log(x) + (b - 1.0) * log1p(-x) - lbeta)
        if dpdx > 0.0:
            xn = x - f / dpdx
        else:
            xn = -1.0
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if fabs(xn - x) < 1e-15:
            x = xn
            break
        x = xn
    return x


cdef inline double _quantile_tab(double a, double b, double p,
                                 double[::1] tab, int ntab) nogil:
    """Beta quantile via table lookup + Newton polish; exact inversion near
    the endpoints where interpolation in the heavy tail is inaccurate."""
    cdef double t, x, f, dpdx, lbeta
    cdef int k, it
    if p * ntab < 8.0 or (1.0 - p) * ntab < 8.0:
        return _betaincinv(a, b, p)
    t = p * ntab
    k = <int>t
    x = tab[k] + (t - k) * (tab[k + 1] - tab[k])
    lbeta = lgamma(a) + lgamma(b) - lgamma(a + b)
    # table init error is O(ntab^-2); a single Newton step reaches ~1e-13
    f = _betainc(a, b, x) - p
    dpdx = exp((a - 1.0) * log(x) + (b - 1.0) * log1p(-x) - lbeta)
    if dpdx > 0.0:
        x -= f / dpdx
    if x <= 0.0:
        x = 1e-300
    elif x >= 1.0:
        x = 1.0 - 1e-16
    return x


cdef inline double _dist_pt(int code, double[::1] params, double* x, int n) nogil:
    cdef double acc = 0.0
    cdef double d, g
    cdef int i
    if code == C_BALL:
        for i in range(n):
            d = x[i] - params[i]
            acc += d * d
        return params[n] - sqrt(acc)
    elif code == C_BOX:
        g = 1e300
        for i in range(n):
            d = x[i] - params[i]
            if d < g:
                g = d
            d = params[n + i] - x[i]
            if d < g:
                g = d
        return g
    else:  # HALFSPACE
        for i in range(n):
            acc += x[i] * params[i]
        return params[n] - acc


def counter_uniform(seed, walker, counter):
    walker = np.asarray(walker, dtype=np.uint64)
    counter = np.asarray(counter, dtype=np.uint64)
    walker, counter = np.broadcast_arrays(walker, counter)
    out = np.empty(walker.shape, dtype=np.float64)
    cdef uint64_t[::1] wv = np.ascontiguousarray(walker).ravel()
    cdef uint64_t[::1] cv = np.ascontiguousarray(counter).ravel()
    cdef double[::1] ov = out.ravel()
    cdef uint64_t sd = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i
    for i in range(wv.shape[0]):
        ov[i] = _uniform(sd, wv[i], cv[i])
    return out


def exit_radius_factors(seed, walker, counter, double s):
    walker = np.asarray(walker, dtype=np.uint64)
    counter = np.asarray(counter, dtype=np.uint64)
    walker, counter = np.broadcast_arrays(walker, counter)
    out = np.empty(walker.shape, dtype=np.float64)
    cdef uint64_t[::1] wv = np.ascontiguousarray(walker).ravel()
    cdef uint64_t[::1] cv = np.ascontiguousarray(counter).ravel()
    cdef double[::1] ov = out.ravel()
    cdef uint64_t sd = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i
    cdef double u, v
    for i in range(wv.shape[0]):
        u = _uniform(sd, wv[i], cv[i])
        v = _betaincinv(1.0 - s, s, u)
        ov[i] = 1.0 / sqrt(1.0 - v)
    return out


def walk_exit(x0, int code, params, double s, double radius_safety,
              int max_steps, seed, walker_offset):
    x0 = np.atleast_2d(np.asarray(x0, dtype=np.float64))
    cdef Py_ssize_t m = x0.shape[0]
    cdef int n = <int>x0.shape[1]
    pos_arr = np.array(x0, dtype=np.float64, order="C", copy=True)
    steps_arr = np.zeros(m, dtype=np.int64)
    hit_arr = np.zeros(m, dtype=np.uint8)
    cdef double[:, ::1] pos = pos_arr
    cdef int64_t[::1] steps = steps_arr
    cdef cnp.uint8_t[::1] hit = hit_arr
    cdef double[::1] par = np.ascontiguousarray(params, dtype=np.float64)
    cdef uint64_t sd = <uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t woff = <uint64_t>int(walker_offset)
    cdef Py_ssize_t w
    cdef int step, i
    cdef uint64_t wid, base
    cdef double x[3]
    cdef double d, r, u, v, rho, ang, z, rr
    cdef int ntab = 1024
    tab_arr = np.empty(ntab + 1, dtype=np.float64)
    cdef double[::1] tab = tab_arr
    cdef int k
    with nogil:
        for k in range(ntab + 1):
            tab[k] = _betaincinv(1.0 - s, s, (<double>k) / ntab)
        for w in range(m):
            wid = woff + <uint64_t>w
            for i in range(n):
                x[i] = pos[w, i]
            for step in range(max_steps):
                d = _dist_pt(code, par, x, n)
                if d <= 0.0:
                    break
                r = radius_safety * d
                base = <uint64_t>(4 * step)
                u = _uniform(sd, wid, base)
                v = _quantile_tab(1.0 - s, s, u, tab, ntab)
                rho = 1.0 / sqrt(1.0 - v)
                if n == 1:
                    u = _uniform(sd, wid, base + 1)
                    x[0] += r * rho * (1.0 if u >= 0.5 else -1.0)
                elif n == 2:
                    ang = 2.0 * M_PI * _uniform(sd, wid, base + 1)
                    x[0] += r * rho * cos(ang)
                    x[1] += r * rho * sin(ang)
                else:
                    z = 2.0 * _uniform(sd, wid, base + 1) - 1.0
                    ang = 2.0 * M_PI * _uniform(sd, wid, base + 2)
                    rr = sqrt(max(1.0 - z * z, 0.0))
                    x[0] += r * rho * rr * cos(ang)
                    x[1] += r * rho * rr * sin(ang)
                    x[2] += r * rho * z
                steps[w] += 1
            if _dist_pt(code, par, x, n) > 0.0:
                hit[w] = 1
            for i in range(n):
                pos[w, i] = x[i]
    hit_bool = hit_arr.astype(bool)
    if hit_bool.any():
        from fracops._core_py import _project_exterior
        pos_arr[hit_bool] = _project_exterior(code, np.asarray(params, dtype=np.float64),
                                              pos_arr[hit_bool])
    return pos_arr, steps_arr, hit_bool


def psor(A, b, phi, v0, double omega, double tol, int max_sweeps, int check_every=4):
    A_arr = np.ascontiguousarray(A, dtype=np.float64)
    b_arr = np.ascontiguousarray(b, dtype=np.float64)
    phi_arr = np.ascontiguousarray(phi, dtype=np.float64)
    v_arr = np.array(v0, dtype=np.float64, copy=True)
    cdef double[:, ::1] Am = A_arr
    cdef double[::1] bm = b_arr
    cdef double[::1] pm = phi_arr
    cdef double[::1] vm = v_arr
    cdef Py_ssize_t N = bm.shape[0]
    cdef Py_ssize_t i, j
    cdef int sweep
    cdef double r, residual, vi, m1, m2
    residual = 1e300
    with nogil:
        for sweep in range(1, max_sweeps + 1):
            for i in range(N):
                r = bm[i]
                for j in range(N):
                    r -= Am[i, j] * vm[j]
                vi = vm[i] + omega * r / Am[i, i]
                if vi < pm[i]:
                    vi = pm[i]
                vm[i] = vi
            if sweep % check_every == 0 or sweep == max_sweeps:
                residual = 0.0
                for i in range(N):
                    r = -bm[i]
                    for j in range(N):
                        r += Am[i, j] * vm[j]
                    m1 = r
                    m2 = vm[i] - pm[i]
                    if m2 < m1:
                        m1 = m2
                    if fabs(m1) > residual:
                        residual = fabs(m1)
                if residual < tol:
                    break
    return v_arr, sweep, residual
