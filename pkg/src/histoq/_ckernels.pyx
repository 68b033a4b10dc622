# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Signatures mirror ``histoq._pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, cos, sin, log, sqrt, atan2, hypot, fabs, INFINITY

from ._weideman import COEFFS as _PY_COEFFS, L as _PY_L

cnp.import_array()

BACKEND = "cython"

cdef double[::1] _COEFFS = np.ascontiguousarray(_PY_COEFFS, dtype=np.float64)
cdef int _NC = _COEFFS.shape[0]
cdef double _L = _PY_L
cdef double _SQRT_PI = sqrt(np.pi)
cdef double _TWO_OVER_SQRT_PI = 2.0 / sqrt(np.pi)
cdef double _SERIES_RADIUS = 2.0
cdef int _SERIES_TERMS = 60
cdef double _EXP_LIMIT = 709.0


cdef inline double complex _cexp(double complex z) nogil:
    cdef double a = z.real
    if a > _EXP_LIMIT:
        a = _EXP_LIMIT
    cdef double m = exp(a)
    return m * cos(z.imag) + 1j * (m * sin(z.imag))


cdef double complex _w_upper(double complex z) nogil:
    cdef double complex denom = _L - 1j * z
    cdef double complex bz = (_L + 1j * z) / denom
    cdef double complex p = 0
    cdef int i
    for i in range(_NC):
        p = p * bz + _COEFFS[i]
    return 2.0 * p / (denom * denom) + (1.0 / _SQRT_PI) / denom


cdef double complex _w(double complex z) nogil:
    if z.imag >= 0:
        return _w_upper(z)
    return 2.0 * _cexp(-z * z) - _w_upper(-z)


cdef double complex _erf_series(double complex z) nogil:
    cdef double complex z2 = z * z
    cdef double complex term = z
    cdef double complex total = z
    cdef int n
    for n in range(1, _SERIES_TERMS):
        term = term * (-z2) / n
        total = total + term / (2 * n + 1)
    return _TWO_OVER_SQRT_PI * total


cdef inline double complex _erfc_right(double complex z) nogil:
    return _cexp(-z * z) * _w_upper(1j * z)


cdef double complex _erf(double complex z) nogil:
    cdef bint flip_re = z.real < 0
    cdef bint flip_im = z.imag < 0
    cdef double complex q = fabs(z.real) + 1j * fabs(z.imag)
    cdef double complex r
    if hypot(q.real, q.imag) < _SERIES_RADIUS:
        r = _erf_series(q)
    else:
        r = 1.0 - _erfc_right(q)
    if flip_re != flip_im:
        r = r.conjugate()
    if flip_re:
        r = -r
    return r


cdef double complex _erfc(double complex z) nogil:
    if hypot(z.real, z.imag) < _SERIES_RADIUS:
        return 1.0 - _erf(z)
    if z.real >= 0:
        return _erfc_right(z)
    return 2.0 - _erfc_right(-z)


def _map_complex(func, z):
    arr = np.asarray(z, dtype=np.complex128)
    flat = np.ascontiguousarray(arr.ravel())
    out = np.empty_like(flat)
    cdef double complex[::1] zin = flat
    cdef double complex[::1] zout = out
    cdef Py_ssize_t i, n = flat.shape[0]
    cdef int which = func
    with nogil:
        for i in range(n):
            if which == 0:
                zout[i] = _w(zin[i])
            elif which == 1:
                zout[i] = _erf(zin[i])
            else:
                zout[i] = _erfc(zin[i])
    return out.reshape(arr.shape)


def faddeeva(z):
    return _map_complex(0, z)


def erf(z):
    return _map_complex(1, z)


def erfc(z):
    return _map_complex(2, z)


def spin_probabilities(theta, phi, double delta):
    th_b, ph_b = np.broadcast_arrays(np.asarray(theta, dtype=np.float64),
                                     np.asarray(phi, dtype=np.float64))
    shape = th_b.shape
    cdef double[::1] th = np.ascontiguousarray(th_b.ravel())
    cdef double[::1] ph = np.ascontiguousarray(ph_b.ravel())
    cdef Py_ssize_t i, n = th.shape[0]
    out = np.empty((4, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double cd2 = cos(delta / 2) ** 2
    cdef double sd2 = sin(delta / 2) ** 2
    cdef double sd = sin(delta)
    cdef double c2, s2, cross
    with nogil:
        for i in range(n):
            c2 = cos(th[i] / 2) ** 2
            s2 = sin(th[i] / 2) ** 2
            cross = 0.25 * cos(ph[i]) * sin(th[i]) * sd
            o[0, i] = c2 * cd2 + cross
            o[1, i] = c2 * sd2 - cross
            o[2, i] = s2 * sd2 + cross
            o[3, i] = s2 * cd2 - cross
    return out.reshape((4,) + shape)


def spin_min_grid(double delta, theta, phi):
    cdef double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef double[::1] ph = np.ascontiguousarray(phi, dtype=np.float64)
    cdef Py_ssize_t i, j, nt = th.shape[0], nphi = ph.shape[0]
    out = np.empty((nt, nphi), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double cd2 = cos(delta / 2) ** 2
    cdef double sd2 = sin(delta / 2) ** 2
    cdef double sd = sin(delta)
    cdef double c2, s2, st, cross, m, v
    with nogil:
        for i in range(nt):
            c2 = cos(th[i] / 2) ** 2
            s2 = sin(th[i] / 2) ** 2
            st = sin(th[i]) * sd
            for j in range(nphi):
                cross = 0.25 * cos(ph[j]) * st
                m = c2 * cd2 + cross
                v = c2 * sd2 - cross
                if v < m:
                    m = v
                v = s2 * sd2 + cross
                if v < m:
                    m = v
                v = s2 * cd2 - cross
                if v < m:
                    m = v
                o[i, j] = m
    return out


cdef void _ensemble_fill(double amp, double phase, int n_total, double[::1] out) nogil:
    cdef double re1 = 1.0 - amp * cos(phase)
    cdef double im1 = -amp * sin(phase)
    cdef double rho = hypot(re1, im1)
    cdef double psi = atan2(im1, re1)
    cdef double log_a = log(amp) if amp > 0 else -INFINITY
    cdef double log_r = log(rho) if rho > 0 else -INFINITY
    cdef int n, m
    cdef double la, lr
    for n in range(n_total + 1):
        m = n_total - n
        la = n * log_a if n > 0 else 0.0
        lr = m * log_r if m > 0 else 0.0
        out[n] = exp(la + lr) * cos(n * phase + m * psi)


def ensemble_row(double amp, double phase, int n_total):
    out = np.empty(n_total + 1, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        _ensemble_fill(amp, phase, n_total, o)
    return out


def ensemble_horizon(double amp, double phase, int n_max, double threshold):
    buf = np.empty(n_max + 1, dtype=np.float64)
    cdef double[::1] b = buf
    cdef int n_total, k
    cdef int found_n = -1, found_k = -1
    with nogil:
        for n_total in range(1, n_max + 1):
            _ensemble_fill(amp, phase, n_total, b)
            for k in range(n_total + 1):
                if b[k] < threshold:
                    found_n = n_total
                    found_k = k
                    break
            if found_n >= 0:
                break
    if found_n < 0:
        return None
    return found_n, found_k, float(b[found_k])


def two_slit_densities(y, double d, double dist, double k):
    arr = np.asarray(y, dtype=np.float64)
    cdef double[::1] yy = np.ascontiguousarray(arr.ravel())
    cdef Py_ssize_t i, n = yy.shape[0]
    wu = np.empty(n, dtype=np.float64)
    wl = np.empty(n, dtype=np.float64)
    cdef double[::1] u = wu
    cdef double[::1] l = wl
    cdef double su, sl, c
    with nogil:
        for i in range(n):
            su = hypot(d / 2 - yy[i], dist)
            sl = hypot(d / 2 + yy[i], dist)
            c = cos(k * (sl - su))
            u[i] = (1.0 / su) * (1.0 / su + c / sl)
            l[i] = (1.0 / sl) * (1.0 / sl + c / su)
    wu = wu.reshape(arr.shape)
    wl = wl.reshape(arr.shape)
    return wu, wl, wu + wl


def spacetime_integrands(x, double center, double k0, double sigma):
    arr = np.asarray(x, dtype=np.float64)
    cdef double[::1] xx = np.ascontiguousarray(arr.ravel())
    cdef Py_ssize_t i, n = xx.shape[0]
    remain = np.empty(n, dtype=np.float64)
    overlap = np.empty(n, dtype=np.complex128)
    cdef double[::1] r = remain
    cdef double complex[::1] o = overlap
    cdef double norm = 1.0 / sqrt(2.0 * np.pi * sigma * sigma)
    cdef double s2 = 2.0 * sigma * sigma
    cdef double xi, direct, mirror, reflected
    with nogil:
        for i in range(n):
            xi = xx[i]
            direct = exp(-(xi - center) * (xi - center) / s2)
            mirror = exp(-(xi * xi + center * center) / s2)
            reflected = exp(-(xi + center) * (xi + center) / s2)
            r[i] = norm * (direct - mirror * cos(2.0 * k0 * xi))
            o[i] = norm * (mirror * (cos(2.0 * k0 * xi) - 1j * sin(2.0 * k0 * xi)) - reflected)
    return remain.reshape(arr.shape), overlap.reshape(arr.shape)
