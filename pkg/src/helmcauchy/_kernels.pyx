# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``. Same signatures and semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sinh, cosh, sin, cos, sqrt, fabs

cnp.import_array()

cdef double SERIES_THRESHOLD2 = 1e-12


cdef inline double _shc(double t, double lam) nogil:
    cdef double x = t * t * lam
    cdef double a
    if fabs(x) < SERIES_THRESHOLD2:
        return t * (1 + x / 6 * (1 + x / 20 * (1 + x / 42 * (1 + x / 72))))
    if lam > 0:
        a = sqrt(lam)
        return sinh(t * a) / a
    a = sqrt(-lam)
    return sin(t * a) / a


cdef inline double _chc(double t, double lam) nogil:
    if lam >= 0:
        return cosh(t * sqrt(lam))
    return cos(t * sqrt(-lam))


def shc(t, lam):
    t, lam = np.broadcast_arrays(np.asarray(t, float), np.asarray(lam, float))
    cdef const double[::1] tf = np.ascontiguousarray(t).ravel()
    cdef const double[::1] lf = np.ascontiguousarray(lam).ravel()
    out = np.empty(tf.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tf.shape[0]):
            o[i] = _shc(tf[i], lf[i])
    return out.reshape(t.shape)


def chc(t, lam):
    t, lam = np.broadcast_arrays(np.asarray(t, float), np.asarray(lam, float))
    cdef const double[::1] tf = np.ascontiguousarray(t).ravel()
    cdef const double[::1] lf = np.ascontiguousarray(lam).ravel()
    out = np.empty(tf.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tf.shape[0]):
            o[i] = _chc(tf[i], lf[i])
    return out.reshape(t.shape)


def shc_weighted_sum(lam, fvals, s, w, double z):
    cdef const double[::1] lv = np.ascontiguousarray(lam, dtype=float)
    cdef const double complex[:, ::1] fv = np.ascontiguousarray(fvals, dtype=complex)
    cdef const double[::1] sv = np.ascontiguousarray(s, dtype=float)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=float)
    cdef Py_ssize_t nm = lv.shape[0], nq = sv.shape[0], m, q
    out = np.zeros(nm, dtype=complex)
    cdef double complex[::1] o = out
    cdef double complex acc
    with nogil:
        for m in range(nm):
            acc = 0
            for q in range(nq):
                acc = acc + wv[q] * fv[m, q] * _shc(z - sv[q], lv[m])
            o[m] = acc
    return out


def volterra_march(lam0, r, z, double k2):
    cdef const double[::1] lv = np.ascontiguousarray(lam0, dtype=float)
    cdef const double[:, ::1] rv = np.ascontiguousarray(r, dtype=float)
    cdef const double[::1] zv = np.ascontiguousarray(z, dtype=float)
    cdef Py_ssize_t nm = lv.shape[0], M = zv.shape[0] - 1, m, i, j
    out = np.empty((nm, M + 1))
    cdef double[:, ::1] u = out
    cdef double acc, x, y, h
    cdef bint uniform = _is_uniform(np.asarray(z, dtype=float))
    coef = np.empty(max(M, 1))
    cdef double[::1] c = coef
    with nogil:
        for m in range(nm):
            u[m, M] = rv[m, M]
            if uniform and M > 0:
                # c_ij depends on j - i only
                h = (zv[M] - zv[0]) / M
                for j in range(M):
                    c[j] = 2.0 * _shc(-(2 * j + 1) * h / 2, lv[m]) * _shc(-h / 2, lv[m])
            for i in range(M - 1, -1, -1):
                acc = 0.0
                for j in range(M - 1, i - 1, -1):
                    if uniform:
                        acc = acc + c[j - i] * u[m, j + 1]
                    else:
                        x = zv[i] - zv[j + 1]
                        y = zv[i] - zv[j]
                        acc = acc + 2.0 * _shc((x + y) / 2, lv[m]) * _shc((x - y) / 2, lv[m]) * u[m, j + 1]
                u[m, i] = rv[m, i] - k2 * acc
    return out


def _is_uniform(z):
    if z.size < 3:
        return True
    dz = np.diff(z)
    return bool(np.max(np.abs(dz - dz.mean())) <= 1e-13 * abs(z[-1] - z[0]))
