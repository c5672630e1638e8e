# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: batched tridiagonal solves and plaquette windings.

Contracts mirror ``_fallback.py``; the test suite asserts parity.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport lrint, M_PI

cnp.import_array()

ctypedef fused rhs_t:
    double
    double complex


cdef inline double _wrap(double a) nogil:
    # inputs are differences of angles in (-pi, pi], so one correction suffices
    if a < -M_PI:
        return a + 2.0 * M_PI
    if a >= M_PI:
        return a - 2.0 * M_PI
    return a


def _solve_tridiag_many_impl(double[:, ::1] dl, double[:, ::1] d,
                             double[:, ::1] du, rhs_t[:, ::1] b,
                             rhs_t[:, ::1] x, double[:, ::1] c):
    cdef Py_ssize_t M = d.shape[0], n = d.shape[1]
    cdef Py_ssize_t k, i
    cdef double inv
    with nogil:
        for k in range(M):
            inv = 1.0 / d[k, 0]
            c[k, 0] = du[k, 0] * inv
            x[k, 0] = b[k, 0] * inv
            for i in range(1, n):
                inv = 1.0 / (d[k, i] - dl[k, i] * c[k, i - 1])
                if i < n - 1:
                    c[k, i] = du[k, i] * inv
                x[k, i] = (b[k, i] - dl[k, i] * x[k, i - 1]) * inv
            for i in range(n - 2, -1, -1):
                x[k, i] = x[k, i] - c[k, i] * x[k, i + 1]
    return np.asarray(x)


def solve_tridiag_many(dl, d, du, b):
    """Batched Thomas solve; see the fallback docstring for the contract."""
    dl = np.ascontiguousarray(dl, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    du = np.ascontiguousarray(du, dtype=np.float64)
    b = np.ascontiguousarray(b)
    if b.dtype != np.complex128:
        b = b.astype(np.complex128) if np.iscomplexobj(b) else b.astype(np.float64)
    x = np.empty_like(b)
    c = np.empty((d.shape[0], max(d.shape[1] - 1, 1)), dtype=np.float64)
    return _solve_tridiag_many_impl(dl, d, du, b, x, c)


def plaquette_winding(phase):
    """Integer winding per plaquette; see the fallback docstring."""
    cdef double[:, ::1] p = np.ascontiguousarray(phase, dtype=np.float64)
    cdef Py_ssize_t Nr = p.shape[0], Nt = p.shape[1]
    out_arr = np.empty((Nr - 1, Nt), dtype=np.int32)
    cdef int[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, jn
    cdef double circ
    with nogil:
        for i in range(Nr - 1):
            for j in range(Nt):
                jn = j + 1 if j + 1 < Nt else 0
                circ = (_wrap(p[i + 1, j] - p[i, j])
                        + _wrap(p[i + 1, jn] - p[i + 1, j])
                        - _wrap(p[i + 1, jn] - p[i, jn])
                        - _wrap(p[i, jn] - p[i, j]))
                out[i, j] = <int>lrint(circ / (2.0 * M_PI))
    return out_arr
