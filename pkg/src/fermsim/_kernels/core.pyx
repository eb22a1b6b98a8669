# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled gate kernels; same contract as fermsim._kernels.fallback.

Every function mutates its output in place, writes each element from exactly
one pair/row, and releases the GIL for the hot loops so the dispatch layer
can run disjoint chunks on multiple threads.
"""

import numpy as np

from libc.math cimport cos, sin

cdef extern from "complex.h" nogil:
    double complex conj(double complex)

ctypedef double complex cplx


def apply_phase_outer(
    cplx[:, ::1] mat,
    const cplx[::1] phase_a,
    const cplx[::1] phase_b,
):
    cdef Py_ssize_t a, b
    cdef Py_ssize_t na = mat.shape[0], nb = mat.shape[1]
    cdef cplx pa
    with nogil:
        for a in range(na):
            pa = phase_a[a]
            for b in range(nb):
                mat[a, b] = mat[a, b] * (pa * phase_b[b])


def apply_diag_coulomb_phases(
    cplx[:, ::1] mat,
    const double[::1] diag_a,
    const double[::1] diag_b,
    const unsigned char[:, ::1] occ_a,
    const double[:, ::1] w_cross,
    double time,
):
    cdef Py_ssize_t a, b, p
    cdef Py_ssize_t na = mat.shape[0], nb = mat.shape[1], norb = occ_a.shape[1]
    cdef double x
    cdef double[::1] cross = np.empty(nb, dtype=np.float64)
    with nogil:
        for a in range(na):
            for b in range(nb):
                cross[b] = diag_a[a] + diag_b[b]
            for p in range(norb):
                if occ_a[a, p]:
                    for b in range(nb):
                        cross[b] += 2.0 * w_cross[p, b]
            for b in range(nb):
                x = -0.5 * time * cross[b]
                mat[a, b] = mat[a, b] * (cos(x) + 1j * sin(x))


def givens_rows(
    cplx[:, ::1] mat,
    const long long[::1] src,
    const long long[::1] dst,
    const signed char[::1] signs,
    double c,
    cplx s,
):
    cdef Py_ssize_t i, b
    cdef Py_ssize_t n = src.shape[0], nb = mat.shape[1]
    cdef Py_ssize_t r1, r2
    cdef cplx coef, mcoef, x, y
    with nogil:
        for i in range(n):
            r1 = src[i]
            r2 = dst[i]
            coef = s * signs[i]
            mcoef = -conj(coef)
            for b in range(nb):
                x = mat[r1, b]
                y = mat[r2, b]
                mat[r1, b] = c * x + coef * y
                mat[r2, b] = mcoef * x + c * y


def givens_cols(
    cplx[:, ::1] mat,
    const long long[::1] src,
    const long long[::1] dst,
    const signed char[::1] signs,
    double c,
    cplx s,
):
    cdef Py_ssize_t a, i
    cdef Py_ssize_t na = mat.shape[0], n = src.shape[0]
    cdef Py_ssize_t c1, c2
    cdef cplx coef, x, y
    with nogil:
        for a in range(na):
            for i in range(n):
                c1 = src[i]
                c2 = dst[i]
                coef = s * signs[i]
                x = mat[a, c1]
                y = mat[a, c2]
                mat[a, c1] = c * x + coef * y
                mat[a, c2] = -conj(coef) * x + c * y


def one_body_rows(
    cplx[:, ::1] out,
    const cplx[:, ::1] mat,
    const long long[:, ::1] targets,
    const cplx[:, ::1] coeffs,
):
    cdef Py_ssize_t a, k, b
    cdef Py_ssize_t na = out.shape[0], nb = out.shape[1], nk = targets.shape[1]
    cdef Py_ssize_t t
    cdef cplx coef
    with nogil:
        for a in range(na):
            for k in range(nk):
                coef = coeffs[a, k]
                t = targets[a, k]
                for b in range(nb):
                    out[a, b] = out[a, b] + coef * mat[t, b]


def one_body_cols(
    cplx[:, ::1] out,
    const cplx[:, ::1] mat,
    const long long[:, ::1] targets,
    const cplx[:, ::1] coeffs,
):
    cdef Py_ssize_t a, col, k
    cdef Py_ssize_t na = out.shape[0], nb = out.shape[1], nk = targets.shape[1]
    cdef cplx acc
    with nogil:
        for a in range(na):
            for col in range(nb):
                acc = 0
                for k in range(nk):
                    acc = acc + coeffs[col, k] * mat[a, targets[col, k]]
                out[a, col] = out[a, col] + acc
