# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batched spectral kernels.

Same contract as ``qmetric._kernels._numpy``: largest singular value and
extreme Hermitian eigenvalues over stacks of small complex matrices.  Sizes
1 and 2 use closed forms; larger sizes call LAPACK zheev per matrix without
returning to Python.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_lapack cimport zheev

cnp.import_array()

ctypedef double complex dcomplex


cdef inline double _herm2_top(double a00, double a11, dcomplex a01) nogil:
    cdef double mean = 0.5 * (a00 + a11)
    cdef double off = a01.real * a01.real + a01.imag * a01.imag
    cdef double rad = sqrt(0.25 * (a00 - a11) * (a00 - a11) + off)
    return mean + rad


cdef inline void _herm2_bounds(double a00, double a11, dcomplex a01,
                               double *lo, double *hi) nogil:
    cdef double mean = 0.5 * (a00 + a11)
    cdef double off = a01.real * a01.real + a01.imag * a01.imag
    cdef double rad = sqrt(0.25 * (a00 - a11) * (a00 - a11) + off)
    lo[0] = mean - rad
    hi[0] = mean + rad


def sv_max_batch(mats):
    """Largest singular value of each matrix in a (..., k, k) complex stack."""
    arr = np.ascontiguousarray(mats, dtype=np.complex128)
    shape = arr.shape[:-2]
    cdef Py_ssize_t k = arr.shape[arr.ndim - 1]
    flat = arr.reshape(-1, k, k)
    cdef dcomplex[:, :, ::1] m = flat
    cdef Py_ssize_t nb = flat.shape[0]
    out = np.empty(nb, dtype=np.float64)
    cdef double[::1] o = out

    cdef Py_ssize_t b, i, j, l
    cdef dcomplex g00, g01, g11, acc
    cdef double lo, hi

    cdef int n = <int> k, lda = <int> k, lwork, info
    cdef cnp.ndarray gram_arr, work_arr, rwork_arr, w_arr
    cdef dcomplex *gram
    cdef dcomplex *work
    cdef double *rwork
    cdef double *w

    if k == 1:
        for b in range(nb):
            o[b] = sqrt(m[b, 0, 0].real ** 2 + m[b, 0, 0].imag ** 2)
        return out.reshape(shape)
    if k == 2:
        with nogil:
            for b in range(nb):
                g00 = (m[b, 0, 0].conjugate() * m[b, 0, 0]
                       + m[b, 1, 0].conjugate() * m[b, 1, 0])
                g01 = (m[b, 0, 0].conjugate() * m[b, 0, 1]
                       + m[b, 1, 0].conjugate() * m[b, 1, 1])
                g11 = (m[b, 0, 1].conjugate() * m[b, 0, 1]
                       + m[b, 1, 1].conjugate() * m[b, 1, 1])
                hi = _herm2_top(g00.real, g11.real, g01)
                o[b] = sqrt(hi) if hi > 0.0 else 0.0
        return out.reshape(shape)

    lwork = <int> (2 * k)
    gram_arr = np.empty(k * k, dtype=np.complex128)
    work_arr = np.empty(lwork, dtype=np.complex128)
    rwork_arr = np.empty(3 * k, dtype=np.float64)
    w_arr = np.empty(k, dtype=np.float64)
    gram = <dcomplex *> cnp.PyArray_DATA(gram_arr)
    work = <dcomplex *> cnp.PyArray_DATA(work_arr)
    rwork = <double *> cnp.PyArray_DATA(rwork_arr)
    w = <double *> cnp.PyArray_DATA(w_arr)

    for b in range(nb):
        # gram = M^* M; Hermitian, so the column-major layout expected by
        # LAPACK is reached by storing the transpose (eigenvalues unchanged)
        for i in range(k):
            for j in range(k):
                acc = 0
                for l in range(k):
                    acc = acc + m[b, l, i].conjugate() * m[b, l, j]
                gram[i * k + j] = acc
        zheev("N", "U", &n, gram, &lda, w, work, &lwork, rwork, &info)
        o[b] = sqrt(w[k - 1]) if (info == 0 and w[k - 1] > 0.0) else 0.0
        if info != 0:
            raise np.linalg.LinAlgError("zheev failed to converge")
    return out.reshape(shape)


def sv_max_le_batch(mats, double bound):
    """Elementwise test ||M||_op <= bound via LDL^* of bound^2 I - M^* M."""
    arr = np.ascontiguousarray(mats, dtype=np.complex128)
    shape = arr.shape[:-2]
    cdef Py_ssize_t k = arr.shape[arr.ndim - 1]
    if k <= 2:
        return sv_max_batch(arr) <= bound
    flat = arr.reshape(-1, k, k)
    cdef dcomplex[:, :, ::1] m = flat
    cdef Py_ssize_t nb = flat.shape[0]
    out = np.empty(nb, dtype=np.bool_)
    cdef cnp.uint8_t[::1] o = out.view(np.uint8)

    cdef cnp.ndarray a_arr = np.empty(k * k, dtype=np.complex128)
    cdef dcomplex *a = <dcomplex *> cnp.PyArray_DATA(a_arr)
    cdef Py_ssize_t b, i, j, l
    cdef dcomplex acc, lij
    cdef double pivot, colmax, tol = 1e-12 * max(1.0, bound * bound)
    cdef double b2 = bound * bound
    cdef bint ok

    with nogil:
        for b in range(nb):
            for i in range(k):
                for j in range(k):
                    acc = 0
                    for l in range(k):
                        acc = acc + m[b, l, i].conjugate() * m[b, l, j]
                    a[i * k + j] = -acc
                a[i * k + i] = a[i * k + i] + b2
            ok = True
            for j in range(k):
                pivot = a[j * k + j].real
                if pivot <= -tol:
                    ok = False
                    break
                if j == k - 1:
                    break
                if pivot <= tol:
                    colmax = 0.0
                    for i in range(j + 1, k):
                        colmax = max(colmax,
                                     a[i * k + j].real * a[i * k + j].real
                                     + a[i * k + j].imag * a[i * k + j].imag)
                    if colmax > tol:
                        ok = False
                        break
                    continue
                for i in range(j + 1, k):
                    lij = a[i * k + j] / pivot
                    for l in range(j + 1, k):
                        a[i * k + l] = a[i * k + l] - lij * a[l * k + j].conjugate()
            o[b] = 1 if ok else 0
    return out.reshape(shape)


def herm_eig_bounds_batch(mats):
    """Smallest and largest eigenvalue of each Hermitian matrix in a stack."""
    arr = np.ascontiguousarray(mats, dtype=np.complex128)
    shape = arr.shape[:-2]
    cdef Py_ssize_t k = arr.shape[arr.ndim - 1]
    flat = arr.reshape(-1, k, k)
    cdef dcomplex[:, :, ::1] m = flat
    cdef Py_ssize_t nb = flat.shape[0]
    lo_out = np.empty(nb, dtype=np.float64)
    hi_out = np.empty(nb, dtype=np.float64)
    cdef double[::1] lov = lo_out
    cdef double[::1] hiv = hi_out

    cdef Py_ssize_t b, i, j
    cdef double lo, hi

    cdef int n = <int> k, lda = <int> k, lwork, info
    cdef cnp.ndarray a_arr, work_arr, rwork_arr, w_arr
    cdef dcomplex *a
    cdef dcomplex *work
    cdef double *rwork
    cdef double *w

    if k == 1:
        for b in range(nb):
            lov[b] = m[b, 0, 0].real
            hiv[b] = m[b, 0, 0].real
        return lo_out.reshape(shape), hi_out.reshape(shape)
    if k == 2:
        with nogil:
            for b in range(nb):
                _herm2_bounds(m[b, 0, 0].real, m[b, 1, 1].real, m[b, 0, 1],
                              &lo, &hi)
                lov[b] = lo
                hiv[b] = hi
        return lo_out.reshape(shape), hi_out.reshape(shape)

    lwork = <int> (2 * k)
    a_arr = np.empty(k * k, dtype=np.complex128)
    work_arr = np.empty(lwork, dtype=np.complex128)
    rwork_arr = np.empty(3 * k, dtype=np.float64)
    w_arr = np.empty(k, dtype=np.float64)
    a = <dcomplex *> cnp.PyArray_DATA(a_arr)
    work = <dcomplex *> cnp.PyArray_DATA(work_arr)
    rwork = <double *> cnp.PyArray_DATA(rwork_arr)
    w = <double *> cnp.PyArray_DATA(w_arr)

    for b in range(nb):
        # Hermitian input: transposed copy is the conjugate, same spectrum
        for i in range(k):
            for j in range(k):
                a[i * k + j] = m[b, i, j]
        zheev("N", "U", &n, a, &lda, w, work, &lwork, rwork, &info)
        if info != 0:
            raise np.linalg.LinAlgError("zheev failed to converge")
        lov[b] = w[0]
        hiv[b] = w[k - 1]
    return lo_out.reshape(shape), hi_out.reshape(shape)
