# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: conv2d via C im2col/col2im around BLAS dgemm, fused ELU.

Same entry points and summation semantics as kernels_numpy; float64 only.
Training-path calls may pass a per-layer `scratch` dict that keeps the large
intermediates alive across batches (single-writer, like the training loop).
"""

import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport exp
from scipy.linalg.cython_blas cimport dgemm


def _buf(dict scratch, str name, tuple shape):
    if scratch is None:
        return np.empty(shape)
    a = scratch.get(name)
    if a is None or a.shape != shape:
        a = np.empty(shape)
        scratch[name] = a
    return a


cdef void _gemm_cc(double* a, double* b, double* c,
                   int m_c, int n_c, int k_c,
                   bint ta, bint tb, int lda, int ldb) noexcept nogil:
    """C-order C(m_c, n_c) = opC(A) @ opC(B) via Fortran dgemm on swapped operands."""
    cdef char fa = b'T' if tb else b'N'
    cdef char fb = b'T' if ta else b'N'
    cdef int m = n_c, n = m_c, k = k_c
    cdef double one = 1.0, zero = 0.0
    cdef int ldc = n_c
    dgemm(&fa, &fb, &m, &n, &k, &one, b, &ldb, a, &lda, &zero, c, &ldc)


cdef void _im2col(double[:, :, :, ::1] x, double[:, ::1] cols,
                  Py_ssize_t kh, Py_ssize_t kw, Py_ssize_t sh, Py_ssize_t sw,
                  Py_ssize_t oh, Py_ssize_t ow) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1]
    cdef Py_ssize_t p_rows = c * kh * kw
    cdef Py_ssize_t p, q, ci, u, v, ni, i, j
    for p in prange(p_rows, schedule='static'):
        ci = p // (kh * kw)
        u = (p // kw) % kh
        v = p % kw
        for ni in range(n):
            for i in range(oh):
                q = (ni * oh + i) * ow
                for j in range(ow):
                    cols[p, q + j] = x[ni, ci, i * sh + u, j * sw + v]


def conv2d_forward_train(double[:, :, :, ::1] x, double[:, :, :, ::1] w,
                         double[::1] b, int sh, int sw, dict scratch=None):
    cdef Py_ssize_t n = x.shape[0], h = x.shape[2], wd = x.shape[3]
    cdef Py_ssize_t k = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef Py_ssize_t c = w.shape[1]
    cdef Py_ssize_t oh = (h - kh) // sh + 1, ow = (wd - kw) // sw + 1
    cdef Py_ssize_t p_rows = c * kh * kw, q_cols = n * oh * ow

    cols_arr = _buf(scratch, "cols", (p_rows, q_cols))
    y2_arr = _buf(scratch, "y2", (k, q_cols))
    y_arr = _buf(scratch, "y", (n, k, oh, ow))
    cdef double[:, ::1] cols = cols_arr
    cdef double[:, ::1] y2 = y2_arr
    cdef double[:, :, :, ::1] y = y_arr

    cdef Py_ssize_t q, ni, i, j, ki
    with nogil:
        _im2col(x, cols, kh, kw, sh, sw, oh, ow)
        _gemm_cc(&w[0, 0, 0, 0], &cols[0, 0], &y2[0, 0],
                 <int>k, <int>q_cols, <int>p_rows, 0, 0, <int>p_rows, <int>q_cols)
        for ni in prange(n, schedule='static'):
            for ki in range(k):
                for i in range(oh):
                    q = (ni * oh + i) * ow
                    for j in range(ow):
                        y[ni, ki, i, j] = y2[ki, q + j] + b[ki]
    return y_arr, cols_arr


def conv2d_forward(x, w, b, sh, sw):
    y, _ = conv2d_forward_train(x, w, b, sh, sw, None)
    return y


def conv2d_backward(double[:, :, :, ::1] x, double[:, :, :, ::1] w,
                    double[:, :, :, ::1] g, int sh, int sw,
                    cols=None, dict scratch=None, bint need_dx=True):
    cdef Py_ssize_t n = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3]
    cdef Py_ssize_t k = w.shape[0], kh = w.shape[2], kw = w.shape[3]
    cdef Py_ssize_t oh = g.shape[2], ow = g.shape[3]
    cdef Py_ssize_t p_rows = c * kh * kw, q_cols = n * oh * ow

    cdef bint fill_cols = cols is None
    if fill_cols:
        cols = _buf(scratch, "cols", (p_rows, q_cols))
    cdef double[:, ::1] cols_v = cols
    if fill_cols:
        with nogil:
            _im2col(x, cols_v, kh, kw, sh, sw, oh, ow)

    g2_arr = _buf(scratch, "g2", (k, q_cols))
    dw_arr = np.empty((k, c, kh, kw))
    db_arr = np.empty(k)
    cdef double[:, ::1] g2 = g2_arr
    cdef double[:, :, :, ::1] dw = dw_arr
    cdef double[::1] db = db_arr

    cdef Py_ssize_t p, q, ci, u, v, ni, i, j, ki
    cdef double acc
    with nogil:
        for ki in prange(k, schedule='static'):
            acc = 0.0
            for ni in range(n):
                for i in range(oh):
                    q = (ni * oh + i) * ow
                    for j in range(ow):
                        g2[ki, q + j] = g[ni, ki, i, j]
                        acc = acc + g[ni, ki, i, j]
            db[ki] = acc
        _gemm_cc(&g2[0, 0], &cols_v[0, 0], &dw[0, 0, 0, 0],
                 <int>k, <int>p_rows, <int>q_cols, 0, 1, <int>q_cols, <int>q_cols)
    if not need_dx:
        return None, dw_arr, db_arr

    dcols_arr = _buf(scratch, "dcols", (p_rows, q_cols))
    dx_arr = _buf(scratch, "dx", (n, c, h, wd))
    cdef double[:, ::1] dcols = dcols_arr
    cdef double[:, :, :, ::1] dx = dx_arr
    with nogil:
        _gemm_cc(&w[0, 0, 0, 0], &g2[0, 0], &dcols[0, 0],
                 <int>p_rows, <int>q_cols, <int>k, 1, 0, <int>p_rows, <int>q_cols)
        for ni in prange(n, schedule='static'):
            for ci in range(c):
                for i in range(h):
                    for j in range(wd):
                        dx[ni, ci, i, j] = 0.0
            for ci in range(c):
                for u in range(kh):
                    for v in range(kw):
                        p = (ci * kh + u) * kw + v
                        for i in range(oh):
                            q = (ni * oh + i) * ow
                            for j in range(ow):
                                dx[ni, ci, i * sh + u, j * sw + v] += dcols[p, q + j]
    return dx_arr, dw_arr, db_arr


def elu_forward_train(x, dict scratch=None):
    """Fused ELU value and derivative in one pass; returns (y, factor)."""
    xc = np.ascontiguousarray(x)
    y_arr = _buf(scratch, "elu_y", xc.shape)
    f_arr = _buf(scratch, "elu_f", xc.shape)
    cdef double[::1] xf = xc.ravel()
    cdef double[::1] yf = y_arr.ravel()
    cdef double[::1] ff = f_arr.ravel()
    cdef Py_ssize_t i, n = xf.shape[0]
    cdef double v, e
    for i in prange(n, nogil=True, schedule='static'):
        v = xf[i]
        if v >= 0.0:
            yf[i] = v
            ff[i] = 1.0
        else:
            e = exp(v)
            yf[i] = e - 1.0
            ff[i] = e
    return y_arr, f_arr


def elu_forward(x):
    xc = np.ascontiguousarray(x)
    y_arr = np.empty_like(xc)
    cdef double[::1] xf = xc.ravel()
    cdef double[::1] yf = y_arr.ravel()
    cdef Py_ssize_t i, n = xf.shape[0]
    cdef double v
    for i in prange(n, nogil=True, schedule='static'):
        v = xf[i]
        yf[i] = v if v >= 0.0 else exp(v) - 1.0
    return y_arr


def mul_inplace(g, f):
    """g *= f elementwise over contiguous equal-shape arrays."""
    cdef double[::1] gf = g.ravel()
    cdef double[::1] ff = f.ravel()
    cdef Py_ssize_t i, n = gf.shape[0]
    for i in prange(n, nogil=True, schedule='static'):
        gf[i] *= ff[i]
    return g
