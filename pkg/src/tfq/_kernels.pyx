# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled mixed-radix FFT kernel.

Recursive decimation in time over the prime factorisation of the length,
with a generic radix-p butterfly and a twiddle table shared by all levels.
"""

import numpy as np
from libc.math cimport cos, sin, M_PI
from libc.stdlib cimport malloc, free


cdef int _factorize(Py_ssize_t n, Py_ssize_t* out):
    cdef int nf = 0
    cdef Py_ssize_t p = 2
    while n > 1:
        if p * p > n:
            out[nf] = n
            nf += 1
            break
        if n % p == 0:
            out[nf] = p
            nf += 1
            n //= p
        else:
            p += 1 if p == 2 else 2
    return nf


cdef void _work(double complex* fout, const double complex* f, Py_ssize_t fstride,
                Py_ssize_t* factors, int level, Py_ssize_t n,
                const double complex* tw, Py_ssize_t nfull,
                double complex* scratch) noexcept nogil:
    cdef Py_ssize_t p = factors[level]
    cdef Py_ssize_t m = n // p
    cdef Py_ssize_t q, u, s, idx, step
    cdef double complex acc, t
    if m == 1:
        for q in range(p):
            fout[q] = f[q * fstride]
    else:
        for q in range(p):
            _work(fout + q * m, f + q * fstride, fstride * p, factors, level + 1,
                  m, tw, nfull, scratch)

    if p == 2:
        for u in range(m):
            t = fout[u + m] * tw[u * fstride]
            fout[u + m] = fout[u] - t
            fout[u] = fout[u] + t
        return

    step = m * fstride
    for u in range(m):
        for q in range(p):
            scratch[q] = fout[u + q * m] * tw[(q * u * fstride) % nfull]
        for s in range(p):
            acc = scratch[0]
            idx = 0
            for q in range(1, p):
                idx += s * step
                if idx >= nfull:
                    idx -= nfull * (idx // nfull)
                acc = acc + scratch[q] * tw[idx]
            fout[u + s * m] = acc


def fft_rows(x, int sign):
    """Unnormalised DFT of every row of a 2-D complex array.

    ``sign`` is the exponent sign: -1 gives ``sum_j x[j] exp(-2 pi i jk/n)``.
    """
    cdef double complex[:, ::1] src = np.ascontiguousarray(x, dtype=np.complex128)
    cdef Py_ssize_t batch = src.shape[0]
    cdef Py_ssize_t n = src.shape[1]
    out_arr = np.empty((batch, n), dtype=np.complex128)
    if n == 0 or batch == 0:
        return out_arr
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t factors[64]
    cdef int nf = _factorize(n, factors)
    cdef Py_ssize_t pmax = 1
    cdef Py_ssize_t j, r
    for j in range(nf):
        if factors[j] > pmax:
            pmax = factors[j]
    cdef double complex* tw = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* scratch = <double complex*> malloc(pmax * sizeof(double complex))
    if tw == NULL or scratch == NULL:
        free(tw)
        free(scratch)
        raise MemoryError()
    cdef double ang
    for j in range(n):
        ang = sign * 2.0 * M_PI * j / n
        tw[j] = cos(ang) + 1j * sin(ang)
    try:
        if n == 1:
            for r in range(batch):
                out[r, 0] = src[r, 0]
        else:
            with nogil:
                for r in range(batch):
                    _work(&out[r, 0], &src[r, 0], 1, factors, 0, n, tw, n, scratch)
    finally:
        free(tw)
        free(scratch)
    return out_arr
