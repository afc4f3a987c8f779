"""Pure numpy mixed-radix FFT, used when the compiled kernel is unavailable.

Same algorithm as ``_kernels.pyx`` (decimation in time by the smallest prime
factor), but each level is vectorised over the whole batch so the recursion
depth equals the number of prime factors rather than the number of subsequences.
"""

from functools import lru_cache

import numpy as np


def smallest_prime_factor(n):
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


@lru_cache(maxsize=256)
def _dft_matrix(p, sign):
    k = np.arange(p)
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / p)


@lru_cache(maxsize=256)
def _twiddles(p, m, sign):
    return np.exp(sign * 2j * np.pi * np.outer(np.arange(p), np.arange(m)) / (p * m))


def fft_rows(x, sign):
    """Unnormalised DFT along the last axis of a 2-D array ``(batch, n)``."""
    x = np.asarray(x, dtype=np.complex128)
    batch, n = x.shape
    if n <= 1:
        return x.copy()
    p = smallest_prime_factor(n)
    m = n // p
    if m == 1:
        return x @ _dft_matrix(p, sign).T
    # sub[:, r, :] is the decimated sequence x[:, r::p]
    sub = x.reshape(batch, m, p).transpose(0, 2, 1).reshape(batch * p, m)
    y = fft_rows(sub, sign).reshape(batch, p, m)
    y = y * _twiddles(p, m, sign)
    out = np.einsum("sr,brk->bsk", _dft_matrix(p, sign), y)
    return out.reshape(batch, n)
