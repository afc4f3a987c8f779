"""Mixed-radix FFT over products of cyclic groups.

The compiled kernel from ``tfq._kernels`` is used when it imports; otherwise the
numpy implementation in ``tfq._fft_py`` takes over. Set ``TFQ_BACKEND=python``
to force the fallback.
"""

import os

import numpy as np

from tfq import _fft_py

try:
    from tfq import _kernels
except ImportError:  # extension not built
    _kernels = None

_BACKENDS = {"python": _fft_py.fft_rows}
if _kernels is not None:
    _BACKENDS["cython"] = _kernels.fft_rows

if os.environ.get("TFQ_BACKEND", "").lower() == "python" or _kernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


def available_backends():
    return sorted(_BACKENDS)


def fft_rows(x, sign=-1, backend=None):
    """Unnormalised DFT of each row of ``x`` with kernel ``exp(sign*2*pi*i*jk/n)``."""
    name = backend or BACKEND
    if name not in _BACKENDS:
        raise ValueError(f"unknown FFT backend {name!r}; available: {', '.join(available_backends())}")
    return _BACKENDS[name](x, sign)


def fftn(x, axes=None, sign=-1, backend=None):
    """Row-column DFT of ``x`` over ``axes`` (all axes by default), unnormalised."""
    x = np.asarray(x, dtype=np.complex128)
    if axes is None:
        axes = range(x.ndim)
    for ax in axes:
        if x.shape[ax] == 1:
            continue
        moved = np.moveaxis(x, ax, -1)
        shape = moved.shape
        rows = fft_rows(moved.reshape(-1, shape[-1]), sign, backend)
        x = np.moveaxis(rows.reshape(shape), -1, ax)
    return np.ascontiguousarray(x)
