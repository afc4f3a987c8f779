import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfq import _fft_py, fft

BACKENDS = fft.available_backends()


def dft_oracle(x, sign):
    n = x.shape[-1]
    k = np.arange(n)
    return x @ np.exp(sign * 2j * np.pi * np.outer(k, k) / n).T


def test_python_backend_always_available():
    assert "python" in BACKENDS


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 16, 27, 30, 49, 64, 97, 210, 256])
@pytest.mark.parametrize("sign", [-1, 1])
def test_rows_match_dft(backend, n, sign):
    x = np.random.default_rng(n).normal(size=(3, n)) + 1j * np.random.default_rng(n + 1).normal(size=(3, n))
    y = fft.fft_rows(x, sign, backend)
    assert np.max(np.abs(y - dft_oracle(x, sign))) < 1e-9 * max(1, n)
    if sign == -1:
        assert np.max(np.abs(y - np.fft.fft(x, axis=1))) < 1e-9 * max(1, n)


@pytest.mark.parametrize("backend", BACKENDS)
def test_fftn_matches_numpy(backend):
    x = np.random.default_rng(0).normal(size=(2, 6, 9)) + 0j
    assert np.max(np.abs(fft.fftn(x, backend=backend) - np.fft.fftn(x))) < 1e-10
    assert np.max(np.abs(fft.fftn(x, axes=(0, 2), sign=1, backend=backend) - np.fft.ifftn(x, axes=(0, 2)) * 18)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 120), st.sampled_from([-1, 1]))
def test_backends_agree(n, sign):
    x = np.random.default_rng(n).normal(size=(2, n)) + 0j
    ref = dft_oracle(x, sign)
    for backend in BACKENDS:
        assert np.max(np.abs(fft.fft_rows(x, sign, backend) - ref)) < 1e-9 * n


def test_smallest_prime_factor():
    assert [_fft_py.smallest_prime_factor(n) for n in (2, 9, 15, 49, 97)] == [2, 3, 3, 7, 97]


def test_unknown_backend():
    with pytest.raises(ValueError):
        fft.fft_rows(np.zeros((1, 4), complex), -1, "fortran")


def test_environment_forces_python_backend():
    code = "from tfq import fft; print(fft.BACKEND)"
    env = {**os.environ, "TFQ_BACKEND": "python"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
