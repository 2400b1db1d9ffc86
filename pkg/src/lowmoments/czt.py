"""Arbitrary-length DFT by Bluestein's chirp-z embedding into a power-of-two FFT."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=8)
def _chirp(m: int) -> tuple[np.ndarray, np.ndarray, int]:
    # exp(i pi j^2 / m) with j^2 reduced mod 2m so the phase argument stays small
    j = np.arange(m, dtype=np.int64)
    c = np.exp(1j * np.pi * ((j * j) % (2 * m)) / m)
    size = 1
    while size < 2 * m - 1:
        size *= 2
    kernel = np.zeros(size, dtype=np.complex128)
    kernel[:m] = np.conj(c)
    if m > 1:
        kernel[size - m + 1 :] = np.conj(c[1:][::-1])
    c.setflags(write=False)
    return c, np.fft.fft(kernel), size


def dft_positive(a: np.ndarray) -> np.ndarray:
    """S_t = sum_k a_k exp(2 pi i t k / m) for t = 0..m-1, any length m.

    Uses t k = (t^2 + k^2 - (t - k)^2) / 2, turning the sum into a linear
    convolution with the conjugate chirp.
    """
    a = np.asarray(a, dtype=np.complex128)
    m = a.shape[0]
    if m == 0:
        return a.copy()
    c, kernel_f, size = _chirp(m)
    buf = np.zeros(size, dtype=np.complex128)
    buf[:m] = a * c
    conv = np.fft.ifft(np.fft.fft(buf) * kernel_f)
    return c * conv[:m]


def dft_direct(a: np.ndarray) -> np.ndarray:
    """O(m^2) reference for dft_positive."""
    a = np.asarray(a, dtype=np.complex128)
    m = a.shape[0]
    k = np.arange(m)
    out = np.empty(m, dtype=np.complex128)
    for t in range(m):
        out[t] = np.sum(a * np.exp(2j * np.pi * ((t * k) % m) / m))
    return out
