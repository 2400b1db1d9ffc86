"""Sieves and small arithmetic helpers shared by every module."""

from __future__ import annotations

import numpy as np


def primes_up_to(n: int) -> np.ndarray:
    """All primes p <= n as an int64 array (Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mark = np.ones(n + 1, dtype=bool)
    mark[:2] = False
    mark[4::2] = False
    for p in range(3, int(n**0.5) + 1, 2):
        if mark[p]:
            mark[p * p :: 2 * p] = False
    return np.flatnonzero(mark).astype(np.int64)


def smallest_prime_factor(n: int) -> np.ndarray:
    """spf[m] for 0 <= m <= n; spf[0] = 0, spf[1] = 1."""
    spf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        spf[1] = 1
    for p in primes_up_to(int(n**0.5)):
        block = spf[p * p :: p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest[rest >= 2]] = rest[rest >= 2]
    return spf


def largest_prime_factor(n: int) -> np.ndarray:
    """lpf[m] for 0 <= m <= n; lpf[0] = 0, lpf[1] = 1."""
    lpf = np.zeros(n + 1, dtype=np.int64)
    if n >= 1:
        lpf[1] = 1
    for p in primes_up_to(n):
        lpf[p::p] = p  # later (larger) primes overwrite
    return lpf


def divisor_counts(n: int) -> np.ndarray:
    """d(m) for 0 <= m <= n (d(0) is set to 0)."""
    d = np.zeros(n + 1, dtype=np.int64)
    for k in range(1, n + 1):
        d[k::k] += 1
    return d


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; fine for n up to ~1e12."""
    out: dict[int, int] = {}
    m = n
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out
