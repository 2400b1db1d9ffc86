"""Steinhaus random multiplicative functions and Monte Carlo moments of sum h(n) lambda(n).

Phases come from Philox, a counter-based generator: trial i of a run with
seed s draws from the stream keyed by (s, i), and the j-th prime takes the
j-th draw of that stream. A trial's phases therefore depend only on
(seed, trial, prime), never on batch layout or worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .coefficients import LambdaTable
from .primes import primes_up_to, smallest_prime_factor

CHUNK = 256  # trials per work unit; fixed so results never depend on worker count
_MASK64 = (1 << 64) - 1


def _stream(seed: int, trial: int) -> np.random.Generator:
    key = (seed & _MASK64) | ((trial & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def draw_phases(count: int, seed: int, trial: int = 0) -> np.ndarray:
    """`count` uniform phases in [0, 2 pi) from the (seed, trial) stream."""
    return 2 * np.pi * _stream(seed, trial).random(count)


def phase_block(count: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Rows start..stop-1 of the (trial, prime-index) phase matrix."""
    out = np.empty((stop - start, count))
    for r, trial in enumerate(range(start, stop)):
        out[r] = draw_phases(count, seed, trial)
    return out


@dataclass(frozen=True, eq=False)
class PhaseAssignment:
    seed: int
    limit: int
    primes: np.ndarray = field(repr=False)
    phases: np.ndarray = field(repr=False)

    def h(self, p: int) -> complex:
        i = np.searchsorted(self.primes, p)
        if i >= len(self.primes) or self.primes[i] != p:
            raise ValueError(f"{p} is not a prime <= {self.limit}")
        return complex(np.exp(1j * self.phases[i]))

    def on_primes(self) -> np.ndarray:
        return np.exp(1j * self.phases)


def sample_phases(limit: int, seed: int, trial: int = 0) -> PhaseAssignment:
    if limit < 2:
        raise ValueError(f"limit must be >= 2, got {limit}")
    primes = primes_up_to(limit)
    return PhaseAssignment(seed, limit, primes, draw_phases(len(primes), seed, trial))


def fixed_phases(limit: int, phases) -> PhaseAssignment:
    """Phase assignment with caller-chosen values (e.g. all zero), seed -1."""
    primes = primes_up_to(limit)
    arr = np.broadcast_to(np.asarray(phases, dtype=np.float64), primes.shape).copy()
    return PhaseAssignment(-1, limit, primes, arr)


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    trials: int
    seed: int

    @classmethod
    def from_samples(cls, samples: np.ndarray, seed: int) -> "MCEstimate":
        n = len(samples)
        se = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(float(np.mean(samples)), se, n, seed)


def h_value(n: int, phases: PhaseAssignment) -> complex:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    theta = 0.0
    m, p = n, 2
    while m > 1:
        if p * p > m:
            p = m
        a = 0
        while m % p == 0:
            m //= p
            a += 1
        if a:
            if p > phases.limit:
                raise ValueError(f"prime factor {p} of {n} exceeds phase limit {phases.limit}")
            i = np.searchsorted(phases.primes, p)
            theta += a * phases.phases[i]
        p += 1
    return complex(np.exp(1j * theta))


@lru_cache(maxsize=4)
def exponent_matrix(x: int) -> sp.csr_matrix:
    """Sparse (x, pi(x)) matrix E with E[n-1, j] = exponent of the j-th prime in n."""
    spf = smallest_prime_factor(x)
    primes = primes_up_to(x)
    pos = np.zeros(x + 1, dtype=np.int64)
    pos[primes] = np.arange(len(primes))
    rows, cols = [], []
    m = np.arange(1, x + 1)
    n = m.copy()
    while True:
        live = m > 1
        if not live.any():
            break
        p = spf[m[live]]
        rows.append(n[live] - 1)
        cols.append(pos[p])
        m[live] //= p
    r = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    c = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    E = sp.csr_matrix((np.ones(len(r)), (r, c)), shape=(x, len(primes)))
    E.sum_duplicates()
    E.sort_indices()
    return E


def twisted_random_sum(x: int, lam: LambdaTable, phases: PhaseAssignment) -> complex:
    lam.require(x)
    if x > phases.limit and x >= 2:
        raise ValueError(f"x={x} exceeds phase coverage {phases.limit}")
    if x < 1:
        return 0j
    E = exponent_matrix(x)
    theta = E @ phases.phases[: E.shape[1]]
    return complex(np.sum(lam.values[1 : x + 1] * np.exp(1j * theta)))


def _chunk_sums(x: int, lam_x: np.ndarray, seed: int, start: int, stop: int) -> np.ndarray:
    E = exponent_matrix(x)
    theta = phase_block(E.shape[1], seed, start, stop)
    big = (E @ theta.T).T  # (trials, x)
    return np.sum(np.exp(1j * big) * lam_x, axis=1)


def _chunks(trials: int):
    return [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]


def trial_sums(x: int, trials: int, seed: int, lam: LambdaTable, workers: int = 1) -> np.ndarray:
    """S_i = sum_{n<=x} h_i(n) lambda(n) for trials i = 0..trials-1."""
    lam.require(x)
    lam_x = lam.values[1 : x + 1]
    exponent_matrix(x)  # build once before threads share it
    jobs = _chunks(trials)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda j: _chunk_sums(x, lam_x, seed, *j), jobs))
    else:
        parts = [_chunk_sums(x, lam_x, seed, *j) for j in jobs]
    return np.concatenate(parts)


def mc_moment(x: int, k: float, trials: int, seed: int, lam: LambdaTable, workers: int = 1) -> MCEstimate:
    """Mean and standard error of |sum_{n<=x} h(n) lambda(n)|**(2k)."""
    if not 0 <= k <= 1:
        raise ValueError(f"k must lie in [0, 1], got {k}")
    if trials < 2:
        raise ValueError(f"trials must be >= 2, got {trials}")
    if k == 0:
        return MCEstimate(1.0, 0.0, trials, seed)
    s = trial_sums(x, trials, seed, lam, workers)
    return MCEstimate.from_samples(np.abs(s) ** (2 * k), seed)
