"""Deterministic prime and coefficient sums: Mertens-type sums, Rankin-Selberg
partial sums, smooth/rough restricted sums and a Parseval check for finite
Dirichlet polynomials."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import LambdaTable
from .eulerprod import MAX_EXACT_P, per_prime_second_moment
from .primes import largest_prime_factor, primes_up_to, smallest_prime_factor

MAX_PARSEVAL_CUTOFF = 100


@dataclass
class SumTrace:
    reference: str
    checkpoints: list[tuple[float, float]] = field(default_factory=list)

    def add(self, x: float, value: float) -> None:
        if self.checkpoints and x <= self.checkpoints[-1][0]:
            raise ValueError("checkpoints must be strictly increasing in x")
        self.checkpoints.append((x, value))


def _fsum(a: np.ndarray) -> float:
    return math.fsum(a.tolist())


def mertens_lambda(x: int, lam: LambdaTable) -> float:
    """sum_{p<=x} lambda(p)**2 / p."""
    lam.require(x)
    p = primes_up_to(x)
    return _fsum(lam.values[p] ** 2 / p)


def mertens_classic(x: int) -> float:
    """sum_{p<=x} 1/p."""
    if x < 2:
        raise ValueError(f"x must be >= 2, got {x}")
    return _fsum(1.0 / primes_up_to(x))


def rankin_partial(x: int, lam: LambdaTable) -> float:
    """sum_{n<=x} lambda(n)**2."""
    lam.require(x)
    return _fsum(lam.values[1 : x + 1] ** 2)


def smoothness_cutoff(x: float) -> float:
    """x**(1/log log x), natural logs; needs x > e**e."""
    if x <= math.e**math.e:
        raise ValueError(f"x must exceed e**e, got {x}")
    return x ** (1 / math.log(math.log(x)))


def _smooth_mask(x: int) -> np.ndarray:
    lpf = largest_prime_factor(x)[1:]
    return lpf <= smoothness_cutoff(x)


def smooth_restricted_sum(x: int, lam: LambdaTable) -> float:
    """sum of lambda(n)**2 over n <= x with largest prime factor <= x**(1/log log x)."""
    if x < 100:
        raise ValueError(f"x must be >= 100, got {x}")
    lam.require(x)
    return _fsum(lam.values[1 : x + 1][_smooth_mask(x)] ** 2)


def smooth_restricted_complement(x: int, lam: LambdaTable) -> float:
    """The same sum over the n <= x that are not x**(1/log log x)-smooth."""
    if x < 100:
        raise ValueError(f"x must be >= 100, got {x}")
    lam.require(x)
    return _fsum(lam.values[1 : x + 1][~_smooth_mask(x)] ** 2)


def rough_sum(x: int, u: float, P: int, lam: LambdaTable) -> float:
    """sum of lambda(m)**2 over x**(1/log log x) < m <= u with every prime factor > P."""
    if not x ** 0.1 <= u <= x:
        raise ValueError(f"need x**0.1 <= u <= x, got u={u}, x={x}")
    if not P < u ** 0.1:
        raise ValueError(f"need P < u**0.1, got P={P}, u={u}")
    top = int(math.floor(u))
    lam.require(top, "u")
    lo = smoothness_cutoff(x)
    spf = smallest_prime_factor(top)
    m = np.arange(top + 1)
    keep = (m > lo) & (spf > P)
    return _fsum(lam.values[: top + 1][keep] ** 2)


def smooth_series(P: int, lam: LambdaTable) -> float:
    """sum over P-smooth n of lambda(n)**2 / n, as the Euler product of per-prime factors."""
    if P > MAX_EXACT_P:
        raise ValueError(f"P must be <= {MAX_EXACT_P}, got {P}")
    total = 1.0
    for p in primes_up_to(P).tolist():
        lam.require(p, "P")
        total *= per_prime_second_moment(float(lam[p]), p**-0.5)
    return total


def smooth_series_direct(P: int, lam: LambdaTable, truncation: int) -> float:
    """The same series summed directly over P-smooth n <= truncation."""
    lam.require(truncation, "truncation")
    lpf = largest_prime_factor(truncation)
    n = np.arange(1, truncation + 1)
    keep = lpf[1:] <= P
    return _fsum(lam.values[1 : truncation + 1][keep] ** 2 / n[keep])


# -- Parseval ------------------------------------------------------------------


def _coeffs(cutoff: int, lam: LambdaTable) -> tuple[np.ndarray, np.ndarray]:
    lam.require(cutoff, "cutoff")
    n = np.arange(1, cutoff + 1, dtype=np.float64)
    return n, lam.values[1 : cutoff + 1].copy()


def parseval_lhs(cutoff: int, sigma: float, lam: LambdaTable) -> float:
    """int_1^inf |A(x)|**2 x**(-1-2 sigma) dx for A(x) = sum_{n <= min(x, cutoff)} lambda(n), piecewise exact."""
    n, a = _coeffs(cutoff, lam)
    A = np.cumsum(a)
    # on [n, n+1) the partial sum is A(n); the last piece runs to infinity
    pieces = (n[:-1] ** (-2 * sigma) - n[1:] ** (-2 * sigma)) / (2 * sigma)
    body = _fsum(A[:-1] ** 2 * pieces)
    return body + A[-1] ** 2 * n[-1] ** (-2 * sigma) / (2 * sigma)


def parseval_rhs_closed(cutoff: int, sigma: float, lam: LambdaTable) -> float:
    """(1/2pi) int |F(sigma+it)|**2 / |sigma+it|**2 dt in closed form.

    Uses int cos(w t) / (sigma**2 + t**2) dt = (pi/sigma) exp(-sigma |w|).
    """
    n, a = _coeffs(cutoff, lam)
    c = a * n ** (-sigma)
    w = np.abs(np.log(n)[:, None] - np.log(n)[None, :])
    return float(c @ np.exp(-sigma * w) @ c / (2 * sigma))


def parseval_rhs_quadrature(cutoff: int, sigma: float, lam: LambdaTable, rtol: float = 1e-7) -> float:
    """(1/2pi) int |F(sigma+it)|**2 / |sigma+it|**2 dt by panelled Gauss-Legendre.

    |F|**2 splits into its mean D = sum |a_n|**2 n**(-2 sigma) plus oscillating
    cross terms. The integral is taken numerically on [0, T]; beyond T the mean
    part is added exactly and the cross terms are dropped, T being chosen so
    their tail, at most sum_{m!=n} 2|c_m c_n| / (|log(m/n)| (sigma**2 + T**2)),
    stays below rtol times the diagonal mass.
    """
    n, a = _coeffs(cutoff, lam)
    c = a * n ** (-sigma)
    logn = np.log(n)
    diag = float(np.sum(c * c))
    mass = diag / (2 * sigma)
    if len(n) > 1:
        gap = np.abs(logn[:, None] - logn[None, :])
        np.fill_diagonal(gap, np.inf)
        cross = float(np.sum(np.abs(np.outer(c, c)) * 2 / gap))
        T = max(10.0, math.sqrt(max(cross / (math.pi * rtol * mass) - sigma * sigma, 0.0)))
    else:
        T = 10.0
    # panels of width <= 0.25 near the peak, coarser further out
    edges = np.unique(np.concatenate([np.linspace(0, min(T, 20.0), 81), np.linspace(min(T, 20.0), T, max(2, int(T / 0.5)) + 1)]))
    nodes, weights = np.polynomial.legendre.leggauss(20)
    lo, hi = edges[:-1], edges[1:]
    mid, rad = (lo + hi) / 2, (hi - lo) / 2
    t = (mid[:, None] + rad[:, None] * nodes[None, :]).ravel()
    wts = (rad[:, None] * weights[None, :]).ravel()
    total = 0.0
    for start in range(0, len(t), 200_000):
        tt = t[start : start + 200_000]
        F = np.exp(-1j * np.outer(tt, logn)) @ c
        total += _fsum((np.abs(F) ** 2 / (sigma * sigma + tt * tt)) * wts[start : start + 200_000])
    tail = diag * (math.pi / 2 - math.atan(T / sigma)) / sigma
    # the integrand is even in t
    return (2 * total + 2 * tail) / (2 * math.pi)


def parseval_check(cutoff: int, sigma: float, lam: LambdaTable) -> tuple[float, float]:
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not 1 <= cutoff <= MAX_PARSEVAL_CUTOFF:
        raise ValueError(f"cutoff must lie in [1, {MAX_PARSEVAL_CUTOFF}], got {cutoff}")
    return parseval_lhs(cutoff, sigma, lam), parseval_rhs_quadrature(cutoff, sigma, lam)
