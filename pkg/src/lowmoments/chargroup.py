"""Dirichlet characters modulo a prime, twisted sums and their low moments.

Characters are chi_t(n) = exp(2 pi i t ind(n) / (q - 1)) with ind the discrete
logarithm to the smallest primitive root. All q - 1 twisted sums
S_t = sum_{n <= x} chi_t(n) lambda(n) come out of one length-(q - 1) DFT of
the index-bucketed coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import LambdaTable
from .czt import dft_positive
from .primes import factorize, is_prime

MAX_MODULUS = 10**7 + 19
MAX_DIRECT_MODULUS = 10**4


@dataclass(frozen=True, eq=False)
class CharacterGroup:
    q: int
    g: int
    index: np.ndarray = field(repr=False)  # index[g**k % q] = k; index[0] = -1

    @property
    def order(self) -> int:
        return self.q - 1


@dataclass(frozen=True, eq=False)
class CharSumVector:
    q: int
    x: int
    sums: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class MomentEntry:
    k: float
    moment: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.moment / self.bound


@dataclass
class MomentReport:
    q: int
    x: int
    entries: list[MomentEntry] = field(default_factory=list)


def find_primitive_root(q: int) -> int:
    if q < 3 or not is_prime(q):
        raise ValueError(f"q must be an odd prime, got {q}")
    cofactors = [(q - 1) // r for r in factorize(q - 1)]
    g = 2
    while any(pow(g, c, q) == 1 for c in cofactors):
        g += 1
    return g


def build_group(q: int) -> CharacterGroup:
    if q > MAX_MODULUS:
        raise ValueError(f"q={q} exceeds supported modulus {MAX_MODULUS}")
    g = find_primitive_root(q)
    index = np.full(q, -1, dtype=np.int64)
    # powers of g by blocks: pw[k] = g**k mod q, built with doubling in int64
    pw = np.empty(q - 1, dtype=np.int64)
    pw[0] = 1
    filled, step = 1, g
    while filled < q - 1:
        take = min(filled, q - 1 - filled)
        pw[filled : filled + take] = pw[:take] * step % q
        filled += take
        step = step * step % q
    index[pw] = np.arange(q - 1, dtype=np.int64)
    if np.any(index[1:] < 0):
        raise AssertionError(f"{g} is not a primitive root mod {q}")
    index.setflags(write=False)
    return CharacterGroup(q, g, index)


def _check_range(group: CharacterGroup, x: int, lam: LambdaTable) -> None:
    if not 1 <= x <= group.q:
        raise ValueError(f"x must lie in [1, q={group.q}], got {x}")
    lam.require(x)


def index_buckets(group: CharacterGroup, x: int, lam: LambdaTable) -> np.ndarray:
    """a[k] = sum of lambda(n) over n <= x, q not dividing n, ind(n) = k."""
    n = np.arange(1, x + 1)
    n = n[n % group.q != 0]
    return np.bincount(group.index[n], weights=lam.values[n], minlength=group.order)


def all_char_sums(group: CharacterGroup, x: int, lam: LambdaTable) -> CharSumVector:
    _check_range(group, x, lam)
    return CharSumVector(group.q, x, dft_positive(index_buckets(group, x, lam)))


def brute_char_sums(group: CharacterGroup, x: int, lam: LambdaTable) -> CharSumVector:
    """Literal evaluation of every S_t; O(q x)."""
    if group.q > MAX_DIRECT_MODULUS:
        raise ValueError(f"direct evaluation limited to q <= {MAX_DIRECT_MODULUS}, got {group.q}")
    _check_range(group, x, lam)
    n = np.arange(1, x + 1)
    n = n[n % group.q != 0]
    ind = group.index[n]
    coeff = lam.values[n]
    m = group.order
    sums = np.empty(m, dtype=np.complex128)
    for t in range(m):
        sums[t] = np.sum(coeff * np.exp(2j * np.pi * ((t * ind) % m) / m))
    return CharSumVector(group.q, x, sums)


def moment(sums: CharSumVector, k: float) -> float:
    """(1/(q-1)) sum_t |S_t|**(2k), principal character included, 0**0 = 1."""
    if not 0 <= k <= 1:
        raise ValueError(f"k must lie in [0, 1], got {k}")
    if k == 0:
        return 1.0
    return float(np.mean(np.abs(sums.sums) ** (2 * k)))


def theorem_bound(x: int, q: int, k: float) -> float:
    """(x / (1 + (1-k) sqrt(log log 10L)))**k with L = min(x, q/x)."""
    if not 0 <= k <= 1:
        raise ValueError(f"k must lie in [0, 1], got {k}")
    if not 1 <= x <= q:
        raise ValueError(f"x must lie in [1, q], got x={x}, q={q}")
    L = min(x, q / x)
    if 10 * L <= math.e:
        raise ValueError(f"10L = {10 * L} must exceed e")
    return (x / (1 + (1 - k) * math.sqrt(math.log(math.log(10 * L))))) ** k


def moment_report(group: CharacterGroup, x: int, lam: LambdaTable, ks, method: str = "transform") -> MomentReport:
    if method == "transform":
        sums = all_char_sums(group, x, lam)
    elif method == "direct":
        sums = brute_char_sums(group, x, lam)
    else:
        raise ValueError(f"unknown method {method!r}")
    report = MomentReport(group.q, x)
    for k in ks:
        report.entries.append(MomentEntry(float(k), moment(sums, k), theorem_bound(x, group.q, k)))
    return report
