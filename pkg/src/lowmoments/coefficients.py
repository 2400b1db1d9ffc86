"""Hecke eigenvalues of the discriminant form Delta (weight 12, level 1).

Two independent routes:

* exact: tau(n) as the coefficient of q**(n-1) in prod (1 - q**m)**24, obtained
  as the eighth power of Jacobi's series sum (-1)**m (2m+1) q**(m(m+1)/2) by
  three multi-prime NTT squarings;
* multiplicative: given lambda(p) on primes, fill every lambda(n) from the
  Hecke relation lambda(p**(a+1)) = lambda(p) lambda(p**a) - lambda(p**(a-1)).
"""

from __future__ import annotations

import io
import math
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .ntt import crt_reconstruct, modulus_bits, truncated_power
from .primes import divisor_counts, primes_up_to

WEIGHT = 12
EXPONENT = (WEIGHT - 1) / 2  # lambda(n) = tau(n) / n**5.5
EXACT_DEFAULT = 10**5
EXACT_CAP = 10**6
CACHE_MAGIC = b"TAU1"
CACHE_VERSION = 1
CACHE_ENV = "LOWMOMENTS_CACHE_DIR"


@dataclass(frozen=True)
class EtaCubeSeries:
    limit: int
    terms: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class TauTable:
    """Exact tau(1..N); `values[n - 1]` is tau(n)."""

    limit: int
    values: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise IndexError(f"tau({n}) outside table 1..{self.limit}")
        return self.values[n - 1]


@dataclass(frozen=True, eq=False)
class LambdaTable:
    """lambda(0..N) as float64; index 0 is an unused 0.0 slot so values[n] = lambda(n)."""

    limit: int
    values: np.ndarray = field(repr=False)
    weight: int = WEIGHT

    def __post_init__(self):
        self.values.setflags(write=False)

    def __getitem__(self, n):
        return self.values[n]

    def require(self, n: int, what: str = "x") -> None:
        if n > self.limit:
            raise ValueError(f"{what}={n} exceeds lambda table limit {self.limit}")


def expand_eta_cube(limit: int) -> EtaCubeSeries:
    """Jacobi's sparse series for prod (1 - q**m)**3, exponents <= limit."""
    if limit < 0:
        raise ValueError(f"limit must be >= 0, got {limit}")
    terms = []
    m = 0
    while m * (m + 1) // 2 <= limit:
        terms.append((m * (m + 1) // 2, (-1) ** m * (2 * m + 1)))
        m += 1
    return EtaCubeSeries(limit, tuple(terms))


def deligne_bound(n: int) -> int:
    """An integer >= d(m) * m**5.5 for every m <= n."""
    # d(m) <= 2 sqrt(m) for all m
    return 2 * n**6 + 1


def tau_exact(N: int) -> TauTable:
    """tau(1..N) exactly, via (eta cube series)**8 with three NTT squarings.

    Residue capacity: the six NTT primes multiply to a 186-bit modulus M. The
    CRT output is exact whenever |tau(n)| < M/2; by Deligne |tau(n)| <=
    d(n) n**5.5 <= 2 n**6 < 2**121 for n <= 1e6, leaving more than 60 bits
    of margin. Intermediate squarings stay modular, so no convolution-length
    headroom enters the bound.
    """
    if not 1 <= N <= EXACT_CAP:
        raise ValueError(f"N must lie in [1, {EXACT_CAP}], got {N}")
    series = expand_eta_cube(N - 1)
    bound = deligne_bound(N)
    assert 2 * bound < 2 ** (modulus_bits() - 1)
    residues = truncated_power(list(series.terms), N, squarings=3)
    return TauTable(N, tuple(crt_reconstruct(residues, bound)))


def tau_bruteforce(N: int) -> TauTable:
    """O(N**2) oracle from the log-derivative of prod (1 - q**m)**24.

    With a(n) the coefficient of q**n, n a(n) = -24 sum_{k=1..n} sigma(k) a(n-k),
    and tau(n) = a(n-1).
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    sigma = [0] * N
    for d in range(1, N):
        for m in range(d, N, d):
            sigma[m] += d
    a = [1] + [0] * (N - 1)
    for n in range(1, N):
        acc = sum(sigma[k] * a[n - k] for k in range(1, n + 1))
        q, r = divmod(-24 * acc, n)
        assert r == 0
        a[n] = q
    return TauTable(N, tuple(a))


def lambda_from_tau(tau: TauTable) -> LambdaTable:
    n = np.arange(1, tau.limit + 1, dtype=np.float64)
    t = np.array([float(v) for v in tau.values], dtype=np.float64)
    vals = np.zeros(tau.limit + 1)
    vals[1:] = t / np.power(n, EXPONENT)
    vals[1] = 1.0
    return LambdaTable(tau.limit, vals)


def lambda_extend_hecke(prime_values: Mapping[int, float], N: int) -> LambdaTable:
    """Multiplicative fill of lambda(1..N) from its values on primes.

    Each lambda(n) is the product of lambda(p**a) over p**a || n, taken in
    increasing order of p, so the result does not depend on evaluation order.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    vals = np.ones(N + 1)
    vals[0] = 0.0
    scratch = np.empty(N + 1)
    for p in primes_up_to(N).tolist():
        if p not in prime_values:
            raise ValueError(f"missing lambda value for prime {p}")
        lp = float(prime_values[p])
        if p * p > N:
            vals[p::p] *= lp
            continue
        prev, cur = 1.0, lp
        pk = p
        while pk <= N:
            scratch[pk::pk] = cur  # higher powers overwrite
            prev, cur = cur, lp * cur - prev
            pk *= p
        vals[p::p] *= scratch[p::p]
    return LambdaTable(N, vals)


def lambda_table(N: int = EXACT_DEFAULT, cache: bool = True) -> LambdaTable:
    """lambda(1..N): exact route up to the cap, Hecke extension beyond it."""
    if N <= EXACT_CAP:
        return lambda_from_tau(load_or_build_tau(N) if cache else tau_exact(N))
    base = lambda_from_tau(load_or_build_tau(EXACT_CAP) if cache else tau_exact(EXACT_CAP))
    primes = primes_up_to(N)
    if primes[-1] > EXACT_CAP:
        raise ValueError(f"N={N} needs lambda(p) for primes beyond the exact cap {EXACT_CAP}")
    return lambda_extend_hecke({p: base[p] for p in primes.tolist()}, N)


def deligne_violations(lam: LambdaTable, slack: float = 1e-12) -> np.ndarray:
    """n <= N with |lambda(n)| > d(n) (beyond rounding slack)."""
    d = divisor_counts(lam.limit)
    n = np.arange(1, lam.limit + 1)
    bad = np.abs(lam.values[1:]) > d[1:] * (1 + slack)
    return n[bad]


# -- serialisation -----------------------------------------------------------


def write_csv(tau: TauTable, lam: LambdaTable, out) -> None:
    out.write("n,tau,lambda\n")
    for n in range(1, tau.limit + 1):
        out.write(f"{n},{tau[n]},{lam[n]:.17g}\n")


def _put_varint(buf: bytearray, value: int) -> None:
    u = (abs(value) << 1) | (1 if value < 0 else 0)
    while True:
        byte = u & 0x7F
        u >>= 7
        if u:
            buf.append(byte | 0x80)
        else:
            buf.append(byte)
            return


def _get_varint(data: bytes, pos: int) -> tuple[int, int]:
    shift = u = 0
    while True:
        byte = data[pos]
        pos += 1
        u |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            break
    mag = u >> 1
    return (-mag if u & 1 else mag), pos


def encode_cache(tau: TauTable, lam: LambdaTable) -> bytes:
    buf = bytearray(CACHE_MAGIC)
    buf.append(CACHE_VERSION)
    buf += struct.pack("<Q", tau.limit)
    for n in range(1, tau.limit + 1):
        _put_varint(buf, tau[n])
        buf += struct.pack("<d", lam[n])
    return bytes(buf)


def decode_cache(data: bytes) -> tuple[TauTable, LambdaTable]:
    if data[:4] != CACHE_MAGIC:
        raise ValueError("not a tau cache file (bad magic)")
    if data[4] != CACHE_VERSION:
        raise ValueError(f"unsupported cache version {data[4]}")
    (N,) = struct.unpack_from("<Q", data, 5)
    pos = 13
    taus = []
    lam = np.zeros(N + 1)
    for n in range(1, N + 1):
        t, pos = _get_varint(data, pos)
        taus.append(t)
        (lam[n],) = struct.unpack_from("<d", data, pos)
        pos += 8
    if pos != len(data):
        raise ValueError("trailing bytes in tau cache")
    return TauTable(N, tuple(taus)), LambdaTable(N, lam)


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "lowmoments"))


def cache_path(N: int) -> Path:
    return cache_dir() / f"tau_N{N}_v{CACHE_VERSION}.bin"


def load_or_build_tau(N: int) -> TauTable:
    """tau(1..N) from the binary cache, building and storing it on a miss."""
    path = cache_path(N)
    if path.exists():
        try:
            return decode_cache(path.read_bytes())[0]
        except (ValueError, IndexError, struct.error):
            pass  # corrupt cache: rebuild
    tau = tau_exact(N)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(encode_cache(tau, lambda_from_tau(tau)))
        tmp.replace(path)
    except OSError:
        pass
    return tau


def csv_text(tau: TauTable, lam: LambdaTable) -> str:
    out = io.StringIO()
    write_csv(tau, lam, out)
    return out.getvalue()
