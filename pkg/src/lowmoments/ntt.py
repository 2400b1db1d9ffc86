"""Exact truncated polynomial arithmetic by multi-prime number-theoretic transforms.

Each prime is below 2**31, so residue products stay below 2**62 and fit in
uint64 without a 128-bit multiply. Arithmetic stays modular for the whole
pipeline and the integers are reconstructed once, at the end, by Garner's
mixed-radix CRT.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# (prime, primitive root); every prime is c * 2**k + 1 with k >= 22.
NTT_PRIMES: tuple[tuple[int, int], ...] = (
    (2130706433, 3),  # 127 * 2**24 + 1
    (2113929217, 5),  # 63 * 2**25 + 1
    (2088763393, 5),  # 249 * 2**23 + 1
    (2013265921, 31),  # 15 * 2**27 + 1
    (1811939329, 13),  # 27 * 2**26 + 1
    (1711276033, 29),  # 51 * 2**25 + 1
)
MAX_LOG2_LENGTH = 22


class ReconstructionOverflow(RuntimeError):
    """A CRT-reconstructed value reached the edge of the residue range.

    The modulus product is sized so this cannot happen for in-range inputs;
    seeing it means the sizing argument was violated.
    """


def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _powers(w: int, count: int, p: int) -> np.ndarray:
    """[w**0, ..., w**(count-1)] mod p, by doubling."""
    out = np.ones(count, dtype=np.uint64)
    if count > 1:
        out[1] = w % p
    filled = 2 if count > 1 else 1
    step = w * w % p
    while filled < count:
        take = min(filled, count - filled)
        out[filled : filled + take] = out[:take] * np.uint64(step) % np.uint64(p)
        filled += take
        step = step * step % p
    return out


@dataclass(frozen=True)
class NTTPlan:
    """Bit-reversal table plus per-prime twiddle tables for one length."""

    length: int
    rev: np.ndarray
    forward: tuple[np.ndarray, ...]
    inverse: tuple[np.ndarray, ...]
    inv_length: tuple[int, ...]

    @classmethod
    def build(cls, length: int, primes=NTT_PRIMES) -> "NTTPlan":
        if length & (length - 1) or length < 2:
            raise ValueError(f"transform length must be a power of two >= 2, got {length}")
        if length.bit_length() - 1 > MAX_LOG2_LENGTH:
            raise ValueError(f"transform length 2**{length.bit_length() - 1} exceeds supported 2**{MAX_LOG2_LENGTH}")
        fwd, inv, ninv = [], [], []
        for p, g in primes:
            w = pow(g, (p - 1) // length, p)
            fwd.append(_powers(w, length // 2, p))
            inv.append(_powers(pow(w, p - 2, p), length // 2, p))
            ninv.append(pow(length, p - 2, p))
        return cls(length, _bit_reverse(length), tuple(fwd), tuple(inv), tuple(ninv))


def _transform(a: np.ndarray, p: int, table: np.ndarray, rev: np.ndarray) -> np.ndarray:
    """Iterative radix-2 Cooley-Tukey over Z/p; `a` holds residues in [0, p)."""
    n = a.shape[0]
    pp = np.uint64(p)
    a = a[rev]
    half = 1
    while half < n:
        w = table[:: n // (2 * half)][:half]
        blocks = a.reshape(-1, 2 * half)
        u = blocks[:, :half]
        v = blocks[:, half:] * w % pp
        a = np.concatenate(((u + v) % pp, (u + pp - v) % pp), axis=1).reshape(n)
        half *= 2
    return a


def truncated_power(coeffs: list[tuple[int, int]], limit: int, squarings: int) -> list[np.ndarray]:
    """Residues of (sum c_e q^e)**(2**squarings) truncated to degree < limit.

    Returns one uint64 residue array per prime in NTT_PRIMES. Truncation
    between squarings is exact because low-order coefficients of a product
    never depend on high-order coefficients of its factors.
    """
    length = 1
    while length < 2 * limit:
        length *= 2
    plan = NTTPlan.build(max(length, 2))
    out = []
    for i, (p, _) in enumerate(NTT_PRIMES):
        pp = np.uint64(p)
        a = np.zeros(plan.length, dtype=np.uint64)
        for e, c in coeffs:
            if e < limit:
                a[e] = (int(a[e]) + c) % p
        for _ in range(squarings):
            fa = _transform(a, p, plan.forward[i], plan.rev)
            fa = fa * fa % pp
            a = _transform(fa, p, plan.inverse[i], plan.rev) * np.uint64(plan.inv_length[i]) % pp
            a[limit:] = 0
        out.append(a[:limit].copy())
    return out


def crt_reconstruct(residues: list[np.ndarray], bound: int | None = None) -> list[int]:
    """Signed integers from per-prime residues (Garner, vectorised over entries).

    Values are returned in the symmetric range (-M/2, M/2) where M is the
    product of the primes. If `bound` is given, any |value| > bound raises
    ReconstructionOverflow.
    """
    mods = [p for p, _ in NTT_PRIMES[: len(residues)]]
    digits = [residues[0].astype(np.uint64)]
    for i in range(1, len(mods)):
        mi = np.uint64(mods[i])
        # x = d0 + d1 m0 + ... ; solve for d_i mod m_i
        acc = digits[i - 1] % mi
        for j in range(i - 2, -1, -1):
            acc = (acc * np.uint64(mods[j] % mods[i]) + digits[j] % mi) % mi
        inv = pow(int(np.prod([m % mods[i] for m in mods[:i]], dtype=object)) % mods[i], mods[i] - 2, mods[i])
        d = (residues[i].astype(np.uint64) + mi - acc) % mi * np.uint64(inv) % mi
        digits.append(d)
    total = digits[-1].astype(object)
    for j in range(len(mods) - 2, -1, -1):
        total = total * mods[j] + digits[j].astype(object)
    modulus = 1
    for m in mods:
        modulus *= m
    half = modulus // 2
    values = [int(v) - modulus if v > half else int(v) for v in total]
    limit = half - 1 if bound is None else min(bound, half - 1)
    for k, v in enumerate(values):
        if abs(v) > limit:
            raise ReconstructionOverflow(f"coefficient {k} has magnitude beyond {limit}")
    return values


def modulus_bits() -> int:
    m = 1
    for p, _ in NTT_PRIMES:
        m *= p
    return m.bit_length()
