"""Random Euler products F(s) = prod_{p<=P} (1 - a_p h(p) p^-s)^-1 (1 - b_p h(p) p^-s)^-1.

a_p, b_p are the Satake parameters of lambda(p). Products are always formed
as exp of a sum of principal-branch logarithms; for Re(s) >= 0.4 every factor
satisfies |a_p h(p) p^-s| <= 2**-0.4 < 0.76, so no factor approaches zero.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coefficients import LambdaTable
from .primes import primes_up_to
from .randmult import CHUNK, MCEstimate, PhaseAssignment, phase_block

MIN_REAL_PART = 0.4
MAX_IDENTITY_Y = 10**5
MAX_EXACT_P = 10**4
GRID_EXPONENT = 1.01
SHIFT_EXPONENT = 1.02


@dataclass(frozen=True)
class SatakePair:
    alpha: complex
    beta: complex


def satake(lambda_p: float) -> SatakePair:
    """Roots of z**2 - lambda_p z + 1, the one with Im >= 0 first."""
    if abs(lambda_p) > 2 + 1e-9:
        raise ValueError(f"|lambda(p)| = {abs(lambda_p)} exceeds 2; Satake roots leave the unit circle")
    re = lambda_p / 2
    im = math.sqrt(max(0.0, 1.0 - re * re))
    return SatakePair(complex(re, im), complex(re, -im))


def _satake_arrays(lp: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if np.any(np.abs(lp) > 2 + 1e-9):
        raise ValueError("some |lambda(p)| exceeds 2")
    re = lp / 2
    im = np.sqrt(np.maximum(0.0, 1.0 - re * re))
    return re + 1j * im, re - 1j * im


@dataclass(frozen=True)
class MomentExponents:
    a: float
    b: float
    sigma1: float = 0.0
    sigma2: float = 0.0
    t1: float = 0.0
    t2: float = 0.0

    def __post_init__(self):
        if min(self.a, self.b, self.sigma1, self.sigma2) < 0:
            raise ValueError("a, b, sigma1, sigma2 must be nonnegative")


@dataclass(frozen=True, eq=False)
class EulerEvaluator:
    P: int
    primes: np.ndarray = field(repr=False)
    lam_p: np.ndarray = field(repr=False)
    lam_p2: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    hp: np.ndarray = field(repr=False)  # h(p) on the unit circle

    @classmethod
    def build(cls, P: int, lam: LambdaTable, phases: PhaseAssignment | None = None) -> "EulerEvaluator":
        primes = primes_up_to(P)
        if len(primes):
            lam.require(int(primes[-1]), "P")
        lp = lam.values[primes]
        sq = primes * primes
        lp2 = np.where(sq <= lam.limit, lam.values[np.minimum(sq, lam.limit)], lp * lp - 1)
        alpha, beta = _satake_arrays(lp)
        if phases is None:
            hp = np.ones(len(primes), dtype=np.complex128)
        else:
            if len(primes) and phases.limit < primes[-1]:
                raise ValueError(f"phases cover primes <= {phases.limit}, need {P}")
            hp = phases.on_primes()[: len(primes)]
        return cls(P, primes, lp, lp2, alpha, beta, hp)

    def restrict(self, mask: np.ndarray) -> "EulerEvaluator":
        return EulerEvaluator(
            self.P, self.primes[mask], self.lam_p[mask], self.lam_p2[mask], self.alpha[mask], self.beta[mask], self.hp[mask]
        )


def _log_euler(s, log_p, alpha, beta, hp) -> np.ndarray:
    """sum_p of -log(1 - alpha h p^-s) - log(1 - beta h p^-s); broadcasts over s and hp rows.

    `s` has shape (..., 1) or is scalar; `hp` has shape (n,) or (trials, 1, n)
    or anything broadcasting against (..., n).
    """
    ps = np.exp(-np.multiply.outer(np.asarray(s), log_p))
    z = hp * ps
    return -np.sum(np.log1p(-alpha * z) + np.log1p(-beta * z), axis=-1)


def euler_value(s: complex, ev: EulerEvaluator) -> complex:
    if s.real < MIN_REAL_PART:
        raise ValueError(f"Re(s) = {s.real} below supported {MIN_REAL_PART}")
    if len(ev.primes) == 0:
        return 1 + 0j
    return complex(np.exp(_log_euler(s, np.log(ev.primes), ev.alpha, ev.beta, ev.hp)))


def band_limits(l: int, x: float) -> tuple[float, float]:
    return x ** math.exp(-(l + 2)), x ** math.exp(-(l + 1))


def band_product(l: int, x: float, s: complex, ev: EulerEvaluator) -> complex:
    """Product over primes x**e**-(l+2) < p <= x**e**-(l+1)."""
    if l < 0:
        raise ValueError(f"band index must be >= 0, got {l}")
    lo, hi = band_limits(l, x)
    if math.floor(hi) > ev.P:
        raise ValueError(f"band {l} reaches {hi:.6g}, beyond evaluator cutoff {ev.P}")
    mask = (ev.primes > lo) & (ev.primes <= hi)
    return euler_value(s, ev.restrict(mask))


def hecke_powers(lambda_p: float, count: int) -> np.ndarray:
    """lambda(p**j) for j = 0..count-1 from the three-term Hecke recursion."""
    out = np.empty(count)
    out[0] = 1.0
    if count > 1:
        out[1] = lambda_p
    for j in range(2, count):
        out[j] = lambda_p * out[j - 1] - out[j - 2]
    return out


def per_prime_second_moment(lambda_p: float, r: float) -> float:
    """sum_j lambda(p**j)**2 r**(2j) = E over h(p) of one Euler factor's |.|**2."""
    if not 0 < r < 1:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    rho = r * r
    total, prev, cur, j = 1.0, 1.0, lambda_p, 1
    power = 1.0
    while True:
        power *= rho
        total += cur * cur * power
        # Deligne: lambda(p**i)**2 <= (i+1)**2; bound the remaining tail geometrically
        c = ((j + 3) / (j + 2)) ** 2 * rho
        if c < 1 and (j + 2) ** 2 * power * rho / (1 - c) < 1e-14:
            return total
        prev, cur = cur, lambda_p * cur - prev
        j += 1


def phase_average_second_moment(lambda_p: float, r: float, points: int = 1024) -> float:
    """Trapezoidal average over theta of |1 - lambda_p r e^{i theta} + r^2 e^{2 i theta}|^-2."""
    w = np.exp(2j * np.pi * np.arange(points) / points)
    return float(np.mean(np.abs(1 - lambda_p * r * w + r * r * w * w) ** -2.0))


def exact_second_moment(P: int, lam: LambdaTable) -> float:
    """E|F(1/2 + it)|**2 = prod_{p<=P} per-prime factor; independent of t."""
    total = 1.0
    for p in primes_up_to(P).tolist():
        total *= per_prime_second_moment(float(lam[p]), p**-0.5)
    return total


# -- Monte Carlo identities ---------------------------------------------------


def _mc_rows(stat, n_primes: int, trials: int, seed: int, workers: int = 1) -> np.ndarray:
    """Evaluate stat(phase_rows) over fixed trial chunks, concatenated in trial order."""
    jobs = [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]

    def run(job):
        return stat(phase_block(n_primes, seed, *job))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return np.concatenate(list(pool.map(run, jobs)))
    return np.concatenate([run(j) for j in jobs])


def expectation_closed_form(z: float, y: float, me: MomentExponents, lam: LambdaTable) -> float:
    """exp of sum over z <= p <= y of the three quadratic terms."""
    primes = primes_up_to(int(y))
    primes = primes[primes >= z]
    l2 = lam.values[primes] ** 2
    logp = np.log(primes)
    terms = (
        me.a**2 * l2 * np.exp(-(1 + 2 * me.sigma1) * logp)
        + me.b**2 * l2 * np.exp(-(1 + 2 * me.sigma2) * logp)
        + 2 * me.a * me.b * l2 * np.cos((me.t2 - me.t1) * logp) * np.exp(-(1 + me.sigma1 + me.sigma2) * logp)
    )
    return float(np.exp(np.sum(terms)))


def mc_expectation_identity(
    z: float, y: float, me: MomentExponents, trials: int, seed: int, lam: LambdaTable, workers: int = 1
) -> tuple[MCEstimate, float]:
    """MC of E prod_{z<=p<=y} |factor at s1|**(-2a) |factor at s2|**(-2b) against its closed form."""
    if not 100 * (1 + max(me.a**2, me.b**2)) <= z < y <= MAX_IDENTITY_Y:
        raise ValueError(f"need 100(1+max(a^2,b^2)) <= z < y <= {MAX_IDENTITY_Y}, got z={z}, y={y}")
    if trials < 2:
        raise ValueError("trials must be >= 2")
    closed = expectation_closed_form(z, y, me, lam)
    if me.a == 0 and me.b == 0:
        return MCEstimate(1.0, 0.0, trials, seed), closed
    all_primes = primes_up_to(int(y))
    keep = all_primes >= z
    primes = all_primes[keep]
    lam.require(int(primes[-1]), "y")
    alpha, beta = _satake_arrays(lam.values[primes])
    logp = np.log(primes)
    s1 = 0.5 + me.sigma1 + 1j * me.t1
    s2 = 0.5 + me.sigma2 + 1j * me.t2
    w1 = np.exp(-s1 * logp)
    w2 = np.exp(-s2 * logp)

    def stat(theta):
        h = np.exp(1j * theta[:, keep])
        log_val = np.zeros(len(theta))
        if me.a:
            log_val -= 2 * me.a * np.sum(np.log(np.abs((1 - alpha * h * w1) * (1 - beta * h * w1))), axis=1)
        if me.b:
            log_val -= 2 * me.b * np.sum(np.log(np.abs((1 - alpha * h * w2) * (1 - beta * h * w2))), axis=1)
        return np.exp(log_val)

    samples = _mc_rows(stat, len(all_primes), trials, seed, workers)
    return MCEstimate.from_samples(samples, seed), closed


def second_moment_identity(
    P: int, t: float, trials: int, seed: int, lam: LambdaTable, workers: int = 1
) -> tuple[MCEstimate, float]:
    """MC estimate of E|F(1/2 + it)|**2 and the exact Euler-factor product."""
    if P > MAX_EXACT_P:
        raise ValueError(f"P must be <= {MAX_EXACT_P}, got {P}")
    if trials < 2:
        raise ValueError("trials must be >= 2")
    exact = exact_second_moment(P, lam)
    ev = EulerEvaluator.build(P, lam)
    logp = np.log(ev.primes)

    def stat(theta):
        return np.exp(2 * np.real(_log_euler(0.5 + 1j * t, logp, ev.alpha, ev.beta, np.exp(1j * theta))))

    samples = _mc_rows(stat, len(ev.primes), trials, seed, workers)
    return MCEstimate.from_samples(samples, seed), exact


# -- critical-line grids -------------------------------------------------------


def grid_spacing(P: int) -> float:
    """(log P)**1.01, the reciprocal of the grid step."""
    return math.log(P) ** GRID_EXPONENT


def grid_points(P: int) -> np.ndarray:
    D = grid_spacing(P)
    J = math.floor(D / 2)
    return np.arange(-J, J + 1)


def _require_grid(P: int) -> None:
    if P < 100:
        raise ValueError(f"P must be >= 100, got {P}")


def grid_values(ev: EulerEvaluator) -> tuple[np.ndarray, np.ndarray]:
    """(j, F(1/2 + i j / D)) over the grid |j| <= D/2."""
    _require_grid(ev.P)
    j = grid_points(ev.P)
    s = 0.5 + 1j * j / grid_spacing(ev.P)
    vals = np.exp(_log_euler(s, np.log(ev.primes), ev.alpha, ev.beta, ev.hp))
    return j, vals


def discrete_grid_avg(ev: EulerEvaluator) -> float:
    """(1/D) sum_{|j| <= D/2} |F(1/2 + i j/D)|**2 with D = (log P)**1.01."""
    _, vals = grid_values(ev)
    return float(np.sum(np.abs(vals) ** 2) / grid_spacing(ev.P))


def grid_avg_samples(P: int, trials: int, seed: int, lam: LambdaTable, workers: int = 1) -> np.ndarray:
    """discrete_grid_avg for phase draws 0..trials-1 of `seed`."""
    _require_grid(P)
    ev = EulerEvaluator.build(P, lam)
    D = grid_spacing(P)
    s = 0.5 + 1j * grid_points(P) / D
    logp = np.log(ev.primes)

    def stat(theta):
        h = np.exp(1j * theta)[:, None, :]
        logs = _log_euler(s, logp, ev.alpha, ev.beta, h)  # (trials, grid)
        return np.sum(np.exp(2 * logs.real), axis=1) / D

    return _mc_rows(stat, len(ev.primes), trials, seed, workers)


def continuity_defect(ev: EulerEvaluator, order: int = 16) -> float:
    """sum_j of the integral over |t| <= 1/(2D) of |F(1/2+ij/D+it) - F(1/2+ij/D)|**2.

    Gauss-Legendre with `order` nodes on each cell.
    """
    _require_grid(ev.P)
    D = grid_spacing(ev.P)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    half = 1 / (2 * D)
    t = nodes * half
    centres = 0.5 + 1j * grid_points(ev.P) / D
    logp = np.log(ev.primes)
    base = np.exp(_log_euler(centres, logp, ev.alpha, ev.beta, ev.hp))
    shifted = np.exp(_log_euler(centres[:, None] + 1j * t[None, :], logp, ev.alpha, ev.beta, ev.hp))
    integrand = np.abs(shifted - base[:, None]) ** 2
    return float(np.sum(integrand @ weights) * half)


def max_shift(P: int) -> float:
    """M = 2 (log P)**1.02."""
    return 2 * math.log(P) ** SHIFT_EXPONENT


def s_truncation(m: int, ev: EulerEvaluator, square_form: str = "hecke") -> float:
    """Re sum_{p<=P} [lambda(p) h(p) p^-(1/2+i tau) + c_p h(p)**2 p^-(1+2i tau)], tau = m/D.

    c_p = lambda(p**2) - lambda(p)**2/2; square_form="satake" uses the equal
    value (lambda(p**2) - 1)/2 instead.
    """
    if len(ev.primes) == 0:
        return 0.0
    M = max_shift(ev.P)
    if abs(m) > M:
        raise ValueError(f"|m| = {abs(m)} exceeds M = {M:.6g}")
    tau = m / grid_spacing(ev.P)
    logp = np.log(ev.primes)
    if square_form == "hecke":
        c = ev.lam_p2 - ev.lam_p**2 / 2
    elif square_form == "satake":
        c = (ev.lam_p2 - 1) / 2
    else:
        raise ValueError(f"unknown square_form {square_form!r}")
    first = ev.lam_p * ev.hp * np.exp(-(0.5 + 1j * tau) * logp)
    second = c * ev.hp**2 * np.exp(-(1 + 2j * tau) * logp)
    return float(np.sum(first + second).real)


def truncation_defect_bound(P: int) -> float:
    """sum_{p<=P} (2/3) p**-1.5 / (1 - p**-0.5): bound on |log|F| - S| from the j >= 3 terms."""
    p = primes_up_to(P).astype(np.float64)
    return float(np.sum((2 / 3) * p**-1.5 / (1 - p**-0.5)))


def log_abs_euler(s: complex, ev: EulerEvaluator) -> float:
    if len(ev.primes) == 0:
        return 0.0
    return float(np.real(_log_euler(s, np.log(ev.primes), ev.alpha, ev.beta, ev.hp)))
