import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from lowmoments import eulerprod as ep
from lowmoments.primes import primes_up_to
from lowmoments.randmult import fixed_phases, h_value, sample_phases


@given(st.floats(-2, 2))
def test_satake_invariants(lp):
    s = ep.satake(lp)
    assert abs(s.alpha + s.beta - lp) <= 1e-12
    assert abs(s.alpha * s.beta - 1) <= 1e-12
    assert abs(abs(s.alpha) - 1) <= 1e-12 and abs(abs(s.beta) - 1) <= 1e-12
    assert s.alpha.imag >= 0


def test_satake_examples(lam):
    assert ep.satake(2.0) == ep.SatakePair(1, 1)
    s0 = ep.satake(0.0)
    assert (s0.alpha, s0.beta) == (1j, -1j)
    s2 = ep.satake(lam[2])
    assert s2.alpha == pytest.approx(-0.265165 + 0.964203j, abs=1e-6)
    assert s2.beta == s2.alpha.conjugate()
    with pytest.raises(ValueError):
        ep.satake(2.01)


def test_satake_closure(lam):
    for p in primes_up_to(50).tolist():
        s = ep.satake(lam[p])
        powers = ep.hecke_powers(lam[p], 21)
        for j in range(21):
            geometric = sum(s.alpha ** (j - i) * s.beta**i for i in range(j + 1))
            assert abs(geometric - powers[j]) <= 1e-10
        if p * p <= lam.limit:
            assert powers[2] == pytest.approx(lam[p * p], abs=1e-12)


def test_euler_value_examples(lam):
    empty = ep.EulerEvaluator.build(1, lam)
    assert ep.euler_value(0.5 + 0j, empty) == 1
    ev2 = ep.EulerEvaluator.build(2, lam, fixed_phases(2, 0.0))
    expected = 1 / (1 - lam[2] / math.sqrt(2) + 0.5)
    assert 1 - lam[2] / math.sqrt(2) + 0.5 == pytest.approx(1.875, abs=1e-6)
    assert ep.euler_value(0.5 + 0j, ev2) == pytest.approx(expected, rel=1e-14)
    assert ep.euler_value(0.5 + 0j, ev2).real == pytest.approx(0.53333, abs=1e-5)
    zero = ep.EulerEvaluator.build(1000, lam, fixed_phases(1000, 0.0))
    for s in (0.5, 0.7, 1.3):
        v = ep.euler_value(s + 0j, zero)
        assert v.real > 0 and abs(v.imag) <= 1e-12 * abs(v)
    with pytest.raises(ValueError):
        ep.euler_value(0.3 + 0j, zero)


def test_product_equals_smooth_dirichlet_series(lam):
    P, s = 7, 2.0 + 1.0j
    ph = sample_phases(P, 4)
    ev = ep.EulerEvaluator.build(P, lam, ph)
    target = ep.euler_value(s, ev)
    errors = []
    for N in (10, 100, 1000, 10_000, 100_000):
        n = np.arange(1, N + 1)
        m = n.copy()
        for p in primes_up_to(P).tolist():
            while True:
                div = m % p == 0
                if not div.any():
                    break
                m[div] //= p
        smooth = n[m == 1]
        series = sum(h_value(int(k), ph) * lam[int(k)] * k**-s for k in smooth)
        errors.append(abs(series - target))
    assert all(b <= a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 1e-8


def test_band_products_tile(lam):
    x = 1e8
    ph = sample_phases(10**4, 6)
    top = int(x ** (1 / math.e))
    ev = ep.EulerEvaluator.build(top, lam, ph)
    s = 0.5 + 0.2j
    prod = 1 + 0j
    for l in range(6):
        prod *= ep.band_product(l, x, s, ev)
    assert ep.band_limits(5, x)[0] < 2
    assert prod == pytest.approx(ep.euler_value(s, ev), rel=1e-10)


def test_band_product_edges(lam):
    ev = ep.EulerEvaluator.build(100, lam, sample_phases(100, 1))
    # band l=2 for x=e**(e**4) covers (e, e**e] ~ (2.72, 15.2]
    x = math.exp(math.exp(4))
    lo, hi = ep.band_limits(2, x)
    assert 2.7 < lo < 2.8 and 15 < hi < 15.3
    assert ep.band_product(10, x, 0.5 + 0j, ev) == 1  # empty band
    with pytest.raises(ValueError):
        ep.band_product(0, x, 0.5 + 0j, ev)
    # band 0 of y = 2.5**e is (2.5**(1/e), 2.5] ~ (1.40, 2.5], holding only p = 2
    y = 2.5**math.e
    lo, hi = ep.band_limits(0, y)
    assert [p for p in ev.primes if lo < p <= hi] == [2]
    alpha, beta = ev.alpha[0], ev.beta[0]
    z = ev.hp[0] * 2 ** -(0.5 + 0j)
    assert ep.band_product(0, y, 0.5 + 0j, ev) == pytest.approx(1 / ((1 - alpha * z) * (1 - beta * z)), rel=1e-13)


def test_per_prime_second_moment_examples():
    for r in (0.1, 0.5, 0.9):
        assert ep.per_prime_second_moment(0.0, r) == pytest.approx(1 / (1 - r**4), rel=1e-13)
    assert ep.per_prime_second_moment(1.3, 1e-9) == pytest.approx(1, abs=1e-15)
    with pytest.raises(ValueError):
        ep.per_prime_second_moment(1.0, 1.0)


@settings(max_examples=100)
@given(st.floats(-2, 2), st.floats(0.01, 0.75))
def test_per_prime_matches_quadrature(lp, r):
    assert ep.per_prime_second_moment(lp, r) == pytest.approx(ep.phase_average_second_moment(lp, r), abs=1e-10)


def test_second_moment_exact_side(lam):
    p2 = ep.exact_second_moment(2, lam)
    direct = sum(v * v * 2.0**-j for j, v in enumerate(ep.hecke_powers(lam[2], 61)))
    assert p2 == pytest.approx(direct, rel=1e-13)
    assert p2 == pytest.approx(1.42, abs=0.005)
    p3 = ep.exact_second_moment(3, lam)
    assert p3 == pytest.approx(p2 * ep.per_prime_second_moment(lam[3], 3**-0.5), rel=1e-14)
    _, e0 = ep.second_moment_identity(50, 0.0, 2, 1, lam)
    _, e3 = ep.second_moment_identity(50, 0.3, 2, 1, lam)
    assert e0 == e3


@pytest.mark.parametrize("P", [100, 1000])
def test_second_moment_mc(lam, P):
    est, exact = ep.second_moment_identity(P, 0.7, 10_000, 31, lam)
    assert abs(est.value - exact) <= 3 * est.std_error


def test_expectation_identity_trivial(lam):
    est, closed = ep.mc_expectation_identity(500, 10**4, ep.MomentExponents(0, 0), 10, 1, lam)
    assert est.value == 1 and closed == 1
    with pytest.raises(ValueError):
        ep.mc_expectation_identity(150, 10**4, ep.MomentExponents(1, 0), 10, 1, lam)
    with pytest.raises(ValueError):
        ep.MomentExponents(-1, 0)


def test_expectation_closed_form_is_prime_sum(lam):
    me = ep.MomentExponents(1, 0)
    primes = [p for p in primes_up_to(10**4).tolist() if p >= 500]
    direct = math.exp(math.fsum(lam[p] ** 2 / p for p in primes))
    assert ep.expectation_closed_form(500, 10**4, me, lam) == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize(
    "me",
    [
        ep.MomentExponents(1, 0),
        ep.MomentExponents(0.5, 0.5, t1=0.0, t2=0.0),
        ep.MomentExponents(0.5, 0.5, t1=1.0, t2=41.0),
    ],
)
def test_expectation_identity_mc(lam, me):
    est, closed = ep.mc_expectation_identity(500, 10**4, me, 10_000, 99, lam)
    assert abs(est.value - closed) <= 3 * est.std_error


def test_grid_avg_single_draw(lam):
    ev = ep.EulerEvaluator.build(1000, lam, sample_phases(1000, 2))
    v = ep.discrete_grid_avg(ev)
    assert isinstance(v, float) and v >= 0
    samples = ep.grid_avg_samples(1000, 3, 2, lam)
    assert samples[0] == pytest.approx(v, rel=1e-12)
    with pytest.raises(ValueError):
        ep.discrete_grid_avg(ep.EulerEvaluator.build(50, lam))


def test_grid_avg_expectation(lam):
    P = 1000
    samples = ep.grid_avg_samples(P, 10_000, 12, lam)
    count = len(ep.grid_points(P))
    expected = count / ep.grid_spacing(P) * ep.exact_second_moment(P, lam)
    se = np.std(samples, ddof=1) / math.sqrt(len(samples))
    assert abs(samples.mean() - expected) <= 3 * se


def test_continuity_defect_regression(lam):
    ev = ep.EulerEvaluator.build(100, lam, fixed_phases(100, 0.0))
    value = ep.continuity_defect(ev)
    assert value == pytest.approx(0.010423063755861639, rel=1e-12)
    D = ep.grid_spacing(100)
    oracle = 0.0
    for j in ep.grid_points(100):
        c = 0.5 + 1j * j / D
        base = ep.euler_value(c, ev)
        oracle += quad(lambda t: abs(ep.euler_value(c + 1j * t, ev) - base) ** 2, -1 / (2 * D), 1 / (2 * D), epsabs=1e-14, epsrel=1e-13)[0]
    assert value == pytest.approx(oracle, rel=1e-10)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([100, 1000, 10_000]))
def test_continuity_defect_quadrature_converged(lam, seed, P):
    ev = ep.EulerEvaluator.build(P, lam, sample_phases(P, seed))
    d16, d32 = ep.continuity_defect(ev), ep.continuity_defect(ev, order=32)
    assert d16 >= 0
    assert abs(d16 - d32) < 1e-6


def test_s_truncation_forms_and_errors(lam):
    ev = ep.EulerEvaluator.build(1000, lam, sample_phases(1000, 3))
    assert np.max(np.abs((ev.lam_p2 - ev.lam_p**2 / 2) - (ev.lam_p2 - 1) / 2)) <= 1e-12
    assert ep.s_truncation(2, ev) == pytest.approx(ep.s_truncation(2, ev, "satake"), abs=1e-10)
    assert ep.s_truncation(0, ep.EulerEvaluator.build(1, lam)) == 0
    with pytest.raises(ValueError):
        ep.s_truncation(int(ep.max_shift(1000)) + 1, ev)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([100, 2000, 10_000]))
def test_s_truncation_defect_bound(lam, seed, P):
    ev = ep.EulerEvaluator.build(P, lam, sample_phases(P, seed))
    bound = ep.truncation_defect_bound(P)
    D = ep.grid_spacing(P)
    M = int(ep.max_shift(P))
    for m in range(-M, M + 1):
        gap = ep.log_abs_euler(0.5 + 1j * m / D, ev) - ep.s_truncation(m, ev)
        assert abs(gap) <= bound
